#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sbci/small_eig.hpp"
#include "sbci/vector_ops.hpp"

namespace sbci {

/**
 * Map from a set of input vectors to an orthonormal basis:
 * basis column c = sum_i inputs[i] * coeff(i, c). Inputs whose new direction
 * was linearly dependent (Gram-Schmidt) or whose overlap eigenmode fell below
 * the cutoff (canonical) are listed in `dropped`.
 */
struct OrthoTransform {
    int n_inputs = 0;
    int rank = 0;
    std::vector<double> p;  // n_inputs x rank, column-major in c
    std::vector<int> dropped;

    double coeff(int input, int column) const { return p[static_cast<std::size_t>(column) * n_inputs + input]; }
    double& coeff(int input, int column) { return p[static_cast<std::size_t>(column) * n_inputs + input]; }
};

/// Gram-Schmidt coefficients over {x, z} or {x, y, z}, computed from the six
/// pairwise inner products only. Scale factors follow the triangle
/// x_bar = A_x x; y_bar = B_x x + B_y y; z_bar = C_x x + C_y y + C_z z.
struct GramSchmidtCoeffs {
    double A_x = 0.0;
    double B_x = 0.0, B_y = 0.0;
    double C_x = 0.0, C_y = 0.0, C_z = 0.0;
    bool has_y = false;
    bool y_degenerate = false;  // y direction vanished after projection
    bool z_degenerate = false;  // z direction vanished after projection
    bool x_degenerate = false;  // x itself has no norm

    bool ok() const { return !x_degenerate && !z_degenerate && (!has_y || !y_degenerate); }
};

/// Coefficient-only Gram-Schmidt from precomputed inner products.
/// Pass has_y = false for the two-vector {x, z} case.
inline GramSchmidtCoeffs gram_schmidt_from_dots(double nxx, double nxy, double nyy, double nxz,
                                                double nyz, double nzz, bool has_y, double lindep) {
    GramSchmidtCoeffs g;
    g.has_y = has_y;
    if (!(nxx > 0.0)) {
        g.x_degenerate = true;
        return g;
    }
    g.A_x = 1.0 / std::sqrt(nxx);

    double proj = 0.0;  // P of the z projection onto y_bar
    if (has_y) {
        const double y_residual_sq = nyy - nxy * nxy / nxx;
        if (!(nyy > 0.0) || y_residual_sq <= lindep * lindep * nyy) {
            g.y_degenerate = true;
            return g;
        }
        g.B_y = 1.0 / std::sqrt(y_residual_sq);
        g.B_x = -(nxy / nxx) * g.B_y;
        proj = g.B_x * nxz + g.B_y * nyz;
    }

    const double z_residual_sq = nzz - nxz * nxz / nxx - proj * proj;
    if (!(nzz > 0.0) || z_residual_sq <= lindep * lindep * nzz) {
        g.z_degenerate = true;
        return g;
    }
    g.C_z = 1.0 / std::sqrt(z_residual_sq);
    g.C_y = -proj * g.B_y * g.C_z;
    g.C_x = -(nxz / nxx + proj * g.B_x) * g.C_z;
    return g;
}

/**
 * Gram-Schmidt orthonormalization of {x, z} or {x, y, z} expressed as an
 * OrthoTransform. A new direction whose norm after projection falls below
 * lindep (relative) drops out and lands in `dropped`; the caller decides
 * whether that means fallback or restart.
 */
inline OrthoTransform gram_schmidt_coeffs(const Vector& x, const Vector* y, const Vector& z,
                                          double lindep = 1e-14) {
    if (y) check_same_size(x, *y, "gram_schmidt_coeffs");
    check_same_size(x, z, "gram_schmidt_coeffs");
    const double nxx = dot(x, x);
    const double nxz = dot(x, z);
    const double nzz = dot(z, z);
    const double nxy = y ? dot(x, *y) : 0.0;
    const double nyy = y ? dot(*y, *y) : 0.0;
    const double nyz = y ? dot(*y, z) : 0.0;
    if (!(nxx > 0.0)) throw std::invalid_argument("gram_schmidt_coeffs: x must be nonzero");

    const GramSchmidtCoeffs g = gram_schmidt_from_dots(nxx, nxy, nyy, nxz, nyz, nzz, y != nullptr, lindep);

    OrthoTransform t;
    t.n_inputs = y ? 3 : 2;
    const int yi = 1, zi = y ? 2 : 1;

    std::vector<std::vector<double>> cols;
    cols.push_back([&] {
        std::vector<double> c(t.n_inputs, 0.0);
        c[0] = g.A_x;
        return c;
    }());
    if (y) {
        if (g.y_degenerate) {
            t.dropped.push_back(yi);
        } else {
            std::vector<double> c(t.n_inputs, 0.0);
            c[0] = g.B_x;
            c[yi] = g.B_y;
            cols.push_back(std::move(c));
        }
    }
    if (g.y_degenerate || g.z_degenerate) {
        // With y gone the z coefficients were never formed; recompute the
        // two-vector triangle for z so a usable rank-2 transform remains.
        if (g.y_degenerate) {
            const GramSchmidtCoeffs g2 = gram_schmidt_from_dots(nxx, 0, 0, nxz, 0, nzz, false, lindep);
            if (!g2.z_degenerate) {
                std::vector<double> c(t.n_inputs, 0.0);
                c[0] = g2.C_x;
                c[zi] = g2.C_z;
                cols.push_back(std::move(c));
            } else {
                t.dropped.push_back(zi);
            }
        } else {
            t.dropped.push_back(zi);
        }
    } else {
        std::vector<double> c(t.n_inputs, 0.0);
        c[0] = g.C_x;
        if (y) c[yi] = g.C_y;
        c[zi] = g.C_z;
        cols.push_back(std::move(c));
    }

    t.rank = static_cast<int>(cols.size());
    t.p.assign(static_cast<std::size_t>(t.n_inputs) * t.rank, 0.0);
    for (int c = 0; c < t.rank; ++c)
        for (int i = 0; i < t.n_inputs; ++i) t.coeff(i, c) = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    return t;
}

/**
 * Canonical orthogonalization P = U s^{-1/2}: build the overlap matrix from
 * all pairwise dots, diagonalize, discard eigenmodes below the cutoff
 * (default 1e-14, negatives included). Kept modes are ordered by descending
 * overlap eigenvalue. Throws if every mode is discarded.
 */
inline OrthoTransform canonical_orthogonalize(const std::vector<Vector>& vectors, double cutoff = 1e-14) {
    const int k = static_cast<int>(vectors.size());
    if (k < 1) throw std::invalid_argument("canonical_orthogonalize: need at least one vector");

    SmallMatrix s(k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) s(i, j) = s(j, i) = dot(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(j)]);

    const SmallEigResult eig = jacobi_symmetric_eig(s);

    OrthoTransform t;
    t.n_inputs = k;
    std::vector<int> kept;
    for (int m = k - 1; m >= 0; --m) {  // descending eigenvalue
        if (eig.eigenvalues[static_cast<std::size_t>(m)] >= cutoff)
            kept.push_back(m);
        else
            t.dropped.push_back(m);
    }
    if (kept.empty()) throw std::runtime_error("canonical_orthogonalize: all overlap modes below cutoff");

    t.rank = static_cast<int>(kept.size());
    t.p.assign(static_cast<std::size_t>(k) * t.rank, 0.0);
    for (int c = 0; c < t.rank; ++c) {
        const int m = kept[static_cast<std::size_t>(c)];
        const double inv_sqrt = 1.0 / std::sqrt(eig.eigenvalues[static_cast<std::size_t>(m)]);
        for (int i = 0; i < k; ++i) t.coeff(i, c) = eig.eigenvectors(i, m) * inv_sqrt;
    }
    return t;
}

/**
 * Subspace representation P^T G P of the operator, where G[i][j] =
 * dot(vectors[i], images[j]) with images[j] = H vectors[j] already cached.
 * G is symmetrized before projection; floating-point dots break exact
 * symmetry.
 */
inline SmallMatrix build_subspace_matrix(const std::vector<Vector>& vectors, const std::vector<Vector>& images,
                                         const OrthoTransform& t) {
    const int k = static_cast<int>(vectors.size());
    if (static_cast<int>(images.size()) != k || t.n_inputs != k)
        throw std::invalid_argument("build_subspace_matrix: dimension mismatch");

    SmallMatrix g(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = dot(vectors[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)]);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double sym = 0.5 * (g(i, j) + g(j, i));
            g(i, j) = g(j, i) = sym;
        }

    SmallMatrix out(t.rank);
    for (int a = 0; a < t.rank; ++a)
        for (int b = 0; b < t.rank; ++b) {
            double s = 0.0;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) s += t.coeff(i, a) * g(i, j) * t.coeff(j, b);
            out(a, b) = s;
        }
    for (int a = 0; a < out.n; ++a)
        for (int b = a + 1; b < out.n; ++b) {
            const double sym = 0.5 * (out(a, b) + out(b, a));
            out(a, b) = out(b, a) = sym;
        }
    return out;
}

/// Materialize the orthonormal basis vectors (used by tests and Davidson).
inline std::vector<Vector> apply_transform(const std::vector<Vector>& vectors, const OrthoTransform& t) {
    std::vector<Vector> basis;
    basis.reserve(static_cast<std::size_t>(t.rank));
    for (int c = 0; c < t.rank; ++c) {
        Vector b(vectors.front().size(), 0.0);
        for (int i = 0; i < t.n_inputs; ++i) axpy(t.coeff(i, c), vectors[static_cast<std::size_t>(i)], b);
        basis.push_back(std::move(b));
    }
    return basis;
}

}  // namespace sbci
