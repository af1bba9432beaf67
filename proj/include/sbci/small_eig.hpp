#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sbci/vector_ops.hpp"

namespace sbci {

/// Dense row-major square matrix, just big enough for the subspace work here.
struct SmallMatrix {
    int n = 0;
    std::vector<double> a;  // n*n row-major

    SmallMatrix() = default;
    explicit SmallMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Full spectrum of a small symmetric matrix, eigenvalues ascending with
/// matching orthonormal eigenvector columns.
struct SmallEigResult {
    std::vector<double> eigenvalues;
    SmallMatrix eigenvectors;  // column k = eigenvector for eigenvalues[k]
};

namespace detail {

inline double offdiag_sq(const SmallMatrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return s;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for symmetric matrices. Intended for the small
/// subspace problems (m <= 6) and the Davidson search space; O(n^3) per sweep.
inline SmallEigResult jacobi_symmetric_eig(SmallMatrix m) {
    const int n = m.n;
    SmallEigResult out;
    out.eigenvectors = SmallMatrix(n);
    for (int i = 0; i < n; ++i) out.eigenvectors(i, i) = 1.0;
    if (n == 0) return out;
    if (n == 1) {
        out.eigenvalues = {m(0, 0)};
        return out;
    }

    double fro = 0.0;
    for (double v : m.a) fro += v * v;
    const double stop = 1e-30 * std::max(fro, 1e-300);

    SmallMatrix& v = out.eigenvectors;
    for (int sweep = 0; sweep < 100 && detail::offdiag_sq(m) > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double app = m(p, p), aqq = m(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = m(i, i);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] < diag[j]; });

    out.eigenvalues.resize(n);
    SmallMatrix sorted(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = diag[order[k]];
        for (int i = 0; i < n; ++i) sorted(i, k) = v(i, order[k]);
    }
    out.eigenvectors = std::move(sorted);
    return out;
}

/// Spectrum of a symmetric m x m matrix with m <= 6 (the SBCI subspace sizes).
/// Input must be symmetric to 1e-12 relative; asymmetry is a caller bug.
inline SmallEigResult small_symmetric_eig(const SmallMatrix& m) {
    if (m.n < 1 || m.n > 6) throw std::invalid_argument("small_symmetric_eig: need 1 <= m <= 6");
    double scale = 0.0, asym = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            scale = std::max(scale, std::abs(m(i, j)));
            asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
        }
    if (asym > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("small_symmetric_eig: input not symmetric");
    return jacobi_symmetric_eig(m);
}

}  // namespace sbci
