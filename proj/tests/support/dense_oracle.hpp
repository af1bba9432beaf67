#pragma once

// Independent oracles for the test suite. Everything here deliberately takes
// a different route from the library: Eigen's dense eigensolver instead of
// the Jacobi kernel, and textbook per-element Slater-Condon rules instead of
// the string-driven sigma contraction.

#include <Eigen/Dense>
#include <bit>
#include <stdexcept>
#include <vector>

#include "sbci/fci/determinants.hpp"
#include "sbci/fci/fcidump.hpp"
#include "sbci/operator.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using sbci::Vector;

/// Materializes the operator column by column. Bumps the apply counter;
/// budget-sensitive tests must count around it.
inline Matrix densify(const sbci::SymmetricOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.dim());
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Vector e(op.dim(), 0.0);
        e[static_cast<std::size_t>(j)] = 1.0;
        const Vector col = op.apply(e);
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
    }
    return 0.5 * (m + m.transpose());
}

struct Eigensystem {
    std::vector<double> values;
    Matrix vectors;
};

inline Eigensystem eigensystem(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("oracle eigensolver failed");
    Eigensystem out;
    out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
    out.vectors = solver.eigenvectors();
    return out;
}

inline Vector to_vector(const Eigen::VectorXd& v) {
    return Vector(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd to_eigen(const Vector& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

/// Largest principal angle (radians) between span(A) and span(B).
inline double principal_angle(const Matrix& a, const Matrix& b) {
    const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
    const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
    Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
    double min_sigma = 1.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        min_sigma = std::min(min_sigma, svd.singularValues()[i]);
    min_sigma = std::clamp(min_sigma, -1.0, 1.0);
    return std::acos(min_sigma);
}

// ---------------------------------------------------------------------------
// Textbook Slater-Condon matrix elements (chemist-notation integrals).
// ---------------------------------------------------------------------------

namespace detail {

using sbci::fci::OrbString;

inline std::vector<int> occupied(OrbString s, int norb) {
    std::vector<int> occ;
    for (int p = 0; p < norb; ++p)
        if ((s >> p) & 1) occ.push_back(p);
    return occ;
}

/// Phase of the single excitation hole -> particle within one spin string:
/// (-1)^(number of occupied orbitals strictly between them).
inline double excitation_phase(OrbString str, int hole, int particle) {
    const int lo = std::min(hole, particle) + 1;
    const int hi = std::max(hole, particle);
    int count = 0;
    for (int p = lo; p < hi; ++p)
        if ((str >> p) & 1) ++count;
    return (count % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace detail

/// <D1|H|D2> straight from the rules, one determinant pair at a time.
inline double slater_condon_element(const sbci::fci::FciProblem& prob, sbci::fci::OrbString a1,
                                    sbci::fci::OrbString b1, sbci::fci::OrbString a2,
                                    sbci::fci::OrbString b2) {
    using sbci::fci::OrbString;
    const int norb = prob.norb;
    const int da = std::popcount(a1 ^ a2) / 2;
    const int db = std::popcount(b1 ^ b2) / 2;
    if (da + db > 2) return 0.0;

    const auto occ_a1 = detail::occupied(a1, norb);
    const auto occ_b1 = detail::occupied(b1, norb);

    if (da == 0 && db == 0) {
        double e = prob.e_core;
        for (int i : occ_a1) e += prob.h1_at(i, i);
        for (int i : occ_b1) e += prob.h1_at(i, i);
        for (int i : occ_a1)
            for (int j : occ_a1) e += 0.5 * (prob.eri_at(i, i, j, j) - prob.eri_at(i, j, j, i));
        for (int i : occ_b1)
            for (int j : occ_b1) e += 0.5 * (prob.eri_at(i, i, j, j) - prob.eri_at(i, j, j, i));
        for (int i : occ_a1)
            for (int j : occ_b1) e += prob.eri_at(i, i, j, j);
        return e;
    }

    auto holes_particles = [&](OrbString s1, OrbString s2, std::vector<int>& holes, std::vector<int>& parts) {
        holes = detail::occupied(s1 & ~s2, norb);
        parts = detail::occupied(s2 & ~s1, norb);
    };

    if (da == 1 && db == 0) {
        std::vector<int> h, p;
        holes_particles(a1, a2, h, p);
        const int i = h[0], j = p[0];
        double e = prob.h1_at(i, j);
        for (int k : detail::occupied(a1 & a2, norb)) e += prob.eri_at(i, j, k, k) - prob.eri_at(i, k, k, j);
        for (int k : occ_b1) e += prob.eri_at(i, j, k, k);
        return detail::excitation_phase(a1, i, j) * e;
    }
    if (da == 0 && db == 1) {
        std::vector<int> h, p;
        holes_particles(b1, b2, h, p);
        const int i = h[0], j = p[0];
        double e = prob.h1_at(i, j);
        for (int k : detail::occupied(b1 & b2, norb)) e += prob.eri_at(i, j, k, k) - prob.eri_at(i, k, k, j);
        for (int k : occ_a1) e += prob.eri_at(i, j, k, k);
        return detail::excitation_phase(b1, i, j) * e;
    }
    if (da == 1 && db == 1) {
        std::vector<int> ha, pa, hb, pb;
        holes_particles(a1, a2, ha, pa);
        holes_particles(b1, b2, hb, pb);
        const double phase =
            detail::excitation_phase(a1, ha[0], pa[0]) * detail::excitation_phase(b1, hb[0], pb[0]);
        return phase * prob.eri_at(ha[0], pa[0], hb[0], pb[0]);
    }

    // Same-spin double excitation: sequential phases through the intermediate
    // string, antisymmetrized pairing.
    auto same_spin_double = [&](OrbString s1, OrbString s2) {
        std::vector<int> h, p;
        holes_particles(s1, s2, h, p);
        const int i1 = h[0], i2 = h[1], j1 = p[0], j2 = p[1];
        const OrbString mid = (s1 ^ (OrbString{1} << i1)) | (OrbString{1} << j1);
        const double phase = detail::excitation_phase(s1, i1, j1) * detail::excitation_phase(mid, i2, j2);
        return phase * (prob.eri_at(i1, j1, i2, j2) - prob.eri_at(i1, j2, i2, j1));
    };
    if (da == 2) return same_spin_double(a1, a2);
    return same_spin_double(b1, b2);
}

/// Dense H over the basis, element by element.
inline Matrix dense_fci_hamiltonian(const sbci::fci::FciProblem& prob,
                                    const sbci::fci::DeterminantBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.n_det());
    Matrix m(n, n);
    const std::size_t nb = basis.beta_strings.size();
    for (std::size_t r = 0; r < basis.n_det(); ++r) {
        const auto a1 = basis.alpha_strings[r / nb];
        const auto b1 = basis.beta_strings[r % nb];
        for (std::size_t c = 0; c < basis.n_det(); ++c) {
            const auto a2 = basis.alpha_strings[c / nb];
            const auto b2 = basis.beta_strings[c % nb];
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                slater_condon_element(prob, a1, b1, a2, b2);
        }
    }
    return m;
}

}  // namespace oracle
