#pragma once

#include <cmath>
#include <stdexcept>

#include "sbci/fci/determinants.hpp"
#include "sbci/vector_ops.hpp"

namespace sbci::fci {

/**
 * <S^2> of a CI vector via determinant-wise application of S+:
 * <S^2> = |S+ x|^2 / |x|^2 + S_z (S_z + 1). S+ maps the (na, nb) sector to
 * (na+1, nb-1); the phase follows the alpha-block-then-beta-block operator
 * ordering convention.
 */
inline double spin_squared(const DeterminantBasis& basis, const Vector& x) {
    if (x.size() != basis.n_det()) throw std::invalid_argument("spin_squared: vector length mismatch");
    const double xx = dot(x, x);
    if (!(xx > 0.0)) throw std::invalid_argument("spin_squared: zero vector");

    const double sz = 0.5 * (basis.n_alpha - basis.n_beta);
    double raised_sq = 0.0;

    if (basis.n_beta > 0 && basis.n_alpha < basis.norb) {
        const DeterminantBasis up = enumerate_basis(basis.norb, basis.n_alpha + 1, basis.n_beta - 1);
        Vector w(up.n_det(), 0.0);
        const int n_alpha = basis.n_alpha;
        for (std::size_t ia = 0; ia < basis.alpha_strings.size(); ++ia) {
            const OrbString a = basis.alpha_strings[ia];
            for (std::size_t ib = 0; ib < basis.beta_strings.size(); ++ib) {
                const OrbString b = basis.beta_strings[ib];
                const double c = x[basis.index(ia, ib)];
                if (c == 0.0) continue;
                for (int p = 0; p < basis.norb; ++p) {
                    if (!((b >> p) & 1)) continue;    // needs a beta electron at p
                    if ((a >> p) & 1) continue;       // alpha slot must be empty
                    const OrbString a2 = a | (OrbString{1} << p);
                    const OrbString b2 = b ^ (OrbString{1} << p);
                    const int phase = n_alpha + popcount_below(b, p) + popcount_below(a, p);
                    const double sign = (phase % 2 == 0) ? 1.0 : -1.0;
                    const std::size_t ja = string_index(up.alpha_strings, a2);
                    const std::size_t jb = string_index(up.beta_strings, b2);
                    w[up.index(ja, jb)] += sign * c;
                }
            }
        }
        raised_sq = dot(w, w);
    }
    return raised_sq / xx + sz * (sz + 1.0);
}

}  // namespace sbci::fci
