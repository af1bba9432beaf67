#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "sbci/operator.hpp"

namespace sbci {

struct SyntheticSpec {
    std::size_t n = 200;
    std::uint64_t seed = 1;
    double density = 0.02;      // off-diagonal fill fraction
    double gap = 1.0;           // mean diagonal growth per index
    std::optional<double> degeneracy_split;  // force lambda_2 - lambda_1 to this value
};

namespace detail {

/// Gershgorin lower bound on the spectrum of a triangle-stored matrix.
inline double gershgorin_lower(std::size_t n, const std::vector<SparseOperator::Entry>& entries,
                               const Vector& diag) {
    Vector radius(n, 0.0);
    for (const auto& e : entries) {
        if (e.row == e.col) continue;
        radius[e.row] += std::abs(e.value);
        radius[e.col] += std::abs(e.value);
    }
    double lo = diag.empty() ? 0.0 : diag[0] - radius[0];
    for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, diag[i] - radius[i]);
    return lo;
}

}  // namespace detail

/**
 * Deterministic CI-like test matrix: diagonal growing (on average) with the
 * index, off-diagonals Bernoulli(density) with magnitude decaying in |i-j|.
 * With degeneracy_split set, a rank-2 spectral surgery pins the two lowest
 * eigenvalues at exactly (L, L + split) for a Gershgorin-safe L, attached to
 * two random orthonormal eigenvectors with small support.
 */
inline std::shared_ptr<SparseOperator> gen_synthetic_ci_matrix(const SyntheticSpec& spec) {
    if (spec.n < 4) throw std::invalid_argument("gen_synthetic_ci_matrix: n must be >= 4");
    if (spec.density < 0.0 || spec.density > 1.0)
        throw std::invalid_argument("gen_synthetic_ci_matrix: density must be in [0, 1]");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);

    const std::size_t n = spec.n;
    const double decay_length = std::max<double>(4.0, static_cast<double>(n) / 20.0);

    std::map<std::pair<std::size_t, std::size_t>, double> coeff;
    Vector diag(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = spec.gap * static_cast<double>(i) + 0.3 * spec.gap * sym(rng);
        coeff[{i, i}] = diag[i];
    }
    const double offdiag_scale = 0.5 * spec.gap;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double roll = u01(rng);
            const double val = sym(rng);  // drawn unconditionally to decouple structure from values
            if (roll >= spec.density) continue;
            coeff[{i, j}] = offdiag_scale * val * std::exp(-static_cast<double>(j - i) / decay_length);
        }

    if (spec.degeneracy_split) {
        const double split = *spec.degeneracy_split;
        // Base matrix M as built so far.
        std::vector<SparseOperator::Entry> base;
        base.reserve(coeff.size());
        for (const auto& [ij, v] : coeff) base.push_back({ij.first, ij.second, v});
        SparseOperator m(n, base);

        // Two orthonormal vectors anchored on the two smallest diagonal
        // entries (plus a small random tail), so diagonal seeding overlaps
        // the planted eigenvectors; a support invisible to the seeds would
        // leave them in an unreachable invariant subspace.
        std::vector<std::size_t> by_diag(n);
        for (std::size_t i = 0; i < n; ++i) by_diag[i] = i;
        std::stable_sort(by_diag.begin(), by_diag.end(),
                         [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
        const std::size_t anchor0 = by_diag[0], anchor1 = by_diag[1];
        const std::size_t tail = std::min<std::size_t>(8, n - 2);
        Vector q1(n, 0.0), q2(n, 0.0);
        q1[anchor0] = 3.0;
        q2[anchor1] = 3.0;
        for (std::size_t k = 0; k < tail; ++k) {
            const std::size_t i = by_diag[2 + k];
            q1[i] = 0.5 * sym(rng);
            q2[i] = 0.5 * sym(rng);
        }
        normalize(q1);
        axpy(-dot(q1, q2), q1, q2);
        if (normalize(q2) == 0.0) q2[anchor1] = 1.0;  // would need a pathological draw

        // M' = P M P + L q1 q1^T + (L + split) q2 q2^T with P = I - q1q1^T - q2q2^T:
        // the complement spectrum of P M P sits above the Gershgorin floor, so
        // placing L one unit below it pins the two lowest eigenvalues exactly.
        const double floor = detail::gershgorin_lower(n, m.entries(), m.diagonal());
        const double lam1 = floor - 1.0;
        const Vector u1 = m.apply(q1);
        const Vector u2 = m.apply(q2);
        const double w11 = dot(q1, u1), w12 = dot(q1, u2), w22 = dot(q2, u2);

        auto add = [&](std::size_t i, std::size_t j, double v) {
            if (v == 0.0) return;
            auto key = i <= j ? std::make_pair(i, j) : std::make_pair(j, i);
            coeff[key] += v;
        };
        for (std::size_t i = 0; i < n; ++i) {
            const bool live_i = q1[i] != 0.0 || q2[i] != 0.0 || u1[i] != 0.0 || u2[i] != 0.0;
            if (!live_i) continue;
            for (std::size_t j = i; j < n; ++j) {
                const bool live_j = q1[j] != 0.0 || q2[j] != 0.0 || u1[j] != 0.0 || u2[j] != 0.0;
                if (!live_j) continue;
                double corr = -(q1[i] * u1[j] + u1[i] * q1[j]) - (q2[i] * u2[j] + u2[i] * q2[j]);
                corr += q1[i] * (w11 + lam1) * q1[j];
                corr += q2[i] * (w22 + lam1 + split) * q2[j];
                corr += (q1[i] * q2[j] + q2[i] * q1[j]) * w12;
                add(i, j, corr);
            }
        }
    }

    std::vector<SparseOperator::Entry> entries;
    entries.reserve(coeff.size());
    for (const auto& [ij, v] : coeff) entries.push_back({ij.first, ij.second, v});
    return std::make_shared<SparseOperator>(n, std::move(entries));
}

inline std::shared_ptr<SparseOperator> gen_synthetic_ci_matrix(std::size_t n, std::uint64_t seed,
                                                               double density, double gap = 1.0) {
    SyntheticSpec s;
    s.n = n;
    s.seed = seed;
    s.density = density;
    s.gap = gap;
    return gen_synthetic_ci_matrix(s);
}

}  // namespace sbci
