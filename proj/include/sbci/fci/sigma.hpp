#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "sbci/fci/determinants.hpp"
#include "sbci/fci/fcidump.hpp"
#include "sbci/operator.hpp"
#include "sbci/vector_ops.hpp"

namespace sbci::fci {

/// One entry of the single-excitation table: a+_p a_q |source> = sign |target>.
/// Occupation entries (p == q) are included; the quadratic contraction needs
/// them to produce the Coulomb/diagonal pieces.
struct Excitation {
    std::uint16_t p, q;
    std::uint32_t target;
    double sign;
};

using LinkTable = std::vector<std::vector<Excitation>>;

inline LinkTable build_link_table(const std::vector<OrbString>& strings, int norb) {
    LinkTable links(strings.size());
    for (std::size_t s = 0; s < strings.size(); ++s) {
        const OrbString str = strings[s];
        auto& row = links[s];
        for (int q = 0; q < norb; ++q) {
            if (!((str >> q) & 1)) continue;
            row.push_back({static_cast<std::uint16_t>(q), static_cast<std::uint16_t>(q),
                           static_cast<std::uint32_t>(s), 1.0});
            const OrbString removed = str ^ (OrbString{1} << q);
            const int sign_q = popcount_below(str, q);
            for (int p = 0; p < norb; ++p) {
                if ((removed >> p) & 1) continue;
                if (p == q) continue;
                const OrbString target = removed | (OrbString{1} << p);
                const int sign_p = popcount_below(removed, p);
                const double sign = ((sign_q + sign_p) % 2 == 0) ? 1.0 : -1.0;
                row.push_back({static_cast<std::uint16_t>(p), static_cast<std::uint16_t>(q),
                               static_cast<std::uint32_t>(string_index(strings, target)), sign});
            }
        }
    }
    return links;
}

/**
 * h1 absorbed into the quadratic spin-summed form: sigma = E_core x +
 * sum_pqrs h2e[pq][rs] E_pq E_rs x, with h2e = (eri + one-electron folds)/2.
 */
inline std::vector<double> absorb_h1(const FciProblem& prob, int nelec_sector) {
    const int no = prob.norb;
    const std::size_t no2 = static_cast<std::size_t>(no) * no;
    std::vector<double> h2e = prob.eri;

    std::vector<double> f1e(no2, 0.0);
    for (int p = 0; p < no; ++p)
        for (int q = 0; q < no; ++q) {
            double corr = 0.0;
            for (int r = 0; r < no; ++r) corr += prob.eri_at(p, r, r, q);
            f1e[static_cast<std::size_t>(p) * no + q] =
                (prob.h1_at(p, q) - 0.5 * corr) / static_cast<double>(nelec_sector);
        }

    auto at = [&](int a, int b, int c, int d) -> double& {
        return h2e[((static_cast<std::size_t>(a) * no + b) * no + c) * no + d];
    };
    for (int k = 0; k < no; ++k)
        for (int p = 0; p < no; ++p)
            for (int q = 0; q < no; ++q) {
                at(k, k, p, q) += f1e[static_cast<std::size_t>(p) * no + q];
                at(p, q, k, k) += f1e[static_cast<std::size_t>(p) * no + q];
            }
    for (double& v : h2e) v *= 0.5;
    return h2e;
}

/// Workspace-heavy but simple sigma contraction: t1[pq] = E_pq x for both
/// spins, g1 = h2e . t1, sigma = sum_pq E_pq g1[pq] + E_core x.
/// Needs 2 * norb^2 * n_det doubles of scratch.
inline Vector contract_sigma(const FciProblem& prob, const DeterminantBasis& basis,
                             const std::vector<double>& h2e, const LinkTable& links_a,
                             const LinkTable& links_b, const Vector& x) {
    const std::size_t na = basis.alpha_strings.size();
    const std::size_t nb = basis.beta_strings.size();
    const std::size_t ndet = na * nb;
    if (x.size() != ndet) throw std::invalid_argument("contract_sigma: vector length mismatch");
    const int no = prob.norb;
    const std::size_t no2 = static_cast<std::size_t>(no) * no;

    std::vector<double> t1(no2 * ndet, 0.0);
    for (std::size_t ia = 0; ia < na; ++ia)
        for (const auto& e : links_a[ia]) {
            const std::size_t dst = (static_cast<std::size_t>(e.p) * no + e.q) * ndet + e.target * nb;
            const std::size_t src = ia * nb;
            for (std::size_t ib = 0; ib < nb; ++ib) t1[dst + ib] += e.sign * x[src + ib];
        }
    for (std::size_t ib = 0; ib < nb; ++ib)
        for (const auto& e : links_b[ib]) {
            const std::size_t pq = (static_cast<std::size_t>(e.p) * no + e.q) * ndet;
            for (std::size_t ia = 0; ia < na; ++ia) t1[pq + ia * nb + e.target] += e.sign * x[ia * nb + ib];
        }

    std::vector<double> g1(no2 * ndet, 0.0);
    for (std::size_t pq = 0; pq < no2; ++pq) {
        double* out = g1.data() + pq * ndet;
        const double* h = h2e.data() + pq * no2;
        for (std::size_t rs = 0; rs < no2; ++rs) {
            const double coeff = h[rs];
            if (coeff == 0.0) continue;
            const double* src = t1.data() + rs * ndet;
            for (std::size_t d = 0; d < ndet; ++d) out[d] += coeff * src[d];
        }
    }

    Vector sigma(ndet, 0.0);
    for (std::size_t ia = 0; ia < na; ++ia)
        for (const auto& e : links_a[ia]) {
            const std::size_t src = (static_cast<std::size_t>(e.p) * no + e.q) * ndet + ia * nb;
            const std::size_t dst = static_cast<std::size_t>(e.target) * nb;
            for (std::size_t ib = 0; ib < nb; ++ib) sigma[dst + ib] += e.sign * g1[src + ib];
        }
    for (std::size_t ib = 0; ib < nb; ++ib)
        for (const auto& e : links_b[ib]) {
            const std::size_t pq = (static_cast<std::size_t>(e.p) * no + e.q) * ndet;
            for (std::size_t ia = 0; ia < na; ++ia)
                sigma[ia * nb + e.target] += e.sign * g1[pq + ia * nb + ib];
        }

    axpy(prob.e_core, x, sigma);
    return sigma;
}

}  // namespace sbci::fci
