#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "sbci/fci/determinants.hpp"
#include "sbci/fci/fcidump.hpp"
#include "sbci/fci/sigma.hpp"
#include "sbci/operator.hpp"

namespace sbci::fci {

/// Diagonal <D|H|D> for every determinant, computed directly from occupied
/// orbital sums (no sigma pass).
inline Vector hamiltonian_diagonal(const FciProblem& prob, const DeterminantBasis& basis) {
    const std::size_t na = basis.alpha_strings.size();
    const std::size_t nb = basis.beta_strings.size();
    const int no = prob.norb;

    auto occupied = [&](OrbString s) {
        std::vector<int> occ;
        for (int p = 0; p < no; ++p)
            if ((s >> p) & 1) occ.push_back(p);
        return occ;
    };

    // Same-spin pieces depend only on the string; precompute per string.
    auto string_energy = [&](const std::vector<int>& occ) {
        double e = 0.0;
        for (int i : occ) e += prob.h1_at(i, i);
        for (int i : occ)
            for (int j : occ) e += 0.5 * (prob.eri_at(i, i, j, j) - prob.eri_at(i, j, j, i));
        return e;
    };

    std::vector<std::vector<int>> occ_a(na), occ_b(nb);
    std::vector<double> ea(na), eb(nb);
    for (std::size_t ia = 0; ia < na; ++ia) {
        occ_a[ia] = occupied(basis.alpha_strings[ia]);
        ea[ia] = string_energy(occ_a[ia]);
    }
    for (std::size_t ib = 0; ib < nb; ++ib) {
        occ_b[ib] = occupied(basis.beta_strings[ib]);
        eb[ib] = string_energy(occ_b[ib]);
    }

    Vector d(basis.n_det(), 0.0);
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib) {
            double cross = 0.0;
            for (int i : occ_a[ia])
                for (int j : occ_b[ib]) cross += prob.eri_at(i, i, j, j);
            d[basis.index(ia, ib)] = prob.e_core + ea[ia] + eb[ib] + cross;
        }
    return d;
}

/// Matrix-free determinant CI Hamiltonian.
class FciOperator final : public SymmetricOperator {
public:
    FciOperator(FciProblem prob, DeterminantBasis basis)
        : SymmetricOperator(basis.n_det()),
          prob_(std::move(prob)),
          basis_(std::move(basis)),
          h2e_(absorb_h1(prob_, basis_.n_alpha + basis_.n_beta)),
          links_a_(build_link_table(basis_.alpha_strings, prob_.norb)),
          links_b_(build_link_table(basis_.beta_strings, prob_.norb)) {
        if (basis_.n_alpha + basis_.n_beta == 0)
            throw std::invalid_argument("FciOperator: empty electron sector");
        diag_ = hamiltonian_diagonal(prob_, basis_);
    }

    const FciProblem& problem() const { return prob_; }
    const DeterminantBasis& basis() const { return basis_; }

private:
    void apply_impl(const Vector& x, Vector& y) const override {
        y = contract_sigma(prob_, basis_, h2e_, links_a_, links_b_, x);
    }

    FciProblem prob_;
    DeterminantBasis basis_;
    std::vector<double> h2e_;
    LinkTable links_a_, links_b_;
};

/// H x for a single vector without building an operator.
inline Vector sigma_apply(const FciProblem& prob, const DeterminantBasis& basis, const Vector& x) {
    const auto h2e = absorb_h1(prob, basis.n_alpha + basis.n_beta);
    const auto la = build_link_table(basis.alpha_strings, prob.norb);
    const auto lb = build_link_table(basis.beta_strings, prob.norb);
    return contract_sigma(prob, basis, h2e, la, lb, x);
}

constexpr std::uint64_t kDefaultDeterminantGuard = 5'000'000;

/**
 * Operator handle over the sector implied by (nelec, ms2). Refuses very large
 * determinant spaces unless the caller overrides the guard; the sigma
 * workspace grows as norb^2 * n_det.
 */
inline std::shared_ptr<FciOperator> as_operator(const FciProblem& prob, const DeterminantBasis& basis,
                                                std::uint64_t max_determinants = kDefaultDeterminantGuard) {
    const std::uint64_t n = determinant_count(basis.norb, basis.n_alpha, basis.n_beta);
    if (n > max_determinants)
        throw std::runtime_error("as_operator: sector holds " + std::to_string(n) +
                                 " determinants, above the guard of " + std::to_string(max_determinants) +
                                 " (pass a larger bound to override)");
    return std::make_shared<FciOperator>(prob, basis);
}

inline std::shared_ptr<FciOperator> as_operator(const FciProblem& prob, int ms2_override,
                                                std::uint64_t max_determinants = kDefaultDeterminantGuard) {
    FciProblem p = prob;
    p.ms2 = ms2_override;
    if ((p.nelec + p.ms2) % 2 != 0) throw std::invalid_argument("as_operator: MS2 parity mismatch");
    const DeterminantBasis basis = enumerate_basis(p.norb, p.n_alpha(), p.n_beta());
    return as_operator(p, basis, max_determinants);
}

}  // namespace sbci::fci
