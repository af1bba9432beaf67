#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sbci/config.hpp"
#include "sbci/operator.hpp"
#include "sbci/precond.hpp"
#include "sbci/sbci1.hpp"
#include "sbci/small_eig.hpp"
#include "sbci/trace.hpp"

namespace sbci {

struct DavidsonConfig {
    int nroots = 1;
    int max_space = 0;  // 0 = 12 * nroots
    double eps0 = 1e-10;
    double r0 = 1e-5;
    double lindep = 1e-14;
    long max_iter = 400;

    int effective_max_space() const {
        const int m = max_space > 0 ? max_space : 12 * nroots;
        return std::max(m, 2 * nroots);
    }

    void validate() const {
        if (nroots < 1) throw std::invalid_argument("DavidsonConfig: nroots must be >= 1");
        if (!(eps0 > 0.0) || !(r0 > 0.0) || !(lindep > 0.0))
            throw std::invalid_argument("DavidsonConfig: tolerances must be > 0");
        if (max_space != 0 && max_space < 2 * nroots)
            throw std::invalid_argument("DavidsonConfig: max_space must be >= 2*nroots");
    }
};

struct DavidsonResult {
    std::vector<ConvergedEigenpair> pairs;
    RunSummary summary;
};

/**
 * Block Davidson with the same (D - E0)^{-1} preconditioner as the SBCI
 * solvers (shift tracking the newest ground Ritz value), so cross-method
 * comparisons isolate the update rule. Expands with the preconditioned
 * residuals of every unconverged root, collapses to the current Ritz vectors
 * at max_space.
 */
inline DavidsonResult davidson_solve(const SymmetricOperator& op, GroundShiftPreconditioner& pre,
                                     const DavidsonConfig& dcfg, TraceSink* sink = nullptr,
                                     const std::function<void(const std::vector<Vector>&)>& on_expand = {}) {
    dcfg.validate();
    const int nroots = dcfg.nroots;
    const int max_space = dcfg.effective_max_space();
    if (static_cast<std::size_t>(nroots) > op.dim())
        throw std::invalid_argument("davidson_solve: nroots exceeds dimension");

    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t applies_before = op.apply_count();

    std::vector<Seed> guesses = init_guess_from_diagonal(op, nroots, dcfg.lindep);
    std::vector<Vector> basis, images;
    for (auto& g : guesses) {
        basis.push_back(std::move(g.x));
        images.push_back(std::move(g.hx));
    }
    if (on_expand) on_expand(basis);

    std::vector<double> prev_theta(static_cast<std::size_t>(nroots));
    for (int k = 0; k < nroots; ++k) prev_theta[static_cast<std::size_t>(k)] = guesses[static_cast<std::size_t>(k)].energy;

    std::vector<double> theta(static_cast<std::size_t>(nroots), 0.0);
    std::vector<double> res_norms(static_cast<std::size_t>(nroots), std::numeric_limits<double>::infinity());
    std::vector<char> converged(static_cast<std::size_t>(nroots), 0);
    int peak_space = static_cast<int>(basis.size());

    for (long iter = 0; iter < dcfg.max_iter; ++iter) {
        const int m = static_cast<int>(basis.size());
        SmallMatrix proj(m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                const double v = 0.5 * (dot(basis[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)]) +
                                        dot(basis[static_cast<std::size_t>(j)], images[static_cast<std::size_t>(i)]));
                proj(i, j) = proj(j, i) = v;
            }
        const SmallEigResult eig = jacobi_symmetric_eig(proj);

        std::vector<Vector> ritz(static_cast<std::size_t>(nroots)), ritz_im(static_cast<std::size_t>(nroots));
        for (int k = 0; k < nroots; ++k) {
            theta[static_cast<std::size_t>(k)] = eig.eigenvalues[static_cast<std::size_t>(k)];
            ritz[static_cast<std::size_t>(k)] = zeros(op.dim());
            ritz_im[static_cast<std::size_t>(k)] = zeros(op.dim());
            for (int i = 0; i < m; ++i) {
                axpy(eig.eigenvectors(i, k), basis[static_cast<std::size_t>(i)], ritz[static_cast<std::size_t>(k)]);
                axpy(eig.eigenvectors(i, k), images[static_cast<std::size_t>(i)], ritz_im[static_cast<std::size_t>(k)]);
            }
        }

        std::vector<Vector> residuals(static_cast<std::size_t>(nroots));
        bool all_done = true;
        for (int k = 0; k < nroots; ++k) {
            residuals[static_cast<std::size_t>(k)] =
                combine(1.0, ritz_im[static_cast<std::size_t>(k)], -theta[static_cast<std::size_t>(k)], ritz[static_cast<std::size_t>(k)]);
            res_norms[static_cast<std::size_t>(k)] = norm(residuals[static_cast<std::size_t>(k)]);
            const double dE = std::abs(theta[static_cast<std::size_t>(k)] - prev_theta[static_cast<std::size_t>(k)]);
            converged[static_cast<std::size_t>(k)] = dE < dcfg.eps0 && res_norms[static_cast<std::size_t>(k)] < dcfg.r0;
            if (!converged[static_cast<std::size_t>(k)]) all_done = false;

            if (sink) {
                TraceRecord rec;
                rec.method = "davidson";
                rec.state = k;
                rec.t = static_cast<int>(iter);
                rec.energy = theta[static_cast<std::size_t>(k)];
                rec.dE = dE;
                rec.res_norm = res_norms[static_cast<std::size_t>(k)];
                rec.x_norm = 1.0;
                rec.matvecs = op.apply_count();
                sink->record(rec);
            }
        }
        pre.update_shift(theta[0]);  // newest ground-state Rayleigh quotient
        prev_theta = theta;

        if (all_done) {
            DavidsonResult out;
            out.summary.method = "davidson";
            for (int k = 0; k < nroots; ++k) {
                ConvergedEigenpair p;
                p.state = k;
                p.energy = theta[static_cast<std::size_t>(k)];
                p.vector = ritz[static_cast<std::size_t>(k)];
                normalize(p.vector);
                p.iterations = static_cast<int>(iter) + 1;
                p.final_residual = res_norms[static_cast<std::size_t>(k)];
                out.pairs.push_back(std::move(p));

                StateSummary ss;
                ss.state = k;
                ss.energy = theta[static_cast<std::size_t>(k)];
                ss.iterations = static_cast<int>(iter) + 1;
                ss.final_residual = res_norms[static_cast<std::size_t>(k)];
                out.summary.states.push_back(ss);
            }
            out.summary.total_iterations = iter + 1;
            out.summary.matvecs = op.apply_count() - applies_before;
            out.summary.peak_vectors = 2 * peak_space + nroots;
            out.summary.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return out;
        }

        int pending = 0;
        for (int k = 0; k < nroots; ++k)
            if (!converged[static_cast<std::size_t>(k)]) ++pending;

        if (m + pending > max_space) {
            // Collapse to the current Ritz vectors; spans the same roots, so
            // the next pass reproduces theta exactly.
            std::vector<Vector> nb, ni;
            for (int k = 0; k < nroots; ++k) {
                Vector v = ritz[static_cast<std::size_t>(k)];
                Vector w = ritz_im[static_cast<std::size_t>(k)];
                for (const auto& b : nb) {
                    const double o = dot(b, v);  // guard against roundoff in the Ritz rotation
                    if (o != 0.0) axpy(-o, b, v);
                }
                const double nm = norm(v);
                if (nm < dcfg.lindep) continue;
                scale(v, 1.0 / nm);
                scale(w, 1.0 / nm);
                nb.push_back(std::move(v));
                ni.push_back(std::move(w));
            }
            basis = std::move(nb);
            images = std::move(ni);
        }

        int added = 0;
        for (int k = 0; k < nroots; ++k) {
            if (converged[static_cast<std::size_t>(k)]) continue;
            Vector t = pre.apply(residuals[static_cast<std::size_t>(k)]);
            const double before = norm(t);  // can be legitimately tiny: |r| / (D - E0)
            if (before == 0.0) continue;
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) axpy(-dot(b, t), b, t);
            const double nm = norm(t);
            if (nm < std::sqrt(dcfg.lindep) * before) continue;  // direction already represented
            scale(t, 1.0 / nm);
            images.push_back(op.apply(t));
            basis.push_back(std::move(t));
            ++added;
        }
        peak_space = std::max(peak_space, static_cast<int>(basis.size()));
        if (on_expand) on_expand(basis);
        if (added == 0 && !all_done) {
            // No usable expansion direction left; accept only if every root
            // is at least residual-converged, otherwise report failure.
            bool residual_ok = true;
            for (int k = 0; k < nroots; ++k)
                if (res_norms[static_cast<std::size_t>(k)] >= dcfg.r0) residual_ok = false;
            if (!residual_ok) break;
            for (int k = 0; k < nroots; ++k) converged[static_cast<std::size_t>(k)] = 1;
            prev_theta = theta;  // dE will read as 0 next pass
        }
    }

    std::string detail = "davidson did not converge; residuals:";
    for (int k = 0; k < nroots; ++k) detail += " " + std::to_string(res_norms[static_cast<std::size_t>(k)]);
    throw NonConvergenceError(-1, theta.empty() ? 0.0 : theta[0],
                              *std::max_element(res_norms.begin(), res_norms.end()));
}

/// Shares an externally managed preconditioner, with thresholds taken from
/// the common solver config.
inline DavidsonResult davidson_solve(const SymmetricOperator& op, GroundShiftPreconditioner& pre,
                                     int nroots, const SolverConfig& cfg, TraceSink* sink = nullptr) {
    DavidsonConfig dcfg;
    dcfg.nroots = nroots;
    dcfg.eps0 = cfg.eps0;
    dcfg.r0 = cfg.r0;
    dcfg.lindep = cfg.lindep;
    return davidson_solve(op, pre, dcfg, sink);
}

/// Convenience entry mirroring the n-state SBCI drivers.
inline DavidsonResult davidson_solve(const SymmetricOperator& op, int nroots, const SolverConfig& cfg,
                                     TraceSink* sink = nullptr) {
    DavidsonConfig dcfg;
    dcfg.nroots = nroots;
    dcfg.eps0 = cfg.eps0;
    dcfg.r0 = cfg.r0;
    dcfg.lindep = cfg.lindep;
    // Starting shift is irrelevant: it is replaced by the first Ritz value
    // before the preconditioner is ever applied.
    const Vector& d = op.diagonal();
    GroundShiftPreconditioner pre(d, *std::min_element(d.begin(), d.end()), cfg.clamp_delta);
    return davidson_solve(op, pre, dcfg, sink);
}

}  // namespace sbci
