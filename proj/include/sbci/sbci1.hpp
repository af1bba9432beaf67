#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "sbci/config.hpp"
#include "sbci/operator.hpp"
#include "sbci/ortho.hpp"
#include "sbci/precond.hpp"
#include "sbci/small_eig.hpp"
#include "sbci/trace.hpp"

namespace sbci {

/// Trial vector with its cached operator image and Rayleigh quotient.
/// Carrying the image is what keeps the one-matvec-per-iteration budget.
struct Seed {
    Vector x;
    Vector hx;
    double energy = 0.0;
};

struct ConvergedEigenpair {
    int state = 0;
    double energy = 0.0;
    Vector vector;  // unit norm
    int iterations = 0;
    int restarts = 0;
    double final_residual = 0.0;
};

constexpr int kSbci1DefaultMaxCycle = 20;
constexpr int kSbci2DefaultMaxCycle = 10;

/**
 * Diagonal-seeded initial guesses: unit vectors at the n smallest diagonal
 * entries (ties broken by ascending index), Rayleigh-Ritz rotated within
 * that span. Costs exactly n operator applications and returns the rotated
 * vectors with images and subspace eigenvalues, ascending.
 */
inline std::vector<Seed> init_guess_from_diagonal(const SymmetricOperator& op, int n,
                                                  double lindep = 1e-14) {
    if (n < 1 || static_cast<std::size_t>(n) > op.dim())
        throw std::invalid_argument("init_guess_from_diagonal: need 1 <= n <= dim");

    const Vector& d = op.diagonal();
    std::vector<std::size_t> order(op.dim());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    // Gram-Schmidt independence filter; vacuous for distinct unit vectors but
    // kept for the general contract.
    std::vector<Vector> basis, images;
    for (int k = 0; k < n; ++k) {
        Vector cand = unit_vector(op.dim(), order[static_cast<std::size_t>(k)]);
        for (const auto& b : basis) axpy(-dot(b, cand), b, cand);
        const double nm = norm(cand);
        if (nm < lindep) continue;
        scale(cand, 1.0 / nm);
        images.push_back(op.apply(cand));
        basis.push_back(std::move(cand));
    }

    const int m = static_cast<int>(basis.size());
    SmallMatrix proj(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) proj(i, j) = dot(basis[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)]);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double s = 0.5 * (proj(i, j) + proj(j, i));
            proj(i, j) = proj(j, i) = s;
        }
    const SmallEigResult eig = jacobi_symmetric_eig(proj);

    std::vector<Seed> seeds(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        Seed s;
        s.x = zeros(op.dim());
        s.hx = zeros(op.dim());
        for (int i = 0; i < m; ++i) {
            axpy(eig.eigenvectors(i, a), basis[static_cast<std::size_t>(i)], s.x);
            axpy(eig.eigenvectors(i, a), images[static_cast<std::size_t>(i)], s.hx);
        }
        s.energy = eig.eigenvalues[static_cast<std::size_t>(a)];
        seeds[static_cast<std::size_t>(a)] = std::move(s);
    }
    return seeds;
}

/// Dynamical variables of a single-state solve.
struct Sbci1State {
    int alpha = 0;
    int t = 0;  // step index within the current restart segment
    Vector x, hx;    // x_t and X_t = H x_t
    Vector y, hy;    // y_t and Y_t = H y_t
    Vector zres;     // z'_t
    double energy = 0.0;  // E_t
    double b_prev = 1.0, c_prev = 0.0, k_prev = 1.0;
    int restart_count = 0;
    long total_iterations = 0;
};

/// Restart predicate, checked in the order stall / norm / blow-up / cycle cap.
/// alpha matters: the stall test only applies to excited states here.
inline std::optional<RestartReason> check_restart_sbci1(int alpha, double b, double dE, double x_norm,
                                                        double dz, int t, const SolverConfig& cfg,
                                                        int max_cycle) {
    if (alpha > 0 && std::abs(b) < cfg.b_th && dE < cfg.eps1) return RestartReason::StallSmallB;
    if (x_norm < cfg.x_th1 || x_norm > cfg.x_th2) return RestartReason::NormOutOfRange;
    if (dz > cfg.r1 && t > 0) return RestartReason::ResidualBlowup;
    if (t + 1 >= max_cycle) return RestartReason::MaxCycle;
    return std::nullopt;
}

inline std::optional<RestartReason> check_restart_sbci1(const Sbci1State& st, const SolverConfig& cfg,
                                                        double dE, double dz) {
    return check_restart_sbci1(st.alpha, st.b_prev, dE, norm(st.x), dz, st.t, cfg,
                               cfg.effective_max_cycle(kSbci1DefaultMaxCycle));
}

namespace detail {

struct Sbci1StepData {
    StepOutcome outcome;
    double dE = 0.0;
    double dz = 0.0;
    std::optional<Seed> second_ritz;  // next-state seed captured at this step
    bool applied_operator = false;
};

inline double kinetic_scalar(const Vector& y, const GroundShiftPreconditioner& pre) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * y[i] * (pre.diagonal[i] - pre.shift);
    return s;
}

/**
 * One SBCI1 update. t = 0 runs the two-vector {x, z} form (y is zero by
 * construction); t >= 1 runs the three-vector form, falling back to the
 * two-vector form when Gram-Schmidt drops y. Exactly one operator
 * application on every path that does not converge by a vanished residual.
 */
inline Sbci1StepData sbci1_step_impl(Sbci1State& st, const SymmetricOperator& op,
                                     const GroundShiftPreconditioner& pre, const DeflationSet& defl,
                                     const SolverConfig& cfg, int max_cycle) {
    Sbci1StepData out;

    Vector z = precondition_and_deflate(st.zres, pre, defl);
    if (norm(z) < cfg.lindep * norm(st.x)) {
        // Deflated, preconditioned residual vanished: nothing to move along.
        st.energy = rayleigh_quotient(st.x, st.hx);
        out.outcome = StepOutcome::converged();
        out.dE = 0.0;
        out.dz = norm(st.zres);
        return out;
    }

    const double nxx = dot(st.x, st.x);
    const double nxz = dot(st.x, z);
    const double nzz = dot(z, z);
    bool use_three = st.t >= 1;
    GramSchmidtCoeffs gs;
    if (use_three) {
        const double nxy = dot(st.x, st.y);
        const double nyy = dot(st.y, st.y);
        const double nyz = dot(st.y, z);
        gs = gram_schmidt_from_dots(nxx, nxy, nyy, nxz, nyz, nzz, true, cfg.lindep);
        if (gs.y_degenerate) use_three = false;  // momentum brought nothing new; drop to the t=0 form
        else if (gs.z_degenerate) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
    }
    if (!use_three) {
        gs = gram_schmidt_from_dots(nxx, 0.0, 0.0, nxz, 0.0, nzz, false, cfg.lindep);
        if (gs.z_degenerate) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
    }

    const Vector hz = op.apply(z);
    out.applied_operator = true;

    // Materialize the orthonormal basis and its images before projecting;
    // forming the subspace matrix from the Gram-Schmidt scale factors alone
    // squares their amplification and visibly pollutes the Ritz values once
    // the basis gets nearly dependent close to convergence.
    std::vector<Vector> bas, bas_im;
    {
        Vector xb = scaled(st.x, gs.A_x);
        Vector xb_im = scaled(st.hx, gs.A_x);
        bas.push_back(std::move(xb));
        bas_im.push_back(std::move(xb_im));
        if (use_three) {
            Vector yb = combine(gs.B_x, st.x, gs.B_y, st.y);
            Vector yb_im = combine(gs.B_x, st.hx, gs.B_y, st.hy);
            bas.push_back(std::move(yb));
            bas_im.push_back(std::move(yb_im));
        }
        Vector zb = combine(gs.C_x, st.x, gs.C_z, z);
        Vector zb_im = combine(gs.C_x, st.hx, gs.C_z, hz);
        if (use_three) {
            axpy(gs.C_y, st.y, zb);
            axpy(gs.C_y, st.hy, zb_im);
        }
        bas.push_back(std::move(zb));
        bas_im.push_back(std::move(zb_im));
    }
    const int m = static_cast<int>(bas.size());
    SmallMatrix v(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            v(i, j) = v(j, i) = 0.5 * (dot(bas[static_cast<std::size_t>(i)], bas_im[static_cast<std::size_t>(j)]) +
                                       dot(bas[static_cast<std::size_t>(j)], bas_im[static_cast<std::size_t>(i)]));
    const SmallEigResult eig = jacobi_symmetric_eig(v);

    const double vx = eig.eigenvectors(0, 0);
    const double vy = use_three ? eig.eigenvectors(1, 0) : 0.0;
    const double vz = eig.eigenvectors(m - 1, 0);
    const double wx = eig.eigenvectors(0, 1);
    const double wy = use_three ? eig.eigenvectors(1, 1) : 0.0;
    const double wz = eig.eigenvectors(m - 1, 1);
    const double e_new = eig.eigenvalues[0];

    const double k_den = vx * gs.A_x + vy * gs.B_x + vz * gs.C_x;
    if (std::abs(k_den) < 1e-14) {
        out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
        return out;
    }
    const double k = 1.0 / k_den;

    double b, c;
    Vector y_new, hy_new;
    if (use_three) {
        const double b_den = vy * gs.B_y + vz * gs.C_y;
        if (std::abs(b_den) < 1e-14) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
        b = k * b_den;
        c = -vz * gs.C_z / b_den;
        y_new = combine(1.0, st.y, -c, z);
        hy_new = combine(1.0, st.hy, -c, hz);
    } else {
        b = 1.0;
        c = -k * vz * gs.C_z;
        y_new = scaled(z, -c);
        hy_new = scaled(hz, -c);
    }
    Vector x_new = combine(1.0, st.x, b, y_new);
    // Catastrophic cancellation guard: an update assembled from ingredients
    // vastly larger than its result wipes that many digits off the cached
    // images. Restart from the current iterate instead of committing it.
    if (norm(st.x) + std::abs(b) * norm(y_new) > 1e6 * std::max(norm(x_new), 1e-300)) {
        out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
        return out;
    }
    st.y = std::move(y_new);
    st.hy = std::move(hy_new);
    st.x = std::move(x_new);
    st.hx = combine(1.0, st.hx, b, st.hy);
    st.zres = combine(1.0 / k, st.hx, -e_new / k, st.x);

    out.dE = std::abs(e_new - st.energy);
    out.dz = norm(st.zres);
    // Inexact lower states leave their own residuals inside z'; the deflated
    // part is all the dynamics can still reduce, so the convergence test may
    // fall back to it once the raw norm hits that inherited floor.
    double dz_deflated = out.dz;
    if (!defl.empty()) {
        Vector zd = st.zres;
        defl.project_out(zd);
        dz_deflated = norm(zd);
    }
    st.energy = e_new;
    st.b_prev = b;
    st.c_prev = c;
    st.k_prev = k;

    // Second-lowest Ritz vector, reconstructed in original coordinates; the
    // excited-state seed once this state converges.
    {
        Seed s;
        const double sx = wx * gs.A_x + wy * gs.B_x + wz * gs.C_x;
        const double sy = wy * gs.B_y + wz * gs.C_y;
        const double sz = wz * gs.C_z;
        s.x = scaled(st.x, 0.0);
        s.hx = scaled(st.x, 0.0);
        // st.x/st.y already moved to t+1; rebuild from the pre-update vectors:
        // x_t = x_{t+1} - b y_{t+1}, y_t = y_{t+1} + c z. Cheaper to assemble
        // directly from the quantities still at hand.
        Vector x_t = combine(1.0, st.x, -b, st.y);
        Vector hx_t = combine(1.0, st.hx, -b, st.hy);
        Vector y_t = combine(1.0, st.y, c, z);
        Vector hy_t = combine(1.0, st.hy, c, hz);
        axpy(sx, x_t, s.x);
        axpy(sx, hx_t, s.hx);
        if (use_three) {
            axpy(sy, y_t, s.x);
            axpy(sy, hy_t, s.hx);
        }
        axpy(sz, z, s.x);
        axpy(sz, hz, s.hx);
        s.energy = eig.eigenvalues[1];
        out.second_ritz = std::move(s);
    }

    if (out.dE < cfg.eps0 && std::min(out.dz, dz_deflated) < cfg.r0) {
        out.outcome = StepOutcome::converged();
        return out;
    }
    if (auto reason = check_restart_sbci1(st.alpha, b, out.dE, norm(st.x), out.dz, st.t, cfg, max_cycle)) {
        out.outcome = StepOutcome::restart(*reason);
        return out;
    }
    out.outcome = StepOutcome::cont();
    return out;
}

}  // namespace detail

/// First update step (t = 0, y = 0). Kept as a named entry point; the
/// general step dispatches to the same implementation.
inline StepOutcome sbci1_first_step(Sbci1State& st, const SymmetricOperator& op,
                                    const GroundShiftPreconditioner& pre, const DeflationSet& defl,
                                    const SolverConfig& cfg) {
    if (st.t != 0) throw std::invalid_argument("sbci1_first_step: t must be 0");
    return detail::sbci1_step_impl(st, op, pre, defl, cfg, cfg.effective_max_cycle(kSbci1DefaultMaxCycle))
        .outcome;
}

inline StepOutcome sbci1_step(Sbci1State& st, const SymmetricOperator& op,
                              const GroundShiftPreconditioner& pre, const DeflationSet& defl,
                              const SolverConfig& cfg) {
    return detail::sbci1_step_impl(st, op, pre, defl, cfg, cfg.effective_max_cycle(kSbci1DefaultMaxCycle))
        .outcome;
}

struct Sbci1Result {
    ConvergedEigenpair pair;
    Vector converged_image;         // H x_c from the cache, same normalization as pair.vector
    std::optional<Seed> next_seed;  // second-lowest Ritz vector at convergence
    int hx_refreshes = 0;
};

/**
 * Full single-state solve: deflation-projected entry, first/general steps,
 * restarts per the threshold rules, trace emission. track_ground_shift makes
 * the preconditioner follow E_t (ground-state solves only); excited solves
 * keep the shift frozen at the converged ground value.
 */
inline Sbci1Result solve_state_sbci1(const SymmetricOperator& op, GroundShiftPreconditioner& pre,
                                     const DeflationSet& defl, Seed seed, const SolverConfig& cfg,
                                     int alpha = 0, TraceSink* sink = nullptr,
                                     bool track_ground_shift = true) {
    cfg.validate();
    const int max_cycle = cfg.effective_max_cycle(kSbci1DefaultMaxCycle);

    if (seed.x.size() != op.dim()) throw std::invalid_argument("solve_state_sbci1: seed dimension mismatch");
    defl.project_out_pair(seed.x, seed.hx);
    const double seed_norm = norm(seed.x);
    if (seed_norm < cfg.lindep) throw std::invalid_argument("solve_state_sbci1: seed collapsed under deflation");
    scale(seed.x, 1.0 / seed_norm);
    scale(seed.hx, 1.0 / seed_norm);

    Sbci1State st;
    st.alpha = alpha;
    st.x = std::move(seed.x);
    st.hx = std::move(seed.hx);
    st.y = zeros(op.dim());
    st.hy = zeros(op.dim());
    st.energy = dot(st.x, st.hx);  // unit x
    st.zres = combine(1.0, st.hx, -st.energy, st.x);

    Sbci1Result result;
    if (track_ground_shift) pre.update_shift(st.energy);

    // An already-converged seed (deflated, preconditioned residual below
    // lindep) needs no update step at all: zero iterations, zero applies.
    if (norm(precondition_and_deflate(st.zres, pre, defl)) < cfg.lindep) {
        result.pair.state = alpha;
        result.pair.energy = st.energy;
        result.pair.vector = st.x;
        result.pair.final_residual = norm(st.zres);
        result.converged_image = st.hx;
        return result;
    }

    while (st.total_iterations < cfg.t_max) {
        detail::Sbci1StepData step =
            detail::sbci1_step_impl(st, op, pre, defl, cfg, max_cycle);
        ++st.total_iterations;

        if (sink) {
            TraceRecord rec;
            rec.method = "sbci1";
            rec.state = alpha;
            rec.t = st.t;
            rec.energy = st.energy;
            rec.dE = step.dE;
            rec.res_norm = step.dz;
            rec.x_norm = norm(st.x);
            rec.kinetic = detail::kinetic_scalar(st.y, pre);
            rec.matvecs = op.apply_count();
            rec.b = st.b_prev;
            rec.c = st.c_prev;
            if (step.outcome.kind == StepOutcome::Kind::Restart)
                rec.restart_reason = to_string(step.outcome.reason);
            sink->record(rec);
        }
        if (track_ground_shift) pre.update_shift(st.energy);

        switch (step.outcome.kind) {
            case StepOutcome::Kind::Converged: {
                ConvergedEigenpair pair;
                pair.state = alpha;
                // Store the Rayleigh quotient of the accepted vector (what
                // E_{t+1} is in exact arithmetic); the cached image makes it
                // free and it avoids the subspace value's roundoff floor.
                pair.energy = rayleigh_quotient(st.x, st.hx);
                pair.vector = st.x;
                const double nm = normalize(pair.vector);
                // A converged vector drifting into the deflated span means the
                // run broke down numerically; fail it rather than return junk.
                for (std::size_t i = 0; i < defl.size(); ++i)
                    if (std::abs(dot(defl.vector(i), pair.vector)) > 1e-9)
                        throw NonConvergenceError(alpha, pair.energy, step.dz);
                pair.iterations = static_cast<int>(st.total_iterations);
                pair.restarts = st.restart_count;
                pair.final_residual = step.dz;
                result.pair = std::move(pair);
                result.converged_image = scaled(st.hx, nm > 0.0 ? 1.0 / nm : 1.0);
                result.next_seed = std::move(step.second_ritz);
                return result;
            }
            case StepOutcome::Kind::Restart: {
                double nm = norm(st.x);
                if (nm < cfg.lindep) throw NonConvergenceError(alpha, st.energy, step.dz);
                scale(st.x, 1.0 / nm);
                scale(st.hx, 1.0 / nm);
                if (!defl.empty()) {
                    // Scrub accumulated leakage into the deflated span; exact
                    // with the stored images and a no-op for a clean iterate.
                    defl.project_out_pair(st.x, st.hx);
                    nm = norm(st.x);
                    if (nm < cfg.lindep) throw NonConvergenceError(alpha, st.energy, step.dz);
                    scale(st.x, 1.0 / nm);
                    scale(st.hx, 1.0 / nm);
                    st.energy = dot(st.x, st.hx);
                }
                st.y = zeros(op.dim());
                st.hy = zeros(op.dim());
                ++st.restart_count;
                if (cfg.hx_refresh_restarts > 0 && st.restart_count % cfg.hx_refresh_restarts == 0) {
                    st.hx = op.apply(st.x);  // bounds recombination drift; counted like any apply
                    ++result.hx_refreshes;
                }
                st.zres = combine(1.0, st.hx, -st.energy, st.x);
                st.t = 0;
                break;
            }
            case StepOutcome::Kind::Continue:
                ++st.t;
                break;
        }
    }
    throw NonConvergenceError(alpha, st.energy, norm(st.zres));
}

/// Plain-vector entry point: raw vector plus the caller's energy estimate.
/// Costs one extra application for the image; the Rayleigh quotient is then
/// re-derived at entry, so E0 only matters as a starting label.
inline Sbci1Result solve_state_sbci1(const SymmetricOperator& op, GroundShiftPreconditioner& pre,
                                     const DeflationSet& defl, const Vector& x0, double E0,
                                     const SolverConfig& cfg, int alpha = 0, TraceSink* sink = nullptr) {
    if (norm(x0) == 0.0) throw std::invalid_argument("solve_state_sbci1: x0 must be nonzero");
    Seed s;
    s.x = x0;
    s.hx = op.apply(x0);
    s.energy = E0;
    return solve_state_sbci1(op, pre, defl, std::move(s), cfg, alpha, sink, alpha == 0);
}

struct MultiStateResult {
    std::vector<ConvergedEigenpair> pairs;
    RunSummary summary;
};

namespace detail {

/// Deflation-projects every candidate and keeps the one with the lowest
/// Rayleigh quotient. A converged subspace's second Ritz vector is usually
/// the best guess for the next state, but on small instances it can sit in a
/// higher eigenvector's basin; the variational pick costs nothing (images
/// are cached) and keeps the ladder complete.
inline Seed select_seed(std::vector<Seed> candidates, const DeflationSet& defl, double lindep) {
    std::optional<Seed> best;
    for (auto& cand : candidates) {
        Vector x = cand.x;
        Vector hx = cand.hx;
        defl.project_out_pair(x, hx);
        const double nm = norm(x);
        if (nm < std::max(lindep, 1e-8)) continue;
        Seed s;
        scale(x, 1.0 / nm);
        scale(hx, 1.0 / nm);
        s.energy = dot(x, hx);
        s.x = std::move(x);
        s.hx = std::move(hx);
        if (!best || s.energy < best->energy) best = std::move(s);
    }
    if (!best) throw std::runtime_error("all seed candidates collapsed under deflation");
    return std::move(*best);
}

}  // namespace detail

/// Sequential lowest-n driver: state 0 from the diagonal guess, each further
/// state seeded by the second-lowest Ritz vector captured at the previous
/// convergence (diagonal-guess vectors as fallback).
inline MultiStateResult solve_n_states_sbci1(const SymmetricOperator& op, int n, const SolverConfig& cfg,
                                             TraceSink* sink = nullptr) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("solve_n_states_sbci1: n must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t applies_before = op.apply_count();

    std::vector<Seed> guesses = init_guess_from_diagonal(op, n, cfg.lindep);
    GroundShiftPreconditioner pre(op.diagonal(), guesses.front().energy, cfg.clamp_delta);
    DeflationSet defl;

    MultiStateResult out;
    out.summary.method = "sbci1";
    std::optional<Seed> carried;

    for (int alpha = 0; alpha < n; ++alpha) {
        std::vector<Seed> candidates;
        if (carried) candidates.push_back(std::move(*carried));
        for (int b = alpha; b < static_cast<int>(guesses.size()); ++b) candidates.push_back(guesses[static_cast<std::size_t>(b)]);
        for (int b = 0; b < alpha && b < static_cast<int>(guesses.size()); ++b) candidates.push_back(guesses[static_cast<std::size_t>(b)]);
        Seed seed = detail::select_seed(std::move(candidates), defl, cfg.lindep);

        Sbci1Result res = solve_state_sbci1(op, pre, defl, std::move(seed), cfg, alpha, sink,
                                            /*track_ground_shift=*/alpha == 0);
        if (alpha == 0) pre.update_shift(res.pair.energy);  // freeze at E_c^0 from here on

        StateSummary ss;
        ss.state = alpha;
        ss.energy = res.pair.energy;
        ss.iterations = res.pair.iterations;
        ss.restarts = res.pair.restarts;
        ss.final_residual = res.pair.final_residual;
        out.summary.states.push_back(ss);
        out.summary.total_iterations += res.pair.iterations;
        out.summary.total_restarts += res.pair.restarts;
        out.summary.hx_refreshes += res.hx_refreshes;

        defl.add_with_image(res.pair.vector, std::move(res.converged_image), res.pair.energy);
        out.pairs.push_back(std::move(res.pair));
        carried = std::move(res.next_seed);
    }

    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const ConvergedEigenpair& a, const ConvergedEigenpair& b) { return a.energy < b.energy; });
    std::sort(out.summary.states.begin(), out.summary.states.end(),
              [](const StateSummary& a, const StateSummary& b) { return a.energy < b.energy; });

    out.summary.matvecs = op.apply_count() - applies_before;
    out.summary.peak_vectors = 7 + static_cast<int>(defl.size());  // x,Hx,y,Hy,z',z,Hz + stored states
    out.summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace sbci
