#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "sbci/config.hpp"
#include "sbci/operator.hpp"
#include "sbci/ortho.hpp"
#include "sbci/precond.hpp"
#include "sbci/sbci1.hpp"
#include "sbci/small_eig.hpp"
#include "sbci/trace.hpp"

namespace sbci {

/// The three 2x2 parameter matrices of the pair update. A has zero diagonal;
/// d was eliminated analytically and never appears.
struct PairCoefficients {
    double a_ab = 0.0, a_ba = 0.0;
    double b_aa = 1.0, b_ab = 0.0, b_ba = 0.0, b_bb = 1.0;
    double c_aa = 0.0, c_ab = 0.0, c_ba = 0.0, c_bb = 0.0;
    double k0 = 1.0, k1 = 1.0;
};

/// Dynamical variables for the pair (alpha, alpha+1).
struct Sbci2State {
    int alpha = 0;
    int t = 0;
    Vector xa, hxa, xb, hxb;
    Vector ya, hya, yb, hyb;
    Vector zra, zrb;  // z'
    double ea = 0.0, eb = 0.0;
    PairCoefficients coeffs;
    int restart_count = 0;
    long total_iterations = 0;
};

/// Pair restart predicate (note: the stall test has no alpha > 0 guard,
/// unlike the single-state rule).
inline std::optional<RestartReason> check_restart_sbci2(double b_aa, double b_bb, double dE,
                                                        double xa_norm, double xb_norm, double dz,
                                                        int t, const SolverConfig& cfg, int max_cycle) {
    if ((std::abs(b_aa) < cfg.b_th || std::abs(b_bb) < cfg.b_th) && dE < cfg.eps1)
        return RestartReason::StallSmallB;
    if (xa_norm < cfg.x_th1 || xb_norm < cfg.x_th1 || xa_norm > cfg.x_th2 || xb_norm > cfg.x_th2)
        return RestartReason::NormOutOfRange;
    if (dz > cfg.r1 && t > 0) return RestartReason::ResidualBlowup;
    if (t + 1 >= max_cycle) return RestartReason::MaxCycle;
    return std::nullopt;
}

inline std::optional<RestartReason> check_restart_sbci2(const Sbci2State& st, const SolverConfig& cfg,
                                                        double dE, double dz) {
    return check_restart_sbci2(st.coeffs.b_aa, st.coeffs.b_bb, dE, norm(st.xa), norm(st.xb), dz, st.t,
                               cfg, cfg.effective_max_cycle(kSbci2DefaultMaxCycle));
}

/**
 * Builds the pair state: both seeds projected against the converged set
 * (with the eigenvalue-weighted image correction), the upper seed further
 * orthogonalized against the lower one using its exact cached image, both
 * normalized, momenta zeroed, B = I.
 */
inline Sbci2State init_pair(const SymmetricOperator& op, const DeflationSet& defl, Seed lower,
                            Seed upper, double lindep, int alpha = 0) {
    if (lower.x.size() != op.dim() || upper.x.size() != op.dim())
        throw std::invalid_argument("init_pair: seed dimension mismatch");

    defl.project_out_pair(lower.x, lower.hx);
    double nm = norm(lower.x);
    if (nm < lindep) throw std::invalid_argument("init_pair: lower seed collapsed under deflation");
    scale(lower.x, 1.0 / nm);
    scale(lower.hx, 1.0 / nm);

    defl.project_out_pair(upper.x, upper.hx);
    const double ov = dot(lower.x, upper.x);
    axpy(-ov, lower.x, upper.x);
    axpy(-ov, lower.hx, upper.hx);
    nm = norm(upper.x);
    if (nm < lindep) throw std::invalid_argument("init_pair: upper seed collapsed against the lower one");
    scale(upper.x, 1.0 / nm);
    scale(upper.hx, 1.0 / nm);

    Sbci2State st;
    st.alpha = alpha;
    st.ea = dot(lower.x, lower.hx);
    st.eb = dot(upper.x, upper.hx);
    st.xa = std::move(lower.x);
    st.hxa = std::move(lower.hx);
    st.xb = std::move(upper.x);
    st.hxb = std::move(upper.hx);
    st.ya = zeros(op.dim());
    st.hya = zeros(op.dim());
    st.yb = zeros(op.dim());
    st.hyb = zeros(op.dim());
    st.zra = combine(1.0, st.hxa, -st.ea, st.xa);
    st.zrb = combine(1.0, st.hxb, -st.eb, st.xb);
    st.coeffs = PairCoefficients{};
    return st;
}

/// Raw-vector entry point; costs two applications for the seed images.
inline Sbci2State init_pair(const SymmetricOperator& op, const DeflationSet& defl, const Vector& seed_a,
                            double energy_a, const Vector& seed_b, double energy_b, double lindep,
                            int alpha = 0) {
    if (norm(seed_a) == 0.0 || norm(seed_b) == 0.0)
        throw std::invalid_argument("init_pair: seeds must be nonzero");
    Seed lower{seed_a, op.apply(seed_a), energy_a};
    Seed upper{seed_b, op.apply(seed_b), energy_b};
    return init_pair(op, defl, std::move(lower), std::move(upper), lindep, alpha);
}

namespace detail {

struct Sbci2StepData {
    StepOutcome outcome;
    double dE = 0.0;
    double dz = 0.0;
    bool applied_operator = false;
};

/**
 * Coefficient matrix V' = P V expressed over the stored vectors. The
 * orthogonalizer sees unit-normalized copies (zero vectors stay zero) so the
 * 1e-14 overlap cutoff acts relative to unit scale; rescaling P's rows by
 * 1/|v_i| afterwards restores coefficients over the stored vectors.
 */
struct SubspaceSolve {
    bool ok = false;
    int rank = 0;
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> vprime;  // vprime[i][col], stored-vector coefficients
};

inline SubspaceSolve pair_subspace_solve(const std::vector<const Vector*>& vecs,
                                         const std::vector<const Vector*>& images, double lindep) {
    const int m = static_cast<int>(vecs.size());
    std::vector<Vector> w(static_cast<std::size_t>(m));
    std::vector<Vector> wim(static_cast<std::size_t>(m));
    std::vector<double> norms(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const double nm = norm(*vecs[static_cast<std::size_t>(i)]);
        norms[static_cast<std::size_t>(i)] = nm;
        if (nm <= lindep) {
            w[static_cast<std::size_t>(i)] = zeros(vecs.front()->size());
            wim[static_cast<std::size_t>(i)] = zeros(vecs.front()->size());
            norms[static_cast<std::size_t>(i)] = 0.0;
        } else {
            w[static_cast<std::size_t>(i)] = scaled(*vecs[static_cast<std::size_t>(i)], 1.0 / nm);
            wim[static_cast<std::size_t>(i)] = scaled(*images[static_cast<std::size_t>(i)], 1.0 / nm);
        }
    }

    SubspaceSolve out;
    OrthoTransform trans;
    try {
        trans = canonical_orthogonalize(w, 1e-14);
    } catch (const std::runtime_error&) {
        return out;  // empty basis
    }
    if (trans.rank < 2) return out;

    // Materialize the orthonormal basis and its images; projecting the raw
    // Gram matrix through P squares the near-singular amplification.
    const std::vector<Vector> basis = apply_transform(w, trans);
    const std::vector<Vector> basis_im = apply_transform(wim, trans);
    SmallMatrix g(trans.rank);
    for (int i = 0; i < trans.rank; ++i)
        for (int j = i; j < trans.rank; ++j)
            g(i, j) = g(j, i) = 0.5 * (dot(basis[static_cast<std::size_t>(i)], basis_im[static_cast<std::size_t>(j)]) +
                                       dot(basis[static_cast<std::size_t>(j)], basis_im[static_cast<std::size_t>(i)]));
    const SmallEigResult eig = jacobi_symmetric_eig(g);

    out.ok = true;
    out.rank = trans.rank;
    out.eigenvalues = eig.eigenvalues;
    out.vprime.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(trans.rank), 0.0));
    for (int i = 0; i < m; ++i) {
        if (norms[static_cast<std::size_t>(i)] == 0.0) continue;
        for (int col = 0; col < trans.rank; ++col) {
            double s = 0.0;
            for (int mm = 0; mm < trans.rank; ++mm) s += trans.coeff(i, mm) * eig.eigenvectors(mm, col);
            out.vprime[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] = s / norms[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

/// One SBCI2 update; two operator applications unless the lower residual
/// already vanished. First step (t = 0) works over the four-vector basis
/// with B = I, later steps over the six-vector basis.
inline Sbci2StepData sbci2_step_impl(Sbci2State& st, const SymmetricOperator& op,
                                     const GroundShiftPreconditioner& pre, const DeflationSet& defl,
                                     const SolverConfig& cfg, int max_cycle) {
    Sbci2StepData out;

    Vector za = precondition_and_deflate(st.zra, pre, defl);
    Vector zb = precondition_and_deflate(st.zrb, pre, defl);
    if (norm(za) < cfg.lindep * norm(st.xa)) {
        st.ea = rayleigh_quotient(st.xa, st.hxa);
        out.outcome = StepOutcome::converged();
        out.dz = norm(st.zra);
        return out;
    }

    const Vector hza = op.apply(za);
    const Vector hzb = op.apply(zb);
    out.applied_operator = true;

    const bool first = st.t == 0;
    SubspaceSolve sub;
    if (first) {
        sub = pair_subspace_solve({&st.xa, &st.xb, &za, &zb}, {&st.hxa, &st.hxb, &hza, &hzb}, cfg.lindep);
    } else {
        sub = pair_subspace_solve({&st.xa, &st.xb, &st.ya, &st.yb, &za, &zb},
                                  {&st.hxa, &st.hxb, &st.hya, &st.hyb, &hza, &hzb}, cfg.lindep);
    }
    if (!sub.ok) {
        out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
        return out;
    }

    const auto& vp = sub.vprime;
    PairCoefficients co;
    constexpr double tiny = 1e-14;
    if (first) {
        // x rows are 0/1, z rows 2/3.
        if (std::abs(vp[0][0]) < tiny || std::abs(vp[1][1]) < tiny) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
        co.k0 = 1.0 / vp[0][0];
        co.a_ab = vp[1][0] / vp[0][0];
        co.c_aa = -vp[2][0] / vp[0][0];
        co.c_ab = -vp[3][0] / vp[0][0];
        co.k1 = 1.0 / vp[1][1];
        co.a_ba = vp[0][1] / vp[1][1];
        co.c_ba = -vp[2][1] / vp[1][1];
        co.c_bb = -vp[3][1] / vp[1][1];
        co.b_aa = co.b_bb = 1.0;
        co.b_ab = co.b_ba = 0.0;
    } else {
        // x rows 0/1, y rows 2/3, z rows 4/5.
        if (std::abs(vp[2][0]) < tiny || std::abs(vp[3][1]) < tiny) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
        co.a_ab = vp[1][0] / vp[2][0];
        co.a_ba = vp[0][1] / vp[3][1];
        const double k0_den = vp[0][0] - vp[3][0] * co.a_ba;
        const double k1_den = vp[1][1] - vp[2][1] * co.a_ab;
        if (std::abs(k0_den) < tiny || std::abs(k1_den) < tiny) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
        co.k0 = 1.0 / k0_den;
        co.k1 = 1.0 / k1_den;
        co.b_aa = co.k0 * vp[2][0];
        co.b_ab = co.k0 * vp[3][0];
        co.b_ba = co.k1 * vp[2][1];
        co.b_bb = co.k1 * vp[3][1];
        // -[[vp20, vp30], [vp21, vp31]] C = [[vp40, vp50], [vp41, vp51]]
        const double m00 = vp[2][0], m01 = vp[3][0], m10 = vp[2][1], m11 = vp[3][1];
        const double det = m00 * m11 - m01 * m10;
        const double scale_sq = std::sqrt((m00 * m00 + m01 * m01) * (m10 * m10 + m11 * m11));
        if (std::abs(det) < tiny * std::max(scale_sq, 1e-30)) {
            out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
            return out;
        }
        const double r00 = vp[4][0], r01 = vp[5][0], r10 = vp[4][1], r11 = vp[5][1];
        co.c_aa = -(m11 * r00 - m01 * r10) / det;
        co.c_ab = -(m11 * r01 - m01 * r11) / det;
        co.c_ba = -(-m10 * r00 + m00 * r10) / det;
        co.c_bb = -(-m10 * r01 + m00 * r11) / det;
    }

    const double e_new_a = sub.eigenvalues[0];
    const double e_new_b = sub.eigenvalues[1];

    Vector ya_new = zeros(op.dim()), hya_new = zeros(op.dim());
    axpy(1.0, st.ya, ya_new);
    axpy(1.0, st.hya, hya_new);
    axpy(-co.c_aa, za, ya_new);
    axpy(-co.c_ab, zb, ya_new);
    axpy(co.a_ab, st.xb, ya_new);
    axpy(-co.c_aa, hza, hya_new);
    axpy(-co.c_ab, hzb, hya_new);
    axpy(co.a_ab, st.hxb, hya_new);

    Vector yb_new = zeros(op.dim()), hyb_new = zeros(op.dim());
    axpy(1.0, st.yb, yb_new);
    axpy(1.0, st.hyb, hyb_new);
    axpy(-co.c_ba, za, yb_new);
    axpy(-co.c_bb, zb, yb_new);
    axpy(co.a_ba, st.xa, yb_new);
    axpy(-co.c_ba, hza, hyb_new);
    axpy(-co.c_bb, hzb, hyb_new);
    axpy(co.a_ba, st.hxa, hyb_new);

    Vector xa_new = st.xa, hxa_new = st.hxa;
    axpy(co.b_aa, ya_new, xa_new);
    axpy(co.b_ab, yb_new, xa_new);
    axpy(co.b_aa, hya_new, hxa_new);
    axpy(co.b_ab, hyb_new, hxa_new);

    Vector xb_new = st.xb, hxb_new = st.hxb;
    axpy(co.b_ba, ya_new, xb_new);
    axpy(co.b_bb, yb_new, xb_new);
    axpy(co.b_ba, hya_new, hxb_new);
    axpy(co.b_bb, hyb_new, hxb_new);

    // Cancellation guard, as in the single-state solver.
    const double ya_nm = norm(ya_new), yb_nm = norm(yb_new);
    const double ingredients_a = norm(st.xa) + std::abs(co.b_aa) * ya_nm + std::abs(co.b_ab) * yb_nm;
    const double ingredients_b = norm(st.xb) + std::abs(co.b_ba) * ya_nm + std::abs(co.b_bb) * yb_nm;
    if (ingredients_a > 1e6 * std::max(norm(xa_new), 1e-300) ||
        ingredients_b > 1e6 * std::max(norm(xb_new), 1e-300)) {
        out.outcome = StepOutcome::restart(RestartReason::StallSmallB);
        return out;
    }

    st.ya = std::move(ya_new);
    st.hya = std::move(hya_new);
    st.yb = std::move(yb_new);
    st.hyb = std::move(hyb_new);
    st.xa = std::move(xa_new);
    st.hxa = std::move(hxa_new);
    st.xb = std::move(xb_new);
    st.hxb = std::move(hxb_new);

    st.zra = combine(1.0 / co.k0, st.hxa, -e_new_a / co.k0, st.xa);
    out.dE = std::abs(e_new_a - st.ea);
    out.dz = norm(st.zra);
    st.coeffs = co;

    // As in the single-state solver: once the raw residual is pinned at the
    // floor inherited from inexact lower states, test the deflated part.
    double dz_deflated = out.dz;
    if (!defl.empty()) {
        Vector zd = st.zra;
        defl.project_out(zd);
        dz_deflated = norm(zd);
    }
    if (out.dE < cfg.eps0 && std::min(out.dz, dz_deflated) < cfg.r0) {
        st.ea = e_new_a;
        st.eb = e_new_b;
        out.outcome = StepOutcome::converged();
        return out;
    }
    st.zrb = combine(1.0 / co.k1, st.hxb, -e_new_b / co.k1, st.xb);
    st.ea = e_new_a;
    st.eb = e_new_b;

    if (auto reason = check_restart_sbci2(co.b_aa, co.b_bb, out.dE, norm(st.xa), norm(st.xb), out.dz,
                                          st.t, cfg, max_cycle)) {
        out.outcome = StepOutcome::restart(*reason);
        return out;
    }
    out.outcome = StepOutcome::cont();
    return out;
}

}  // namespace detail

inline StepOutcome sbci2_first_step(Sbci2State& st, const SymmetricOperator& op,
                                    const GroundShiftPreconditioner& pre, const DeflationSet& defl,
                                    const SolverConfig& cfg) {
    if (st.t != 0) throw std::invalid_argument("sbci2_first_step: t must be 0");
    return detail::sbci2_step_impl(st, op, pre, defl, cfg, cfg.effective_max_cycle(kSbci2DefaultMaxCycle))
        .outcome;
}

inline StepOutcome sbci2_step(Sbci2State& st, const SymmetricOperator& op,
                              const GroundShiftPreconditioner& pre, const DeflationSet& defl,
                              const SolverConfig& cfg) {
    return detail::sbci2_step_impl(st, op, pre, defl, cfg, cfg.effective_max_cycle(kSbci2DefaultMaxCycle))
        .outcome;
}

struct Sbci2PairResult {
    ConvergedEigenpair pair;  // the lower state
    Vector converged_image;   // H x_c from the cache
    Seed carry;               // normalized upper iterate, seeds the next pair
    int hx_refreshes = 0;
};

/// Iterates a pair until the lower state converges. Only the lower state has
/// a convergence test; the upper iterate is returned as the next seed.
inline Sbci2PairResult solve_pair(const SymmetricOperator& op, GroundShiftPreconditioner& pre,
                                  const DeflationSet& defl, Seed lower, Seed upper,
                                  const SolverConfig& cfg, int alpha = 0, TraceSink* sink = nullptr,
                                  bool track_ground_shift = true) {
    cfg.validate();
    const int max_cycle = cfg.effective_max_cycle(kSbci2DefaultMaxCycle);
    Sbci2State st = init_pair(op, defl, std::move(lower), std::move(upper), cfg.lindep, alpha);
    if (track_ground_shift) pre.update_shift(st.ea);

    Sbci2PairResult result;

    // Lower seed already converged: no update step, no applies; the upper
    // seed carries over untouched.
    if (norm(precondition_and_deflate(st.zra, pre, defl)) < cfg.lindep) {
        result.pair.state = alpha;
        result.pair.energy = st.ea;
        result.pair.vector = st.xa;
        result.pair.final_residual = norm(st.zra);
        result.converged_image = st.hxa;
        result.carry.x = st.xb;
        result.carry.hx = st.hxb;
        result.carry.energy = st.eb;
        return result;
    }
    while (st.total_iterations < cfg.t_max) {
        detail::Sbci2StepData step = detail::sbci2_step_impl(st, op, pre, defl, cfg, max_cycle);
        ++st.total_iterations;

        if (sink) {
            TraceRecord rec;
            rec.method = "sbci2";
            rec.state = alpha;
            rec.pair_partner = alpha + 1;
            rec.t = st.t;
            rec.energy = st.ea;
            rec.dE = step.dE;
            rec.res_norm = step.dz;
            rec.x_norm = norm(st.xa);
            rec.kinetic = detail::kinetic_scalar(st.ya, pre);
            rec.matvecs = op.apply_count();
            rec.b = st.coeffs.b_aa;
            rec.c = st.coeffs.c_aa;
            rec.b_ab = st.coeffs.b_ab;
            rec.b_ba = st.coeffs.b_ba;
            rec.b_bb = st.coeffs.b_bb;
            rec.c_ab = st.coeffs.c_ab;
            rec.c_ba = st.coeffs.c_ba;
            rec.c_bb = st.coeffs.c_bb;
            rec.a_ab = st.coeffs.a_ab;
            rec.a_ba = st.coeffs.a_ba;
            rec.energy_partner = st.eb;
            rec.x_norm_partner = norm(st.xb);
            rec.res_norm_partner = norm(st.zrb);
            if (step.outcome.kind == StepOutcome::Kind::Restart)
                rec.restart_reason = to_string(step.outcome.reason);
            sink->record(rec);
        }
        if (track_ground_shift) pre.update_shift(st.ea);

        switch (step.outcome.kind) {
            case StepOutcome::Kind::Converged: {
                ConvergedEigenpair pair;
                pair.state = alpha;
                pair.energy = rayleigh_quotient(st.xa, st.hxa);  // E in exact arithmetic
                pair.vector = st.xa;
                const double na = normalize(pair.vector);
                for (std::size_t i = 0; i < defl.size(); ++i)
                    if (std::abs(dot(defl.vector(i), pair.vector)) > 1e-9)
                        throw NonConvergenceError(alpha, pair.energy, step.dz);
                pair.iterations = static_cast<int>(st.total_iterations);
                pair.restarts = st.restart_count;
                pair.final_residual = step.dz;
                result.pair = std::move(pair);
                result.converged_image = scaled(st.hxa, na > 0.0 ? 1.0 / na : 1.0);

                const double nb = norm(st.xb);
                if (nb < cfg.lindep) throw NonConvergenceError(alpha + 1, st.eb, norm(st.zrb));
                result.carry.x = scaled(st.xb, 1.0 / nb);
                result.carry.hx = scaled(st.hxb, 1.0 / nb);
                result.carry.energy = rayleigh_quotient(result.carry.x, result.carry.hx);
                return result;
            }
            case StepOutcome::Kind::Restart: {
                double na = norm(st.xa);
                double nb = norm(st.xb);
                if (na < cfg.lindep || nb < cfg.lindep)
                    throw NonConvergenceError(alpha, st.ea, step.dz);
                scale(st.xa, 1.0 / na);
                scale(st.hxa, 1.0 / na);
                scale(st.xb, 1.0 / nb);
                scale(st.hxb, 1.0 / nb);
                if (!defl.empty()) {
                    // Scrub deflated-span leakage (see the single-state solver).
                    defl.project_out_pair(st.xa, st.hxa);
                    defl.project_out_pair(st.xb, st.hxb);
                    na = norm(st.xa);
                    nb = norm(st.xb);
                    if (na < cfg.lindep || nb < cfg.lindep)
                        throw NonConvergenceError(alpha, st.ea, step.dz);
                    scale(st.xa, 1.0 / na);
                    scale(st.hxa, 1.0 / na);
                    scale(st.xb, 1.0 / nb);
                    scale(st.hxb, 1.0 / nb);
                    st.ea = dot(st.xa, st.hxa);
                    st.eb = dot(st.xb, st.hxb);
                }
                st.ya = zeros(op.dim());
                st.hya = zeros(op.dim());
                st.yb = zeros(op.dim());
                st.hyb = zeros(op.dim());
                ++st.restart_count;
                if (cfg.hx_refresh_restarts > 0 && st.restart_count % cfg.hx_refresh_restarts == 0) {
                    st.hxa = op.apply(st.xa);
                    st.hxb = op.apply(st.xb);
                    result.hx_refreshes += 2;
                }
                st.zra = combine(1.0, st.hxa, -st.ea, st.xa);
                st.zrb = combine(1.0, st.hxb, -st.eb, st.xb);
                st.coeffs = PairCoefficients{};
                st.t = 0;
                break;
            }
            case StepOutcome::Kind::Continue:
                ++st.t;
                break;
        }
    }
    throw NonConvergenceError(alpha, st.ea, norm(st.zra));
}

/**
 * Pair-sequential lowest-n driver (pairs (0,1), (1,2), ... with the carry
 * seeding each next lower state; the final state runs single-state SBCI1).
 * n = 1 routes entirely to the single-state driver.
 */
inline MultiStateResult solve_n_states_sbci2(const SymmetricOperator& op, int n, const SolverConfig& cfg,
                                             TraceSink* sink = nullptr) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("solve_n_states_sbci2: n must be >= 1");
    if (n == 1) {
        MultiStateResult r = solve_n_states_sbci1(op, 1, cfg, sink);
        r.summary.method = "sbci2";
        return r;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t applies_before = op.apply_count();

    std::vector<Seed> guesses = init_guess_from_diagonal(op, n, cfg.lindep);
    GroundShiftPreconditioner pre(op.diagonal(), guesses.front().energy, cfg.clamp_delta);
    DeflationSet defl;

    MultiStateResult out;
    out.summary.method = "sbci2";

    Seed lower = guesses.front();
    for (int alpha = 0; alpha + 1 < n; ++alpha) {
        // Prepare the lower seed against the converged set.
        defl.project_out_pair(lower.x, lower.hx);
        double nm = norm(lower.x);
        if (nm < std::max(cfg.lindep, 1e-8))
            throw std::runtime_error("sbci2: carried seed collapsed under deflation");
        scale(lower.x, 1.0 / nm);
        scale(lower.hx, 1.0 / nm);
        lower.energy = dot(lower.x, lower.hx);

        // Upper seed: rotated initial vectors projected against the converged
        // set and the lower seed; lowest surviving Rayleigh quotient wins.
        std::optional<Seed> upper;
        for (int off = 0; off < static_cast<int>(guesses.size()); ++off) {
            const int idx = (alpha + 1 + off) % static_cast<int>(guesses.size());
            Seed cand = guesses[static_cast<std::size_t>(idx)];
            defl.project_out_pair(cand.x, cand.hx);
            const double o = dot(lower.x, cand.x);
            axpy(-o, lower.x, cand.x);
            axpy(-o, lower.hx, cand.hx);
            const double cn = norm(cand.x);
            if (cn < std::max(cfg.lindep, 1e-8)) continue;
            scale(cand.x, 1.0 / cn);
            scale(cand.hx, 1.0 / cn);
            cand.energy = dot(cand.x, cand.hx);
            if (!upper || cand.energy < upper->energy) upper = std::move(cand);
        }
        if (!upper) throw std::runtime_error("sbci2: no usable upper seed remained");

        Sbci2PairResult res = solve_pair(op, pre, defl, std::move(lower), std::move(*upper), cfg, alpha,
                                         sink, /*track_ground_shift=*/alpha == 0);
        if (alpha == 0) pre.update_shift(res.pair.energy);

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
        lower = std::move(res.carry);
    }

    // Highest state: switch to the single-state procedure.
    Sbci1Result last = solve_state_sbci1(op, pre, defl, std::move(lower), cfg, n - 1, sink,
                                         /*track_ground_shift=*/false);
    StateSummary ss;
    ss.state = n - 1;
    ss.energy = last.pair.energy;
    ss.iterations = last.pair.iterations;
    ss.restarts = last.pair.restarts;
    ss.final_residual = last.pair.final_residual;
    out.summary.states.push_back(ss);
    out.summary.total_iterations += last.pair.iterations;
    out.summary.total_restarts += last.pair.restarts;
    out.summary.hx_refreshes += last.hx_refreshes;
    defl.add_with_image(last.pair.vector, std::move(last.converged_image), last.pair.energy);
    out.pairs.push_back(std::move(last.pair));

    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const ConvergedEigenpair& a, const ConvergedEigenpair& b) { return a.energy < b.energy; });
    std::sort(out.summary.states.begin(), out.summary.states.end(),
              [](const StateSummary& a, const StateSummary& b) { return a.energy < b.energy; });

    out.summary.matvecs = op.apply_count() - applies_before;
    out.summary.peak_vectors = 14 + static_cast<int>(defl.size());
    out.summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace sbci
