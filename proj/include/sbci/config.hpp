#pragma once

#include <stdexcept>
#include <string>

namespace sbci {

/// Shared solver thresholds. max_cycle = 0 means "method default"
/// (20 per restart segment for sbci1, 10 for sbci2).
struct SolverConfig {
    double eps0 = 1e-10;   // energy convergence, hartree
    double r0 = 1e-5;      // residual-norm convergence
    double b_th = 1e-2;    // stall threshold on |b|
    double eps1 = 1e-7;    // energy threshold paired with b_th, hartree
    double x_th1 = 0.1;    // lower bound on |x_{t+1}|
    double x_th2 = 1.2;    // upper bound on |x_{t+1}|
    double r1 = 1.0;       // residual blow-up threshold
    int max_cycle = 0;     // iterations per restart segment (0 = method default)
    long t_max = 10000;    // total iterations per state
    double lindep = 1e-14; // linear-dependence cutoff
    double clamp_delta = 1e-10;
    int hx_refresh_restarts = 5;  // recompute Hx from scratch every k restarts (0 = never)

    int effective_max_cycle(int method_default) const { return max_cycle > 0 ? max_cycle : method_default; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) throw std::invalid_argument(std::string("SolverConfig: ") + name + " must be > 0");
        };
        positive(eps0, "eps0");
        positive(r0, "r0");
        positive(b_th, "b_th");
        positive(eps1, "eps1");
        positive(x_th1, "x_th1");
        positive(x_th2, "x_th2");
        positive(r1, "r1");
        positive(lindep, "lindep");
        positive(clamp_delta, "clamp_delta");
        if (!(x_th1 < 1.0 && 1.0 < x_th2))
            throw std::invalid_argument("SolverConfig: need x_th1 < 1 < x_th2");
        if (max_cycle != 0 && max_cycle < 2) throw std::invalid_argument("SolverConfig: max_cycle must be >= 2");
        if (t_max < 1) throw std::invalid_argument("SolverConfig: t_max must be >= 1");
    }

    /// The two published tolerance pairs; "tight" is the all-electron
    /// setting, "loose" the frozen-core one.
    static SolverConfig preset(const std::string& name) {
        SolverConfig c;
        if (name == "tight") {
            c.eps0 = 1e-10;
            c.r0 = 1e-5;
        } else if (name == "loose") {
            c.eps0 = 1e-8;
            c.r0 = 1e-4;
        } else {
            throw std::invalid_argument("unknown preset '" + name + "' (expected tight or loose)");
        }
        return c;
    }
};

enum class RestartReason { StallSmallB, NormOutOfRange, ResidualBlowup, MaxCycle };

inline const char* to_string(RestartReason r) {
    switch (r) {
        case RestartReason::StallSmallB: return "stall_small_b";
        case RestartReason::NormOutOfRange: return "norm_out_of_range";
        case RestartReason::ResidualBlowup: return "residual_blowup";
        case RestartReason::MaxCycle: return "max_cycle";
    }
    return "?";
}

inline RestartReason restart_reason_from_string(const std::string& s) {
    if (s == "stall_small_b") return RestartReason::StallSmallB;
    if (s == "norm_out_of_range") return RestartReason::NormOutOfRange;
    if (s == "residual_blowup") return RestartReason::ResidualBlowup;
    if (s == "max_cycle") return RestartReason::MaxCycle;
    throw std::invalid_argument("unknown restart reason '" + s + "'");
}

/// Outcome of a single update step.
struct StepOutcome {
    enum class Kind { Continue, Converged, Restart } kind = Kind::Continue;
    RestartReason reason = RestartReason::StallSmallB;  // valid when kind == Restart

    static StepOutcome cont() { return {Kind::Continue, RestartReason::StallSmallB}; }
    static StepOutcome converged() { return {Kind::Converged, RestartReason::StallSmallB}; }
    static StepOutcome restart(RestartReason r) { return {Kind::Restart, r}; }
};

struct NonConvergenceError : std::runtime_error {
    int state;
    double best_energy;
    double best_residual;
    NonConvergenceError(int state_idx, double energy, double residual)
        : std::runtime_error("state " + std::to_string(state_idx) + " did not converge (best E = " +
                             std::to_string(energy) + ", |z'| = " + std::to_string(residual) + ")"),
          state(state_idx), best_energy(energy), best_residual(residual) {}
};

}  // namespace sbci
