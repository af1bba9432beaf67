// Command-line front end: solve / gen / compare / conserve / fci.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "sbci/sbci.hpp"

using json = nlohmann::ordered_json;
using namespace sbci;

namespace {

struct CommonOptions {
    std::string input_mtx;
    std::string fcidump;
    std::optional<int> ms2;
    std::string method = "sbci1";
    int nroots = 1;
    std::string preset;
    std::string config_path;
    std::string trace_path;
    std::string summary_path;
    SolverConfig cfg;
    int max_space = 0;  // davidson only, 0 = default
};

void add_config_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--preset", opt.preset, "tolerance preset: tight (1e-10/1e-5) or loose (1e-8/1e-4)")
        ->check(CLI::IsMember({"tight", "loose"}));
    cmd->add_option("--config", opt.config_path, "JSON file with SolverConfig fields (flags still win)");
    cmd->add_option("--eps0", opt.cfg.eps0, "energy convergence threshold (hartree)");
    cmd->add_option("--r0", opt.cfg.r0, "residual-norm convergence threshold");
    cmd->add_option("--b-th", opt.cfg.b_th, "stall threshold on |b|");
    cmd->add_option("--eps1", opt.cfg.eps1, "energy threshold paired with --b-th (hartree)");
    cmd->add_option("--x-th1", opt.cfg.x_th1, "restart when |x| drops below this");
    cmd->add_option("--x-th2", opt.cfg.x_th2, "restart when |x| grows above this");
    cmd->add_option("--r1", opt.cfg.r1, "residual blow-up restart threshold");
    cmd->add_option("--max-cycle", opt.cfg.max_cycle, "iterations per restart segment (0 = method default)");
    cmd->add_option("--t-max", opt.cfg.t_max, "total iteration cap per state");
    cmd->add_option("--lindep", opt.cfg.lindep, "linear-dependence cutoff");
    cmd->add_option("--clamp-delta", opt.cfg.clamp_delta, "preconditioner denominator clamp");
    cmd->add_option("--max-space", opt.max_space, "davidson subspace cap (default 12*nroots)");
}

void add_input_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--input", opt.input_mtx, "Matrix Market file (coordinate real symmetric)");
    cmd->add_option("--fcidump", opt.fcidump, "FCIDUMP integrals file");
    cmd->add_option("--ms2", opt.ms2, "2*S_z sector override for --fcidump");
}

void apply_config_file(SolverConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    const json j = json::parse(in);
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("eps0", cfg.eps0);
    get("r0", cfg.r0);
    get("b_th", cfg.b_th);
    get("eps1", cfg.eps1);
    get("x_th1", cfg.x_th1);
    get("x_th2", cfg.x_th2);
    get("r1", cfg.r1);
    get("max_cycle", cfg.max_cycle);
    get("t_max", cfg.t_max);
    get("lindep", cfg.lindep);
    get("clamp_delta", cfg.clamp_delta);
    get("hx_refresh_restarts", cfg.hx_refresh_restarts);
}

SolverConfig resolve_config(const CommonOptions& opt, const CLI::App* cmd) {
    SolverConfig cfg = opt.preset.empty() ? SolverConfig{} : SolverConfig::preset(opt.preset);
    if (!opt.config_path.empty()) apply_config_file(cfg, opt.config_path);
    // explicit flags win over the preset and the config file
    if (cmd->count("--eps0")) cfg.eps0 = opt.cfg.eps0;
    if (cmd->count("--r0")) cfg.r0 = opt.cfg.r0;
    if (cmd->count("--b-th")) cfg.b_th = opt.cfg.b_th;
    if (cmd->count("--eps1")) cfg.eps1 = opt.cfg.eps1;
    if (cmd->count("--x-th1")) cfg.x_th1 = opt.cfg.x_th1;
    if (cmd->count("--x-th2")) cfg.x_th2 = opt.cfg.x_th2;
    if (cmd->count("--r1")) cfg.r1 = opt.cfg.r1;
    if (cmd->count("--max-cycle")) cfg.max_cycle = opt.cfg.max_cycle;
    if (cmd->count("--t-max")) cfg.t_max = opt.cfg.t_max;
    if (cmd->count("--lindep")) cfg.lindep = opt.cfg.lindep;
    if (cmd->count("--clamp-delta")) cfg.clamp_delta = opt.cfg.clamp_delta;
    cfg.validate();
    return cfg;
}

struct LoadedProblem {
    std::shared_ptr<SymmetricOperator> op;
    std::shared_ptr<fci::FciOperator> fci_op;  // set when loaded from FCIDUMP
};

LoadedProblem load_problem(const CommonOptions& opt) {
    if (opt.input_mtx.empty() == opt.fcidump.empty())
        throw CLI::ValidationError("input", "exactly one of --input or --fcidump is required");
    LoadedProblem lp;
    if (!opt.input_mtx.empty()) {
        lp.op = read_matrix_market_file(opt.input_mtx);
    } else {
        fci::FciProblem prob = fci::parse_fcidump_file(opt.fcidump);
        const int ms2 = opt.ms2.value_or(prob.ms2);
        lp.fci_op = fci::as_operator(prob, ms2);
        lp.op = lp.fci_op;
    }
    return lp;
}

MultiStateResult run_method(const std::string& method, const SymmetricOperator& op, int nroots,
                            const SolverConfig& cfg, int max_space, TraceSink* sink) {
    if (method == "sbci1") return solve_n_states_sbci1(op, nroots, cfg, sink);
    if (method == "sbci2") return solve_n_states_sbci2(op, nroots, cfg, sink);
    if (method == "davidson") {
        DavidsonConfig dcfg;
        dcfg.nroots = nroots;
        dcfg.eps0 = cfg.eps0;
        dcfg.r0 = cfg.r0;
        dcfg.lindep = cfg.lindep;
        if (max_space > 0) dcfg.max_space = max_space;
        const Vector& d = op.diagonal();
        GroundShiftPreconditioner pre(d, *std::min_element(d.begin(), d.end()), cfg.clamp_delta);
        DavidsonResult r = davidson_solve(op, pre, dcfg, sink);
        MultiStateResult out;
        out.pairs = std::move(r.pairs);
        out.summary = std::move(r.summary);
        return out;
    }
    throw CLI::ValidationError("method", "unknown method '" + method + "'");
}

json summary_to_json(const RunSummary& s) {
    json states = json::array();
    for (const auto& st : s.states) {
        json row;
        row["state"] = st.state;
        row["energy"] = st.energy;
        row["iterations"] = st.iterations;
        row["restarts"] = st.restarts;
        row["final_residual"] = st.final_residual;
        if (std::isnan(st.s_squared))
            row["s_squared"] = nullptr;
        else
            row["s_squared"] = st.s_squared;
        states.push_back(row);
    }
    json out;
    out["method"] = s.method;
    out["energies"] = s.energies();
    out["states"] = states;
    out["total_iterations"] = s.total_iterations;
    out["total_restarts"] = s.total_restarts;
    out["matvecs"] = s.matvecs;
    out["hx_refreshes"] = s.hx_refreshes;
    out["peak_vectors"] = s.peak_vectors;
    out["wall_time_s"] = s.wall_time_s;
    return out;
}

void write_summary_file(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

void attach_spin(MultiStateResult& res, const fci::FciOperator* fci_op) {
    if (!fci_op) return;
    for (std::size_t k = 0; k < res.pairs.size(); ++k) {
        const double s2 = fci::spin_squared(fci_op->basis(), res.pairs[k].vector);
        res.summary.states[k].s_squared = s2;
    }
}

void print_summary(const MultiStateResult& res, bool with_spin) {
    std::printf("%-6s %-20s %-6s %-9s %-12s%s\n", "state", "energy (hartree)", "iters", "restarts",
                "|res|", with_spin ? "  S^2" : "");
    for (const auto& st : res.summary.states) {
        std::printf("%-6d %-20.12f %-6d %-9d %-12.3e", st.state, st.energy, st.iterations, st.restarts,
                    st.final_residual);
        if (with_spin) std::printf("  %.6f", st.s_squared);
        std::printf("\n");
    }
    std::printf("matvecs %llu, iterations %ld, restarts %d, peak vectors %d, wall %.3f s\n",
                static_cast<unsigned long long>(res.summary.matvecs), res.summary.total_iterations,
                res.summary.total_restarts, res.summary.peak_vectors, res.summary.wall_time_s);
}

int cmd_solve(const CommonOptions& opt, const CLI::App* cmd) {
    const SolverConfig cfg = resolve_config(opt, cmd);
    LoadedProblem lp = load_problem(opt);

    std::unique_ptr<CsvTraceSink> csv;
    if (!opt.trace_path.empty()) csv = std::make_unique<CsvTraceSink>(opt.trace_path);

    MultiStateResult res = run_method(opt.method, *lp.op, opt.nroots, cfg, opt.max_space, csv.get());
    attach_spin(res, lp.fci_op.get());
    print_summary(res, lp.fci_op != nullptr);
    write_summary_file(opt.summary_path, summary_to_json(res.summary));
    return 0;
}

int cmd_fci(const CommonOptions& opt, const CLI::App* cmd) {
    if (opt.fcidump.empty()) throw CLI::ValidationError("fci", "--fcidump is required");
    return cmd_solve(opt, cmd);
}

int cmd_compare(const CommonOptions& opt, const CLI::App* cmd) {
    const SolverConfig cfg = resolve_config(opt, cmd);
    LoadedProblem lp = load_problem(opt);

    const char* methods[] = {"sbci1", "sbci2", "davidson"};
    std::vector<MultiStateResult> results;
    for (const char* m : methods) {
        results.push_back(run_method(m, *lp.op, opt.nroots, cfg, opt.max_space, nullptr));
        attach_spin(results.back(), lp.fci_op.get());
    }

    std::printf("%-6s %-20s %-20s %-20s %-12s %-12s\n", "state", "E_sbci1", "E_sbci2", "E_davidson",
                "d(1-Dv)", "d(2-Dv)");
    for (int k = 0; k < opt.nroots; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double e1 = results[0].pairs[ks].energy;
        const double e2 = results[1].pairs[ks].energy;
        const double ed = results[2].pairs[ks].energy;
        std::printf("%-6d %-20.12f %-20.12f %-20.12f %-12.3e %-12.3e\n", k, e1, e2, ed, e1 - ed, e2 - ed);
    }
    std::printf("%-10s %-10s %-12s %-10s %-10s\n", "method", "matvecs", "iterations", "restarts", "wall_s");
    for (const auto& r : results)
        std::printf("%-10s %-10llu %-12ld %-10d %-10.3f\n", r.summary.method.c_str(),
                    static_cast<unsigned long long>(r.summary.matvecs), r.summary.total_iterations,
                    r.summary.total_restarts, r.summary.wall_time_s);

    if (!opt.summary_path.empty()) {
        json j;
        for (const auto& r : results) j[r.summary.method] = summary_to_json(r.summary);
        write_summary_file(opt.summary_path, j);
    }
    return 0;
}

struct GenOptions {
    std::size_t n = 200;
    std::uint64_t seed = 1;
    double density = 0.02;
    double gap = 1.0;
    std::optional<double> degeneracy_split;
    std::string out;
};

int cmd_gen(const GenOptions& g) {
    SyntheticSpec sp;
    sp.n = g.n;
    sp.seed = g.seed;
    sp.density = g.density;
    sp.gap = g.gap;
    sp.degeneracy_split = g.degeneracy_split;
    auto op = gen_synthetic_ci_matrix(sp);
    if (g.out.empty()) {
        write_matrix_market(std::cout, *op);
    } else {
        write_matrix_market_file(g.out, *op);
        std::printf("wrote %zu x %zu matrix with %zu stored entries to %s\n", op->dim(), op->dim(),
                    op->nnz(), g.out.c_str());
    }
    return 0;
}

struct ConserveOptions {
    std::string trace_path;
    std::string json_path;
    double threshold = 0.10;
};

int cmd_conserve(const ConserveOptions& c) {
    const auto rows = read_trace_csv_file(c.trace_path);
    const auto rep = energy_conservation_report(rows);
    if (rep.empty) {
        std::printf("no restart segment offered enough consecutive steps; nothing to report\n");
        return 0;
    }
    bool pass = true;
    std::printf("%-6s %-8s %-8s %-10s %-10s %-6s\n", "state", "segment", "samples", "median", "p90", "ok");
    for (const auto& s : rep.segments) {
        const bool ok = s.samples == 0 || s.median_dev <= c.threshold;
        if (!ok) pass = false;
        std::printf("%-6d %-8d %-8d %-10.4f %-10.4f %-6s\n", s.state, s.segment, s.samples, s.median_dev,
                    s.p90_dev, s.samples == 0 ? "-" : (ok ? "yes" : "NO"));
    }
    std::printf("threshold: median dev <= %.2f per segment (project-declared) -> %s\n", c.threshold,
                pass ? "pass" : "FAIL");
    if (!c.json_path.empty()) {
        json segs = json::array();
        for (const auto& s : rep.segments)
            segs.push_back({{"state", s.state},
                            {"segment", s.segment},
                            {"samples", s.samples},
                            {"median_dev", s.median_dev},
                            {"p90_dev", s.p90_dev}});
        json samples = json::array();
        for (const auto& s : rep.samples)
            samples.push_back(
                {{"state", s.state}, {"segment", s.segment}, {"t", s.t}, {"dE", s.dE}, {"rhs", s.rhs}, {"dev", s.dev}});
        write_summary_file(c.json_path,
                           json{{"threshold", c.threshold}, {"pass", pass}, {"segments", segs}, {"samples", samples}});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SBCI eigensolvers for sparse symmetric matrices and determinant CI"};
    app.require_subcommand(1);

    CommonOptions solve_opt, fci_opt, compare_opt;
    GenOptions gen_opt;
    ConserveOptions conserve_opt;

    CLI::App* solve = app.add_subcommand("solve", "solve for the lowest states of a matrix or FCIDUMP");
    add_input_flags(solve, solve_opt);
    solve->add_option("--method", solve_opt.method, "sbci1 | sbci2 | davidson")
        ->check(CLI::IsMember({"sbci1", "sbci2", "davidson"}));
    solve->add_option("--nroots", solve_opt.nroots, "number of states")->check(CLI::PositiveNumber);
    solve->add_option("--trace", solve_opt.trace_path, "write the per-iteration CSV trace here");
    solve->add_option("--summary", solve_opt.summary_path, "write the JSON run summary here");
    add_config_flags(solve, solve_opt);

    CLI::App* fcicmd = app.add_subcommand("fci", "determinant-CI solve from an FCIDUMP (prints S^2)");
    fcicmd->add_option("--fcidump", fci_opt.fcidump, "FCIDUMP integrals file")->required();
    fcicmd->add_option("--ms2", fci_opt.ms2, "2*S_z sector (defaults to the file header)");
    fcicmd->add_option("--method", fci_opt.method, "sbci1 | sbci2 | davidson")
        ->check(CLI::IsMember({"sbci1", "sbci2", "davidson"}));
    fcicmd->add_option("--nroots", fci_opt.nroots, "number of states")->check(CLI::PositiveNumber);
    fcicmd->add_option("--trace", fci_opt.trace_path, "write the per-iteration CSV trace here");
    fcicmd->add_option("--summary", fci_opt.summary_path, "write the JSON run summary here");
    add_config_flags(fcicmd, fci_opt);

    CLI::App* compare = app.add_subcommand("compare", "run sbci1, sbci2 and davidson side by side");
    add_input_flags(compare, compare_opt);
    compare->add_option("--nroots", compare_opt.nroots, "number of states")->check(CLI::PositiveNumber);
    compare->add_option("--summary", compare_opt.summary_path, "write the JSON comparison here");
    add_config_flags(compare, compare_opt);

    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic CI-like sparse matrix");
    gen->add_option("--n", gen_opt.n, "dimension")->check(CLI::Range(std::size_t{4}, std::size_t{5'000'000}));
    gen->add_option("--seed", gen_opt.seed, "RNG seed");
    gen->add_option("--density", gen_opt.density, "off-diagonal fill fraction in [0, 1]");
    gen->add_option("--gap", gen_opt.gap, "mean diagonal growth per index");
    gen->add_option("--degeneracy-split", gen_opt.degeneracy_split,
                    "pin lambda_2 - lambda_1 to exactly this value");
    gen->add_option("--out", gen_opt.out, "output Matrix Market path (stdout if omitted)");

    CLI::App* conserve = app.add_subcommand("conserve", "energy-conservation report from a CSV trace");
    conserve->add_option("--trace", conserve_opt.trace_path, "trace CSV produced by solve")->required();
    conserve->add_option("--json", conserve_opt.json_path, "write the report as JSON here");
    conserve->add_option("--threshold", conserve_opt.threshold, "per-segment median dev threshold");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(solve_opt, solve);
        if (fcicmd->parsed()) return cmd_fci(fci_opt, fcicmd);
        if (compare->parsed()) return cmd_compare(compare_opt, compare);
        if (gen->parsed()) return cmd_gen(gen_opt);
        if (conserve->parsed()) return cmd_conserve(conserve_opt);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
