#include <doctest.h>

#include <map>

#include "sbci/davidson.hpp"
#include "sbci/sbci1.hpp"
#include "sbci/sbci2.hpp"
#include "sbci/synthetic.hpp"
#include "support/dense_oracle.hpp"

using namespace sbci;

TEST_CASE("diagonal matrix converges in one expansion") {
    SmallMatrix m(5);
    for (int i = 0; i < 5; ++i) m(i, i) = i + 1.0;
    DenseOperator op(m);
    SolverConfig cfg;
    auto res = davidson_solve(op, 3, cfg);
    CHECK(res.summary.total_iterations == 1);
    CHECK(res.summary.matvecs == 3);  // the initial block only
    for (int k = 0; k < 3; ++k) CHECK(res.pairs[static_cast<std::size_t>(k)].energy ==
                                      doctest::Approx(k + 1.0).epsilon(1e-13));
}

TEST_CASE("200x200 synthetic, 4 roots vs oracle and vs SBCI") {
    auto op = gen_synthetic_ci_matrix(200, 17, 0.02);
    const auto es = oracle::eigensystem(oracle::densify(*op));
    SolverConfig cfg;
    auto rd = davidson_solve(*op, 4, cfg);
    auto r1 = solve_n_states_sbci1(*op, 4, cfg);
    auto r2 = solve_n_states_sbci2(*op, 4, cfg);
    for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        CHECK(std::abs(rd.pairs[ks].energy - es.values[ks]) <= 1e-8);
        CHECK(std::abs(r1.pairs[ks].energy - rd.pairs[ks].energy) <= 1e-8);
        CHECK(std::abs(r2.pairs[ks].energy - rd.pairs[ks].energy) <= 1e-8);
        // residual of the returned eigenpair
        Vector r = op->apply(rd.pairs[ks].vector);
        axpy(-rd.pairs[ks].energy, rd.pairs[ks].vector, r);
        CHECK(norm(r) <= cfg.r0);
    }
}

TEST_CASE("search space stays orthonormal through expansions and collapses") {
    auto op = gen_synthetic_ci_matrix(150, 23, 0.03);
    DavidsonConfig dcfg;
    dcfg.nroots = 3;
    dcfg.max_space = 9;  // force collapses
    GroundShiftPreconditioner pre(op->diagonal(), op->diagonal()[0]);
    double worst = 0.0;
    auto watch = [&](const std::vector<Vector>& basis) {
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = 0; j < basis.size(); ++j)
                worst = std::max(worst,
                                 std::abs(dot(basis[i], basis[j]) - (i == j ? 1.0 : 0.0)));
    };
    davidson_solve(*op, pre, dcfg, nullptr, watch);
    CHECK(worst <= 1e-10);
}

TEST_CASE("Ritz values per root are nonincreasing as the space grows") {
    auto op = gen_synthetic_ci_matrix(150, 29, 0.03);
    SolverConfig cfg;
    MemoryTraceSink sink;
    davidson_solve(*op, 3, cfg, &sink);
    std::map<int, double> last;
    for (const auto& r : sink.records()) {
        REQUIRE(r.method == "davidson");
        if (last.count(r.state)) CHECK(r.energy <= last[r.state] + 1e-10);
        last[r.state] = r.energy;
    }
}

TEST_CASE("iteration cap raises nonconvergence with residual diagnostics") {
    auto op = gen_synthetic_ci_matrix(200, 37, 0.02);
    DavidsonConfig dcfg;
    dcfg.nroots = 2;
    dcfg.max_iter = 1;
    GroundShiftPreconditioner pre(op->diagonal(), op->diagonal()[0]);
    CHECK_THROWS_AS(davidson_solve(*op, pre, dcfg), NonConvergenceError);
}

TEST_CASE("config validation") {
    DavidsonConfig bad;
    bad.nroots = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    DavidsonConfig narrow;
    narrow.nroots = 4;
    narrow.max_space = 6;
    CHECK_THROWS_AS(narrow.validate(), std::invalid_argument);
    DavidsonConfig ok;
    ok.nroots = 4;
    CHECK(ok.effective_max_space() == 48);
}
