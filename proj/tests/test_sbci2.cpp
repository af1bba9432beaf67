#include <doctest.h>

#include <random>

#include "sbci/sbci2.hpp"
#include "sbci/synthetic.hpp"
#include "support/dense_oracle.hpp"

using namespace sbci;

namespace {

DenseOperator diag_operator(std::initializer_list<double> d) {
    SmallMatrix m(static_cast<int>(d.size()));
    int i = 0;
    for (double v : d) m(i, i) = v, ++i;
    return DenseOperator(std::move(m));
}

Seed seed_of(const SymmetricOperator& op, Vector x) {
    Seed s;
    normalize(x);
    s.hx = op.apply(x);
    s.x = std::move(x);
    s.energy = dot(s.x, s.hx);
    return s;
}

}  // namespace

TEST_CASE("init_pair: orthonormal seeds pass through unchanged") {
    auto op = diag_operator({1.0, 2.0, 3.0, 4.0});
    DeflationSet defl;
    auto st = init_pair(op, defl, seed_of(op, {1, 0, 0, 0}), seed_of(op, {0, 1, 0, 0}), 1e-14);
    CHECK(st.xa[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.xb[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.ea == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.eb == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("init_pair: duplicate upper seed collapses") {
    auto op = diag_operator({1.0, 2.0, 3.0});
    DeflationSet defl;
    CHECK_THROWS_AS(init_pair(op, defl, seed_of(op, {1, 0, 0}), seed_of(op, {1, 0, 0}), 1e-14),
                    std::invalid_argument);
}

TEST_CASE("first step: exact eigenpair converges for the lower state, B0 = I") {
    auto op = diag_operator({1.0, 2.0, 3.0, 4.0});
    GroundShiftPreconditioner pre(op.diagonal(), 1.0);
    DeflationSet defl;
    SolverConfig cfg;
    auto st = init_pair(op, defl, seed_of(op, {1, 0, 0, 0}), seed_of(op, {0, 1, 0, 0}), cfg.lindep);
    const StepOutcome out = sbci2_first_step(st, op, pre, defl, cfg);
    CHECK(out.kind == StepOutcome::Kind::Converged);
    CHECK(st.coeffs.b_aa == 1.0);  // B0 = I convention
    CHECK(st.coeffs.b_bb == 1.0);
    CHECK(st.coeffs.b_ab == 0.0);
}

TEST_CASE("first-step Ritz values sandwich the true eigenvalues from above") {
    auto op = gen_synthetic_ci_matrix(30, 9, 0.3);
    const auto es = oracle::eigensystem(oracle::densify(*op));
    SolverConfig cfg;
    auto guesses = init_guess_from_diagonal(*op, 2, cfg.lindep);
    GroundShiftPreconditioner pre(op->diagonal(), guesses[0].energy);
    DeflationSet defl;
    auto st = init_pair(*op, defl, guesses[0], guesses[1], cfg.lindep);
    sbci2_first_step(st, *op, pre, defl, cfg);
    CHECK(st.ea >= es.values[0] - 1e-12);
    CHECK(st.eb >= es.values[1] - 1e-12);
}

TEST_CASE("general step: updates land on k0 v0 and k1 v1 of the 6-dim subspace") {
    auto op = gen_synthetic_ci_matrix(60, 13, 0.08);
    SolverConfig cfg;  // step-invariant probe: keep the loop in Continue mode
    cfg.eps0 = 1e-300;
    cfg.r0 = 1e-300;
    cfg.b_th = 1e-300;
    cfg.x_th1 = 1e-6;
    cfg.x_th2 = 1e6;
    cfg.r1 = 1e6;
    cfg.max_cycle = 100;
    auto guesses = init_guess_from_diagonal(*op, 2, cfg.lindep);
    GroundShiftPreconditioner pre(op->diagonal(), guesses[0].energy);
    DeflationSet defl;
    auto st = init_pair(*op, defl, guesses[0], guesses[1], cfg.lindep);
    REQUIRE(sbci2_first_step(st, *op, pre, defl, cfg).kind == StepOutcome::Kind::Continue);
    st.t = 1;
    pre.update_shift(st.ea);

    double prev_ea = st.ea;
    int checked = 0;
    for (int t = 1; t < 5; ++t) {
        const Vector xa0 = st.xa, xb0 = st.xb, ya0 = st.ya, yb0 = st.yb;
        const Vector zra0 = st.zra, zrb0 = st.zrb;
        const StepOutcome out = sbci2_step(st, *op, pre, defl, cfg);
        if (out.kind != StepOutcome::Kind::Continue) break;
        ++checked;

        CHECK(st.ea <= prev_ea + 1e-12);  // lower-state monotonicity
        prev_ea = st.ea;

        // norm identities
        CHECK(std::abs(norm(st.xa) - std::abs(st.coeffs.k0)) <= 1e-10 * norm(st.xa));
        CHECK(std::abs(norm(st.xb) - std::abs(st.coeffs.k1)) <= 1e-10 * norm(st.xb));

        // independent reconstruction of the 6-dim Ritz vectors
        Vector za = precondition_and_deflate(zra0, pre, defl);
        Vector zb = precondition_and_deflate(zrb0, pre, defl);
        std::vector<Vector> span{xa0, xb0, ya0, yb0, za, zb};
        oracle::Matrix basis(static_cast<Eigen::Index>(op->dim()), 6);
        for (int c = 0; c < 6; ++c) basis.col(c) = oracle::to_eigen(span[static_cast<std::size_t>(c)]);
        Eigen::HouseholderQR<oracle::Matrix> qr(basis);
        oracle::Matrix q = qr.householderQ() * oracle::Matrix::Identity(basis.rows(), 6);
        oracle::Matrix hq(q.rows(), 6);
        for (Eigen::Index c = 0; c < 6; ++c)
            hq.col(c) = oracle::to_eigen(op->apply(oracle::to_vector(q.col(c))));
        const auto sub = oracle::eigensystem(oracle::Matrix(q.transpose() * hq));

        const Eigen::VectorXd r0 = q * sub.vectors.col(0);
        const Eigen::VectorXd r1 = q * sub.vectors.col(1);
        const Eigen::VectorXd xa_e = oracle::to_eigen(st.xa);
        const Eigen::VectorXd xb_e = oracle::to_eigen(st.xb);
        CHECK(std::abs(r0.dot(xa_e)) / (r0.norm() * xa_e.norm()) >= 1.0 - 1e-10);
        CHECK(std::abs(r1.dot(xb_e)) / (r1.norm() * xb_e.norm()) >= 1.0 - 1e-10);

        st.t++;
        pre.update_shift(st.ea);
    }
    CHECK(checked >= 2);
}

TEST_CASE("restart conditions: pair rules") {
    SolverConfig cfg;
    const int mc = cfg.effective_max_cycle(kSbci2DefaultMaxCycle);
    CHECK(mc == 10);

    // |xB| below x_th1
    auto r = check_restart_sbci2(0.5, 0.5, 1e-3, 1.0, 0.05, 0.1, 3, cfg, mc);
    REQUIRE(r.has_value());
    CHECK(*r == RestartReason::NormOutOfRange);

    // stall has no alpha guard: fires even for the ground pair
    r = check_restart_sbci2(1e-4, 0.5, 1e-9, 1.0, 1.0, 0.1, 3, cfg, mc);
    REQUIRE(r.has_value());
    CHECK(*r == RestartReason::StallSmallB);
    r = check_restart_sbci2(0.5, 1e-4, 1e-9, 1.0, 1.0, 0.1, 3, cfg, mc);
    REQUIRE(r.has_value());
    CHECK(*r == RestartReason::StallSmallB);

    // healthy state
    CHECK_FALSE(check_restart_sbci2(1.0, 1.0, 1e-3, 1.0, 1.0, 0.1, 0, cfg, mc).has_value());

    // residual blow-up needs t > 0; cap at max_cycle = 10
    CHECK_FALSE(check_restart_sbci2(1.0, 1.0, 1e-3, 1.0, 1.0, 1.5, 0, cfg, mc).has_value());
    r = check_restart_sbci2(1.0, 1.0, 1e-3, 1.0, 1.0, 1.5, 1, cfg, mc);
    CHECK(*r == RestartReason::ResidualBlowup);
    r = check_restart_sbci2(1.0, 1.0, 1e-3, 1.0, 1.0, 0.1, 9, cfg, mc);
    CHECK(*r == RestartReason::MaxCycle);
}

TEST_CASE("solve_pair on a diagonal matrix: immediate convergence, carry is next eigenvector") {
    auto op = diag_operator({1.0, 2.0, 3.0, 4.0});
    GroundShiftPreconditioner pre(op.diagonal(), 1.0);
    DeflationSet defl;
    SolverConfig cfg;
    auto res = solve_pair(op, pre, defl, seed_of(op, {1, 0, 0, 0}), seed_of(op, {0, 1, 0, 0}), cfg);
    CHECK(res.pair.energy == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(res.carry.x[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.carry.energy == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two matvecs per pair iteration; full-budget bookkeeping") {
    auto op = gen_synthetic_ci_matrix(150, 31, 0.03);
    SolverConfig cfg;
    MemoryTraceSink sink;
    auto res = solve_n_states_sbci2(*op, 4, cfg, &sink);
    CHECK(res.summary.hx_refreshes == 0);

    long pair_iters = 0, single_iters = 0;
    std::uint64_t prev_mv = 0;
    int prev_state = -1, prev_t = -1;
    std::string prev_method;
    for (const auto& r : sink.records()) {
        if (r.method == "sbci2") ++pair_iters;
        else ++single_iters;
        if (prev_state == r.state && prev_method == r.method && r.t == prev_t + 1)
            CHECK(r.matvecs - prev_mv == (r.method == "sbci2" ? 2 : 1));
        prev_mv = r.matvecs;
        prev_state = r.state;
        prev_t = r.t;
        prev_method = r.method;
    }
    CHECK(res.summary.matvecs == 4 + 2 * static_cast<std::uint64_t>(pair_iters) +
                                     static_cast<std::uint64_t>(single_iters));
}

TEST_CASE("n-state ladder matches the oracle and sbci1") {
    auto op = gen_synthetic_ci_matrix(120, 61, 0.04);
    const auto es = oracle::eigensystem(oracle::densify(*op));
    SolverConfig cfg;
    auto r2 = solve_n_states_sbci2(*op, 4, cfg);
    auto r1 = solve_n_states_sbci1(*op, 4, cfg);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(r2.pairs[static_cast<std::size_t>(k)].energy -
                       es.values[static_cast<std::size_t>(k)]) <= 1e-8);
        CHECK(std::abs(r2.pairs[static_cast<std::size_t>(k)].energy -
                       r1.pairs[static_cast<std::size_t>(k)].energy) <= 1e-8);
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            CHECK(std::abs(dot(r2.pairs[static_cast<std::size_t>(i)].vector,
                               r2.pairs[static_cast<std::size_t>(j)].vector)) <= 1e-9);
}

TEST_CASE("n = 1 routes to the single-state driver") {
    auto op = gen_synthetic_ci_matrix(90, 41, 0.05);
    SolverConfig cfg;
    auto r2 = solve_n_states_sbci2(*op, 1, cfg);
    auto r1 = solve_n_states_sbci1(*op, 1, cfg);
    CHECK(r2.summary.method == "sbci2");
    CHECK(r2.pairs[0].energy == r1.pairs[0].energy);
}

TEST_CASE("near-degenerate pair: both states resolved orthogonally") {
    SyntheticSpec sp;
    sp.n = 120;
    sp.seed = 5;
    sp.density = 0.03;
    sp.degeneracy_split = 1e-8;
    auto op = gen_synthetic_ci_matrix(sp);
    const auto es = oracle::eigensystem(oracle::densify(*op));
    SolverConfig cfg;
    auto res = solve_n_states_sbci2(*op, 2, cfg);
    CHECK(std::abs(res.pairs[0].energy - es.values[0]) <= 1e-8);
    CHECK(std::abs(res.pairs[1].energy - es.values[1]) <= 1e-8);
    CHECK(std::abs(dot(res.pairs[0].vector, res.pairs[1].vector)) <= 1e-10);

    oracle::Matrix a(static_cast<Eigen::Index>(op->dim()), 2), b(static_cast<Eigen::Index>(op->dim()), 2);
    a.col(0) = oracle::to_eigen(res.pairs[0].vector);
    a.col(1) = oracle::to_eigen(res.pairs[1].vector);
    b.col(0) = es.vectors.col(0);
    b.col(1) = es.vectors.col(1);
    CHECK(oracle::principal_angle(a, b) <= 1e-5);
}

TEST_CASE("exactly degenerate pair: the span matches the oracle eigenspace") {
    SyntheticSpec sp;
    sp.n = 100;
    sp.seed = 8;
    sp.density = 0.04;
    sp.degeneracy_split = 0.0;
    auto op = gen_synthetic_ci_matrix(sp);
    const auto es = oracle::eigensystem(oracle::densify(*op));
    SolverConfig cfg;
    auto res = solve_n_states_sbci2(*op, 2, cfg);
    CHECK(std::abs(dot(res.pairs[0].vector, res.pairs[1].vector)) <= 1e-10);
    oracle::Matrix a(static_cast<Eigen::Index>(op->dim()), 2), b(static_cast<Eigen::Index>(op->dim()), 2);
    a.col(0) = oracle::to_eigen(res.pairs[0].vector);
    a.col(1) = oracle::to_eigen(res.pairs[1].vector);
    b.col(0) = es.vectors.col(0);
    b.col(1) = es.vectors.col(1);
    CHECK(oracle::principal_angle(a, b) <= 1e-6);
}
