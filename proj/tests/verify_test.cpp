#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "poromfe/stepper.hpp"
#include "poromfe/verify.hpp"

using namespace poromfe;

namespace {

TEST(ScalarErrors, ZeroFieldAgainstExponential) {
    // |e^{x+y}|_{L2}^2 over the unit square is ((e^2 - 1) / 2)^2.
    const Mesh m = build_uniform_mesh(4);
    const DofMap p1(m, SpaceKind::ScalarP1);
    const ScalarField p = [](Point x, double t) { return t * std::exp(x.x + x.y); };
    const auto grad = [](Point x, double t) { return Vec2{t * std::exp(x.x + x.y), t * std::exp(x.x + x.y)}; };
    const auto e = scalar_errors(m, p1, Vector(p1.num_dofs(), 0.0), p, grad, 1.0);
    const double l2 = (std::exp(2.0) - 1.0) / 2.0;
    EXPECT_NEAR(e[0], l2, 1e-6 * l2);
    EXPECT_NEAR(e[1], std::sqrt(3.0) * l2, 1e-6 * l2);
}

TEST(ScalarErrors, InterpolationErrorQuartersWithHalvedMesh) {
    const ScalarField p = [](Point x, double) { return std::exp(x.x + x.y); };
    const auto grad = [](Point x, double) { return Vec2{std::exp(x.x + x.y), std::exp(x.x + x.y)}; };
    std::array<double, 2> prev{};
    for (int n : {6, 12, 24}) {
        const Mesh m = build_uniform_mesh(n);
        const DofMap p1(m, SpaceKind::ScalarP1);
        const auto e = scalar_errors(m, p1, interpolate(p1, p, 0.0), p, grad, 0.0);
        if (n > 6) {
            EXPECT_GE(prev[0] / e[0], 3.6);
            EXPECT_LE(prev[0] / e[0], 4.4);
            EXPECT_NEAR(prev[1] / e[1], 2.0, 0.1);
        }
        prev = e;
    }
}

TEST(ErrorNorms, VanishForInterpolatedExactPolynomials) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2), p1(m, SpaceKind::ScalarP1);
    ExactSolution ex;
    ex.u = [](Point x, double t) { return Vec2{t * x.x * x.y, x.y * x.y}; };
    ex.grad_u = [](Point x, double t) { return Mat2{{t * x.y, t * x.x, 0.0, 2 * x.y}}; };
    ex.p = [](Point x, double) { return 2.0 - x.x; };
    ex.grad_p = [](Point, double) { return Vec2{-1.0, 0.0}; };
    const auto e = error_norms(m, v2, p1, interpolate(v2, ex.u, 2.0), interpolate(p1, ex.p, 2.0), ex, 2.0);
    EXPECT_LE(e.l2_u, 1e-14);
    EXPECT_LE(e.h1_u, 1e-13);
    EXPECT_LE(e.l2_p, 1e-14);
    EXPECT_LE(e.h1_p, 1e-13);
    EXPECT_DOUBLE_EQ(e.h, 1.0 / 3.0);
}

TEST(RateTable, RecoversKnownOrders) {
    std::vector<int> n{3, 6, 12, 24};
    std::vector<std::array<double, 4>> err;
    for (int k : n) {
        const double h = 1.0 / k;
        err.push_back({h * h * h, h * h, 5 * h * h, 2 * h});
    }
    const auto t = make_rate_table(n, err);
    ASSERT_EQ(t.rows.size(), 4u);
    for (double r : t.rows[0].rate) EXPECT_TRUE(std::isnan(r));
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_NEAR(t.rows[i].rate[0], 3.0, 1e-12);
        EXPECT_NEAR(t.rows[i].rate[1], 2.0, 1e-12);
        EXPECT_NEAR(t.rows[i].rate[2], 2.0, 1e-12);
        EXPECT_NEAR(t.rows[i].rate[3], 1.0, 1e-12);
        // Self-consistency: e_{i-1} / e_i = (h_{i-1} / h_i)^rate
        for (int c = 0; c < 4; ++c)
            EXPECT_NEAR(t.rows[i - 1].error[c] / t.rows[i].error[c],
                        std::pow(t.rows[i - 1].h / t.rows[i].h, t.rows[i].rate[c]), 1e-12);
    }
}

TEST(Study, RejectsSingleLevel) {
    StudyConfig c;
    c.levels = {4};
    EXPECT_THROW(convergence_study(c), std::invalid_argument);
    c.levels = {2, 4};
    c.scenario = "flux";
    EXPECT_THROW(convergence_study(c), std::invalid_argument);
}

TEST(Study, ConcurrentLevelsMergeDeterministically) {
    StudyConfig c;
    c.scenario = "test2";
    c.params = param_set("test2-soft");
    c.levels = {2, 4, 3};
    c.final_time = 0.25;
    c.dt = 1.0 / 16;
    const auto a = convergence_study(c);
    c.jobs = 3;
    const auto b = convergence_study(c);
    ASSERT_TRUE(a.complete);
    ASSERT_EQ(a.levels.size(), 3u);
    EXPECT_EQ(a.levels[2].n, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a.table.rows[i].n, b.table.rows[i].n);
        EXPECT_EQ(a.table.rows[i].error, b.table.rows[i].error);
        EXPECT_EQ(a.levels[i].steps, 4);
    }
}

TEST(Study, DefaultTimeStepPolicy) {
    EXPECT_EQ(default_dt_factor(1), 0.5);
    EXPECT_EQ(default_dt_factor(0), 1.0);
    StudyConfig c;
    c.levels = {2, 4};
    c.final_time = 0.25;
    const auto r = convergence_study(c);
    EXPECT_DOUBLE_EQ(r.levels[0].dt, 0.125);
    EXPECT_DOUBLE_EQ(r.levels[1].dt, 1.0 / 32);
}

SchemeConfig scheme(int theta, double dt, double final_time) {
    SchemeConfig c;
    c.theta = theta;
    c.dt = dt;
    c.final_time = final_time;
    return c;
}

class PureFluxMonitors : public ::testing::TestWithParam<int> {};

TEST_P(PureFluxMonitors, ConservationResidualsVanish) {
    const int theta = GetParam();
    ModelParams prm = param_set("test1-soft");
    prm.alpha = 0.5;  // strong coupling so every identity is exercised
    MfeaSolver solver(build_uniform_mesh(4), pure_flux(prm, 1.0, 0.5), scheme(theta, 1.0 / 16, 0.5));
    const auto traj = run(solver);
    const auto log = monitor_trajectory(solver, traj, {});
    ASSERT_EQ(log.rows.size(), 8u);
    for (const auto& r : log.rows) {
        EXPECT_LE(std::abs(r.conservation.eta), 1e-12);
        EXPECT_LE(std::abs(r.conservation.xi), 1e-10);
        EXPECT_LE(std::abs(r.conservation.flux), 1e-10);
    }
}

INSTANTIATE_TEST_SUITE_P(Theta, PureFluxMonitors, ::testing::Values(0, 1));

TEST(EnergyIdentity, HoldsForZeroDataFromRandomState) {
    for (int theta : {1, 0}) {
        ModelParams prm = param_set("test1-soft");
        prm.alpha = 0.3;
        MfeaSolver solver(build_uniform_mesh(4), make_scenario("zero", prm), scheme(theta, 1.0 / 64, 10.0 / 64));
        std::mt19937 rng(21);
        std::uniform_real_distribution<double> d(-0.005, 0.005);
        Vector u0(solver.displacement_space().num_dofs()), p0(solver.pressure_space().num_dofs());
        for (auto& v : u0) v = d(rng);
        for (auto& v : p0) v = d(rng);
        Monitor mon(solver, {});
        SystemState s = solver.initialize(u0, p0);
        for (int k = 0; k < 10; ++k) {
            StepReport rep;
            SystemState next = solver.step(s, &rep);
            mon.observe(s, next, rep);
            s = std::move(next);
        }
        // The decoupled identity lags one step and holds from the second row on.
        for (std::size_t i = theta == 1 ? 0 : 1; i < mon.log().rows.size(); ++i) {
            EXPECT_LE(mon.log().rows[i].energy_residual, 1e-8) << "theta " << theta << " row " << i;
            EXPECT_GT(mon.log().rows[i].energy_scale, 0.0);
        }
        // Without data J is nonincreasing in time.
        const auto& rows = mon.log().rows;
        for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].J, rows[i - 1].J * (1 + 1e-12));
    }
}

TEST(Monitor, MarginsHaveOneEntryPerRow) {
    MonitorLog log;
    log.rows.resize(3);
    log.rows[0].J = 2.0;
    log.rows[1].J = 1.5;
    log.rows[1].S = 0.25;
    log.rows[2].J = 1.0;
    log.rows[2].S = 1.5;
    const auto m = log.margins();
    ASSERT_EQ(m.size(), 3u);
    EXPECT_DOUBLE_EQ(m[1], 0.25);
    EXPECT_DOUBLE_EQ(m[2], -0.5);
}

}  // namespace
