#include <gtest/gtest.h>

#include <cmath>

#include "poromfe/mms.hpp"

using namespace poromfe;

namespace {

TEST(ParamSets, TablesHaveTheListedValues) {
    const auto s1 = param_set("test1-soft");
    EXPECT_EQ(s1.lambda, 0.1);
    EXPECT_EQ(s1.mu, 0.1);
    EXPECT_EQ(s1.alpha, 1e-5);
    EXPECT_EQ(s1.c0, 2.0);
    EXPECT_EQ(s1.permeability(0, 0), 1e-3);
    const auto s2 = param_set("test1-stiff");
    EXPECT_EQ(s2.lambda, 1e3);
    EXPECT_EQ(s2.mu, 1e3);
    EXPECT_EQ(s2.c0, 1.0);
    const auto s3 = param_set("test2-soft");
    EXPECT_EQ(s3.mu, 10.0);
    EXPECT_EQ(s3.alpha, 1e-4);
    EXPECT_EQ(s3.c0, 20.0);
    EXPECT_EQ(s3.permeability(1, 1), 0.1);
    EXPECT_EQ(s3.permeability(0, 1), 0.0);
    for (const auto& n : param_set_names()) EXPECT_NO_THROW(param_set(n).validate());
    EXPECT_THROW(param_set("nope"), std::invalid_argument);
}

TEST(ParamSets, YoungsModulusAndPoissonRatioAreConsistent) {
    // E = mu (3 lambda + 2 mu) / (lambda + mu), nu = lambda / (2 (lambda + mu))
    auto e = [](const ModelParams& p) { return p.mu * (3 * p.lambda + 2 * p.mu) / (p.lambda + p.mu); };
    auto nu = [](const ModelParams& p) { return p.lambda / (2 * (p.lambda + p.mu)); };
    EXPECT_NEAR(e(param_set("test1-soft")), 0.25, 1e-12);
    EXPECT_NEAR(nu(param_set("test1-soft")), 0.25, 1e-12);
    EXPECT_NEAR(e(param_set("test1-stiff")), 2500.0, 1e-9);
    EXPECT_NEAR(e(param_set("test2-soft")), 20.099, 1e-3);
    EXPECT_NEAR(nu(param_set("test2-soft")), 0.00495, 1e-5);
}

class Audit : public ::testing::TestWithParam<std::pair<const char*, const char*>> {};

TEST_P(Audit, SourcesAgreeWithExactFields) {
    const auto [scenario, params] = GetParam();
    const auto r = audit(make_scenario(scenario, param_set(params)), 25);
    EXPECT_EQ(r.samples, 25);
    EXPECT_LE(r.body_force, 1e-7);
    EXPECT_LE(r.flow_source, 1e-7);
    EXPECT_LE(r.traction, 1e-7);
}

INSTANTIATE_TEST_SUITE_P(All, Audit,
                         ::testing::Values(std::pair{"test1", "test1-soft"}, std::pair{"test1", "test1-stiff"},
                                           std::pair{"test2", "test2-soft"}, std::pair{"test2", "test2-stiff"}));

TEST(Audit, DetectsAWrongSource) {
    Scenario s = test1(param_set("test1-soft"));
    const auto phi = s.flow_source;
    s.flow_source = [phi](Point x, double t) { return phi(x, t) + 1e-3; };
    EXPECT_FALSE(audit(s).passed(1e-6));
    EXPECT_THROW(audit(pure_flux(param_set("test1-soft"), 1.0)), std::invalid_argument);
}

TEST(Scenarios, ExactFieldsAtSamplePoints) {
    const auto s1 = test1(param_set("test1-soft"));
    const Point x{0.3, 0.6};
    EXPECT_NEAR(s1.exact_u(x, 2.0).x, 0.09, 1e-15);
    EXPECT_NEAR(s1.exact_u(x, 2.0).y, 0.36, 1e-15);
    EXPECT_NEAR(s1.exact_p(x, 2.0), 2.0 * std::exp(0.9), 1e-14);
    EXPECT_NEAR(s1.exact_grad_u(x, 2.0)(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(s1.exact_grad_p(x, 2.0).y, 2.0 * std::exp(0.9), 1e-14);
    EXPECT_EQ(s1.p0(x, 0.0), 0.0);
    const auto s2 = test2(param_set("test2-soft"));
    EXPECT_NEAR(s2.exact_u(x, 2.0).x, 0.18, 1e-15);
    EXPECT_NEAR(s2.exact_p(x, 1.0), std::sin(0.9) * std::exp(1.0), 1e-14);
    EXPECT_NEAR(s2.p0(x, 0.0), std::sin(0.9), 1e-15);
    EXPECT_EQ(s2.u0(x, 0.0), (Vec2{0.0, 0.0}));
    EXPECT_TRUE(s1.has_exact_solution());
}

TEST(Scenarios, BoundaryLayout) {
    const auto s = test1(param_set("test1-soft"));
    ASSERT_EQ(s.u_dirichlet.size(), 2u);
    ASSERT_TRUE(s.p_dirichlet.has_value());
    EXPECT_EQ(s.p_dirichlet->tags.size(), 4u);
    const auto d = s.load_data();
    // u1 fixed on x = 0, 1 and u2 on y = 0, 1: traction acts on the complementary components.
    EXPECT_EQ(d.traction_active[0], (std::array<bool, 2>{false, true}));
    EXPECT_EQ(d.traction_active[1], (std::array<bool, 2>{true, false}));
    EXPECT_EQ(d.traction_active[2], (std::array<bool, 2>{false, true}));
    EXPECT_EQ(d.traction_active[3], (std::array<bool, 2>{true, false}));
    EXPECT_EQ(d.flux_active, (std::array<bool, 4>{false, false, false, false}));
}

TEST(Scenarios, PureFluxHasNaturalConditionsEverywhere) {
    const auto s = pure_flux(param_set("test1-soft"), 1.0, 0.5);
    EXPECT_TRUE(s.u_dirichlet.empty());
    EXPECT_FALSE(s.p_dirichlet.has_value());
    EXPECT_FALSE(s.has_exact_solution());
    EXPECT_EQ(s.final_time, 0.5);
    EXPECT_EQ(s.flow_source({0.2, 0.2}, 0.1), 1.0);
    const auto d = s.load_data();
    for (int k = 0; k < 4; ++k) {
        EXPECT_TRUE(d.flux_active[k]);
        EXPECT_TRUE(d.traction_active[k][0] && d.traction_active[k][1]);
    }
    for (const auto& name : scenario_names()) EXPECT_NO_THROW(make_scenario(name, param_set("test1-soft")));
    EXPECT_THROW(make_scenario("bogus", param_set("test1-soft")), std::invalid_argument);
}

TEST(GreenStress, ReducesToLinearElasticityForSmallGradients) {
    ModelParams p;
    p.lambda = 2.0;
    p.mu = 3.0;
    const Mat2 g{{1e-8, 2e-8, -1e-8, 3e-8}};
    const Mat2 s = green_stress(g, p);
    const Mat2 lin = p.mu * sym(g) + p.lambda * trace(g) * Mat2::identity();
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.m[i], lin.m[i], 1e-14);
}

}  // namespace
