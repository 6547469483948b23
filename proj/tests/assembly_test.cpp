#include <gtest/gtest.h>

#include <random>

#include "poromfe/assembly.hpp"
#include "poromfe/elements.hpp"

using namespace poromfe;

namespace {

Mat2 random_grad(std::mt19937& rng, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    return Mat2{{u(rng), u(rng), u(rng), u(rng)}};
}

// Unit square split along the anti-diagonal. The second triangle is the
// point reflection of the reference triangle, so both local matrices coincide.
Mesh reference_pair() {
    return Mesh({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {3, 2, 1}}, Rectangle{});
}

std::array<std::array<double, 4>, 4> scatter(const double local[3][3]) {
    std::array<std::array<double, 4>, 4> g{};
    const int map[2][3] = {{0, 1, 2}, {3, 2, 1}};
    for (const auto& m : map)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g[m[i]][m[j]] += local[i][j];
    return g;
}

TEST(Oracle, P1MassAndStiffnessOnReferenceTriangle) {
    const double mass[3][3] = {{2.0 / 24, 1.0 / 24, 1.0 / 24}, {1.0 / 24, 2.0 / 24, 1.0 / 24},
                               {1.0 / 24, 1.0 / 24, 2.0 / 24}};
    const double stiff[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    const Mesh m = reference_pair();
    const DofMap p1(m, SpaceKind::ScalarP1);
    ModelParams prm;
    prm.permeability = Mat2::identity();
    prm.mu_f = 1.0;
    const auto M = assemble_mass(m, p1);
    const auto S = assemble_diffusion(m, p1, prm);
    const auto gm = scatter(mass), gs = scatter(stiff);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            EXPECT_NEAR(M.at(i, j), gm[i][j], 1e-14);
            EXPECT_NEAR(S.at(i, j), gs[i][j], 1e-14);
        }
}

TEST(Oracle, NonlinearStressMatchesGreenStrainRoute) {
    std::mt19937 rng(11);
    ModelParams prm;
    prm.lambda = 0.7;
    prm.mu = 1.3;
    for (int k = 0; k < 100; ++k) {
        const Mat2 g = random_grad(rng, 1.0);
        // E = sym(G) + G^T G, stress mu E + lambda tr(E) I, minus lambda div u I.
        double e[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                e[i][j] = 0.5 * (g(i, j) + g(j, i)) + g(0, i) * g(0, j) + g(1, i) * g(1, j);
        const double tr_e = e[0][0] + e[1][1];
        const double div = g(0, 0) + g(1, 1);
        const Mat2 n = nonlinear_stress(g, prm);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double ref = prm.mu * e[i][j] + (i == j ? prm.lambda * (tr_e - div) : 0.0);
                EXPECT_NEAR(n(i, j), ref, 1e-13);
            }
    }
}

TEST(NonlinearStress, DerivativeMatchesCentralDifference) {
    std::mt19937 rng(5);
    ModelParams prm;
    prm.lambda = 2.0;
    prm.mu = 0.5;
    for (int k = 0; k < 20; ++k) {
        const Mat2 g = random_grad(rng, 0.5), w = random_grad(rng, 1.0);
        const double h = 1e-6;
        const Mat2 fd = (1.0 / (2 * h)) * (nonlinear_stress(g + h * w, prm) - nonlinear_stress(g - h * w, prm));
        const Mat2 d = nonlinear_stress_derivative(g, w, prm);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(d.m[i], fd.m[i], 1e-8);
    }
}

TEST(NonlinearStress, IsSymmetricAndLinearPartIsStrain) {
    ModelParams prm;
    const Mat2 g{{0.1, 0.3, -0.2, 0.05}};
    const Mat2 n = nonlinear_stress(g, prm);
    EXPECT_DOUBLE_EQ(n(0, 1), n(1, 0));
    const Mat2 d0 = nonlinear_stress_derivative(Mat2{}, g, prm);
    const Mat2 e = prm.mu * sym(g);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(d0.m[i], e.m[i], 1e-16);
}

Vector random_field(const DofMap& v2, std::mt19937& rng, double amp) {
    std::uniform_real_distribution<double> u(-amp, amp);
    Vector x(v2.num_dofs());
    for (auto& v : x) v = u(rng);
    return x;
}

TEST(Jacobian, MatchesFiniteDifferencesOfResidual) {
    const Mesh m = build_uniform_mesh(2);
    const DofMap v2(m, SpaceKind::VectorP2);
    ModelParams prm;
    prm.lambda = 1.5;
    prm.mu = 0.8;
    std::mt19937 rng(2);
    const Vector u = random_field(v2, rng, 0.1);
    const auto J = assemble_newton_jacobian(m, v2, u, prm);
    const double h = 1e-6;
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < v2.num_dofs(); ++j) {
        Vector up = u, um = u;
        up[j] += h;
        um[j] -= h;
        const Vector rp = assemble_nonlinear_residual(m, v2, up, prm);
        const Vector rm = assemble_nonlinear_residual(m, v2, um, prm);
        for (int i = 0; i < v2.num_dofs(); ++i) {
            const double fd = (rp[i] - rm[i]) / (2 * h);
            err = std::max(err, std::abs(J.at(i, j) - fd));
            scale = std::max(scale, std::abs(fd));
        }
    }
    EXPECT_LE(err / scale, 1e-8);
}

TEST(Residual, RigidMotionsAreInTheKernelOfTheLinearPart) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2);
    ModelParams prm;
    const auto rm = rigid_motion_basis(v2);
    for (int k = 0; k < 2; ++k) {
        const Vector r = assemble_nonlinear_residual(m, v2, rm.fields[k], prm);
        EXPECT_LE(norm2(r), 1e-14);
    }
}

TEST(Residual, ParallelKernelsAreBitwiseIdentical) {
    const Mesh m = build_uniform_mesh(6);
    const DofMap v2(m, SpaceKind::VectorP2);
    ModelParams prm;
    std::mt19937 rng(9);
    const Vector u = random_field(v2, rng, 0.05);
    EXPECT_EQ(assemble_nonlinear_residual(m, v2, u, prm, ExecPolicy::Serial),
              assemble_nonlinear_residual(m, v2, u, prm, ExecPolicy::Parallel));
    EXPECT_EQ(element_jacobians(m, v2, u, prm, ExecPolicy::Serial),
              element_jacobians(m, v2, u, prm, ExecPolicy::Parallel));
    EXPECT_EQ(assemble_newton_jacobian(m, v2, u, prm, ExecPolicy::Serial).values(),
              assemble_newton_jacobian(m, v2, u, prm, ExecPolicy::Parallel).values());
}

TEST(Divergence, IntegratesDivergenceAgainstP1) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2), p1(m, SpaceKind::ScalarP1);
    const auto B = assemble_div(m, v2, p1);
    EXPECT_EQ(B.rows(), p1.num_dofs());
    EXPECT_EQ(B.cols(), v2.num_dofs());
    // u = (x^2, x y): div u = 3x, so (div u, 1) = 3/2 and (div u, y) = 3/4.
    const Vector u = interpolate(v2, VectorField([](Point p, double) { return Vec2{p.x * p.x, p.x * p.y}; }), 0.0);
    const Vector one(p1.num_dofs(), 1.0);
    const Vector y = interpolate(p1, ScalarField([](Point p, double) { return p.y; }), 0.0);
    const Vector bu = spmv(B, u);
    EXPECT_NEAR(dot(bu, one), 1.5, 1e-14);
    EXPECT_NEAR(dot(bu, y), 0.75, 1e-14);
}

TEST(Mass, VectorAndScalarTotals) {
    const Mesh m = build_uniform_mesh(4, Rectangle{0, 0, 2, 1});
    const DofMap p1(m, SpaceKind::ScalarP1), v2(m, SpaceKind::VectorP2);
    const auto M1 = assemble_mass(m, p1, 3.0);
    const Vector one1(p1.num_dofs(), 1.0);
    EXPECT_NEAR(dot(one1, spmv(M1, one1)), 6.0, 1e-13);
    const auto M2 = assemble_mass(m, v2);
    const Vector x = interpolate(v2, VectorField([](Point p, double) { return Vec2{p.x, p.y}; }), 0.0);
    // |x|^2 over [0,2]x[0,1]: 8/3 + 2/3
    EXPECT_NEAR(dot(x, spmv(M2, x)), 10.0 / 3.0, 1e-13);
}

TEST(Loads, ConstantDataIntegrateToAreaAndLength) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2), p1(m, SpaceKind::ScalarP1);
    ModelParams prm;
    LoadData d;
    d.body_force = [](Point, double t) { return Vec2{2.0 * t, -1.0}; };
    d.flow_source = [](Point, double) { return 0.5; };
    d.traction = [](Point, Vec2 n, double) { return n; };
    d.flux = [](Point, Vec2, double) { return 4.0; };
    d.traction_active[0] = {true, true};  // x = 1 only
    d.flux_active = {false, true, false, false};  // y = 0 only
    const auto loads = assemble_loads(m, v2, p1, prm, d, 3.0);
    const auto rm = rigid_motion_basis(v2);
    // (f, e1) + <n, e1> on x = 1 is 6 + 1; (f, e2) is -1.
    EXPECT_NEAR(dot(loads.u, rm.fields[0]), 7.0, 1e-13);
    EXPECT_NEAR(dot(loads.u, rm.fields[1]), -1.0, 1e-13);
    const Vector one(p1.num_dofs(), 1.0);
    EXPECT_NEAR(dot(loads.flow, one), 0.5 + 4.0, 1e-13);
}

TEST(Loads, GravityEntersThroughThePressureGradient) {
    const Mesh m = build_uniform_mesh(2);
    const DofMap v2(m, SpaceKind::VectorP2), p1(m, SpaceKind::ScalarP1);
    ModelParams prm;
    prm.rho_f = 2.0;
    prm.gravity = {0.0, -1.0};
    prm.permeability = 0.5 * Mat2::identity();
    LoadData d;
    const auto loads = assemble_loads(m, v2, p1, prm, d, 0.0);
    // (K rho g, grad y) = 0.5 * 2 * (-1) over the unit square.
    const Vector y = interpolate(p1, ScalarField([](Point p, double) { return p.y; }), 0.0);
    EXPECT_NEAR(dot(loads.flow, y), -1.0, 1e-14);
}

TEST(RigidMotionCoupling, ColumnsAreL2Moments) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2);
    const auto R = assemble_rigid_motion_coupling(m, v2);
    EXPECT_EQ(R.cols(), 3);
    const Vector u = interpolate(v2, VectorField([](Point p, double) { return Vec2{1.0, p.x}; }), 0.0);
    Vector col(v2.num_dofs());
    std::array<double, 3> moments{};
    for (int i = 0; i < R.rows(); ++i)
        for (int k = R.row_ptr()[i]; k < R.row_ptr()[i + 1]; ++k) moments[R.col_idx()[k]] += R.values()[k] * u[i];
    // (u,(1,0)) = 1, (u,(0,1)) = 1/2, (u,(-y,x)) = -1/2 + 1/3
    EXPECT_NEAR(moments[0], 1.0, 1e-14);
    EXPECT_NEAR(moments[1], 0.5, 1e-14);
    EXPECT_NEAR(moments[2], -1.0 / 6.0, 1e-14);
}

TEST(Monotonicity, PairingNonnegativeForSmallGradients) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2);
    ModelParams prm;
    std::mt19937 rng(4);
    for (int k = 0; k < 20; ++k) {
        const Vector u = random_field(v2, rng, 0.02), v = random_field(v2, rng, 0.02);
        const auto s = monotonicity_sample(m, v2, u, v, prm);
        EXPECT_GE(s.pairing, 0.0);
        EXPECT_GT(s.strain_diff_norm, 0.0);
        EXPECT_TRUE(std::isfinite(s.stress_diff_norm / s.strain_diff_norm));
    }
}

TEST(Pairing, FullGradientFormAgreesWithResidual) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2);
    ModelParams prm;
    std::mt19937 rng(8);
    const Vector u = random_field(v2, rng, 0.1), v = random_field(v2, rng, 1.0);
    EXPECT_NEAR(pairing_full_gradient(m, v2, u, v, prm), dot(assemble_nonlinear_residual(m, v2, u, prm), v), 1e-13);
}

TEST(StrainNorm, OfLinearField) {
    const Mesh m = build_uniform_mesh(2);
    const DofMap v2(m, SpaceKind::VectorP2);
    // u = (x, 0): eps = diag(1, 0)
    const Vector u = interpolate(v2, VectorField([](Point p, double) { return Vec2{p.x, 0.0}; }), 0.0);
    EXPECT_NEAR(strain_norm(m, v2, u), 1.0, 1e-14);
}

TEST(Params, CouplingCoefficientsInvertTheChangeOfVariables) {
    ModelParams p;
    p.lambda = 0.3;
    p.alpha = 0.7;
    p.c0 = 1.1;
    const double pr = 0.4, div = -0.2;
    const double xi = p.alpha * pr - p.lambda * div, eta = p.c0 * pr + p.alpha * div;
    EXPECT_NEAR(p.kappa1() * xi + p.kappa2() * eta, pr, 1e-15);
    EXPECT_NEAR(p.kappa1() * eta - p.kappa3() * xi, div, 1e-15);
    p.c0 = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
