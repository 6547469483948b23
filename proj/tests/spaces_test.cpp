#include <gtest/gtest.h>

#include <set>

#include "poromfe/elements.hpp"
#include "poromfe/spaces.hpp"

using namespace poromfe;

namespace {

TEST(DofMap, Counts) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap p1(m, SpaceKind::ScalarP1), p2(m, SpaceKind::ScalarP2), v2(m, SpaceKind::VectorP2);
    EXPECT_EQ(p1.num_dofs(), 16);
    EXPECT_EQ(p2.num_dofs(), 16 + 33);
    EXPECT_EQ(v2.num_dofs(), 2 * (16 + 33));
    EXPECT_EQ(v2.dofs_per_cell(), 12);
    EXPECT_EQ(p1.num_cells(), 18);
}

TEST(DofMap, CellNodesMatchReferenceNodes) {
    const Mesh m = build_uniform_mesh(2);
    const DofMap d(m, SpaceKind::VectorP2);
    const auto ref = reference_nodes(ElementKind::P2);
    for (int c = 0; c < d.num_cells(); ++c) {
        const auto map = affine_map(m, c);
        const auto nodes = d.cell_nodes(c);
        const auto dofs = d.cell_dofs(c);
        for (int k = 0; k < 6; ++k) {
            EXPECT_LT(norm(map.map(ref[k]) - d.node_coord(nodes[k])), 1e-15);
            EXPECT_EQ(dofs[2 * k], d.dof(nodes[k], 0));
            EXPECT_EQ(dofs[2 * k + 1], d.dof(nodes[k], 1));
        }
    }
}

TEST(Interpolation, ReproducesPolynomialsOfTheSpace) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap p1(m, SpaceKind::ScalarP1), v2(m, SpaceKind::VectorP2);
    const ScalarField lin = [](Point p, double) { return 1.0 + 2.0 * p.x - 0.5 * p.y; };
    const VectorField quad = [](Point p, double) { return Vec2{p.x * p.x - p.x * p.y, 3.0 * p.y * p.y + p.x}; };
    const Vector a = interpolate(p1, lin, 0.0);
    const Vector b = interpolate(v2, quad, 0.0);
    const Point ref[] = {{0.2, 0.2}, {0.1, 0.7}, {0.45, 0.45}};
    for (int c = 0; c < m.num_triangles(); ++c) {
        const auto map = affine_map(m, c);
        for (Point r : ref) {
            const Point x = map.map(r);
            const auto s = sample_scalar(m, p1, a, c, r);
            EXPECT_NEAR(s.value, lin(x, 0.0), 1e-14);
            EXPECT_NEAR(s.grad.x, 2.0, 1e-13);
            EXPECT_NEAR(s.grad.y, -0.5, 1e-13);
            const auto v = sample_vector(m, v2, b, c, r);
            EXPECT_NEAR(v.value.x, quad(x, 0.0).x, 1e-14);
            EXPECT_NEAR(v.value.y, quad(x, 0.0).y, 1e-14);
            EXPECT_NEAR(v.grad(0, 0), 2.0 * x.x - x.y, 1e-13);
            EXPECT_NEAR(v.grad(0, 1), -x.x, 1e-13);
            EXPECT_NEAR(v.grad(1, 0), 1.0, 1e-13);
            EXPECT_NEAR(v.grad(1, 1), 6.0 * x.y, 1e-13);
        }
    }
}

TEST(Dirichlet, SetsCoverTaggedSidesIncludingCorners) {
    const Mesh m = build_uniform_mesh(4);
    const DofMap v2(m, SpaceKind::VectorP2), p1(m, SpaceKind::ScalarP1);
    const std::array<BoundaryTag, 2> lr{BoundaryTag::Gamma1, BoundaryTag::Gamma3};
    const auto cs = dirichlet_set(m, v2, lr, 0, [](Point p, double t) { return p.y + t; });
    // Each vertical side has 5 vertices and 4 midpoints.
    EXPECT_EQ(cs.size(), 18u);
    std::set<int> dofs;
    for (const auto& c : cs.entries()) {
        EXPECT_EQ(c.component, 0);
        EXPECT_EQ(c.dof % 2, 0);
        EXPECT_TRUE(c.coord.x == 0.0 || c.coord.x == 1.0);
        dofs.insert(c.dof);
    }
    EXPECT_EQ(dofs.size(), cs.size());
    Vector x(v2.num_dofs(), -7.0);
    cs.apply(x, 2.0);
    for (const auto& c : cs.entries()) EXPECT_DOUBLE_EQ(x[c.dof], c.coord.y + 2.0);

    const std::array<BoundaryTag, 4> all{BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3,
                                         BoundaryTag::Gamma4};
    EXPECT_EQ(dirichlet_set(m, p1, all, 0, [](Point, double) { return 0.0; }).size(), 16u);
}

TEST(Dirichlet, MergeKeepsFirstValue) {
    const Mesh m = build_uniform_mesh(2);
    const DofMap p1(m, SpaceKind::ScalarP1);
    const std::array<BoundaryTag, 1> right{BoundaryTag::Gamma1};
    const std::array<BoundaryTag, 1> bottom{BoundaryTag::Gamma2};
    const auto a = dirichlet_set(m, p1, right, 0, [](Point, double) { return 1.0; });
    const auto b = dirichlet_set(m, p1, bottom, 0, [](Point, double) { return 2.0; });
    const auto u = ConstraintSet::merge(a, b);
    EXPECT_EQ(u.size(), 5u);
    Vector x(p1.num_dofs(), 0.0);
    u.apply(x, 0.0);
    for (const auto& c : u.entries())
        EXPECT_DOUBLE_EQ(x[c.dof], c.coord.x == 1.0 ? 1.0 : 2.0);
}

TEST(RigidMotions, BasisIsExactInterpolant) {
    const Mesh m = build_uniform_mesh(3);
    const DofMap v2(m, SpaceKind::VectorP2);
    const auto rm = rigid_motion_basis(v2);
    for (int node = 0; node < v2.num_nodes(); ++node) {
        const Point x = v2.node_coord(node);
        EXPECT_EQ(rm.fields[0][v2.dof(node, 0)], 1.0);
        EXPECT_EQ(rm.fields[0][v2.dof(node, 1)], 0.0);
        EXPECT_EQ(rm.fields[1][v2.dof(node, 1)], 1.0);
        EXPECT_DOUBLE_EQ(rm.fields[2][v2.dof(node, 0)], -x.y);
        EXPECT_DOUBLE_EQ(rm.fields[2][v2.dof(node, 1)], x.x);
    }
    // Rotation has a skew gradient, so zero strain.
    const auto s = sample_vector(m, v2, rm.fields[2], 4, {0.3, 0.3});
    EXPECT_NEAR(s.grad(0, 0), 0.0, 1e-14);
    EXPECT_NEAR(s.grad(0, 1) + s.grad(1, 0), 0.0, 1e-14);
}

}  // namespace
