#include "poromfe/spaces.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace poromfe {

DofMap::DofMap(const Mesh& mesh, SpaceKind kind) : kind_(kind), num_vertices_(mesh.num_vertices()) {
    node_coords_ = mesh.vertices();
    if (kind_ != SpaceKind::ScalarP1)
        for (int e = 0; e < mesh.num_edges(); ++e) node_coords_.push_back(mesh.edge_midpoint(e));

    const int npc = nodes_per_cell();
    cell_nodes_.reserve(static_cast<std::size_t>(mesh.num_triangles()) * npc);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int v : mesh.triangles()[t]) cell_nodes_.push_back(v);
        if (npc == 6)
            for (int e : mesh.triangle_edges()[t]) cell_nodes_.push_back(num_vertices_ + e);
    }

    const int nc = components();
    cell_dofs_.reserve(cell_nodes_.size() * nc);
    for (int node : cell_nodes_)
        for (int c = 0; c < nc; ++c) cell_dofs_.push_back(node * nc + c);
}

std::vector<int> DofMap::edge_nodes(const Mesh& mesh, int edge) const {
    const auto& e = mesh.edges()[edge];
    std::vector<int> nodes{e[0], e[1]};
    if (kind_ != SpaceKind::ScalarP1) nodes.push_back(num_vertices_ + edge);
    return nodes;
}

DofMap build_dof_map(const Mesh& mesh, SpaceKind kind) { return DofMap(mesh, kind); }

ConstraintSet::ConstraintSet(std::vector<Constraint> entries, ScalarField value)
    : entries_(std::move(entries)), value_(entries_.size(), value) {}

std::vector<double> ConstraintSet::values(double t) const {
    std::vector<double> out(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) out[i] = value_[i](entries_[i].coord, t);
    return out;
}

void ConstraintSet::apply(Vector& x, double t) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) x[entries_[i].dof] = value_[i](entries_[i].coord, t);
}

ConstraintSet ConstraintSet::merge(const ConstraintSet& a, const ConstraintSet& b) {
    ConstraintSet out = a;
    std::set<int> seen;
    for (const auto& c : a.entries_) seen.insert(c.dof);
    for (std::size_t i = 0; i < b.entries_.size(); ++i) {
        if (!seen.insert(b.entries_[i].dof).second) continue;
        out.entries_.push_back(b.entries_[i]);
        out.value_.push_back(b.value_[i]);
    }
    // keep dof order so downstream loops are deterministic
    std::vector<std::size_t> order(out.entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return out.entries_[i].dof < out.entries_[j].dof; });
    ConstraintSet sorted;
    for (std::size_t i : order) {
        sorted.entries_.push_back(out.entries_[i]);
        sorted.value_.push_back(out.value_[i]);
    }
    return sorted;
}

ConstraintSet dirichlet_set(const Mesh& mesh, const DofMap& dofs, std::span<const BoundaryTag> tags,
                            int component, ScalarField value) {
    if (component < 0 || component >= dofs.components())
        throw std::invalid_argument("dirichlet_set: component out of range");
    std::set<int> nodes;
    for (const auto& f : mesh.boundary()) {
        if (std::find(tags.begin(), tags.end(), f.tag) == tags.end()) continue;
        for (int node : dofs.edge_nodes(mesh, f.edge)) nodes.insert(node);
    }
    std::vector<Constraint> entries;
    entries.reserve(nodes.size());
    for (int node : nodes) entries.push_back({dofs.dof(node, component), node, component, dofs.node_coord(node)});
    return ConstraintSet(std::move(entries), std::move(value));
}

Vector interpolate(const DofMap& dofs, const ScalarField& f, double t) {
    if (dofs.components() != 1) throw std::invalid_argument("interpolate: scalar field into vector space");
    Vector out(dofs.num_dofs());
    for (int n = 0; n < dofs.num_nodes(); ++n) out[n] = f(dofs.node_coord(n), t);
    return out;
}

Vector interpolate(const DofMap& dofs, const VectorField& f, double t) {
    if (dofs.components() != 2) throw std::invalid_argument("interpolate: vector field into scalar space");
    Vector out(dofs.num_dofs());
    for (int n = 0; n < dofs.num_nodes(); ++n) {
        const Vec2 v = f(dofs.node_coord(n), t);
        out[2 * n] = v.x;
        out[2 * n + 1] = v.y;
    }
    return out;
}

ScalarSample sample_scalar(const Mesh& mesh, const DofMap& dofs, const Vector& coeffs, int cell, Point ref) {
    const AffineMap map = affine_map(mesh, cell);
    const ShapeValues s = shape_eval(dofs.element(), ref);
    const auto nodes = dofs.cell_nodes(cell);
    ScalarSample out;
    for (int a = 0; a < s.count; ++a) {
        const double c = coeffs[nodes[a]];
        out.value += c * s.value[a];
        out.grad = out.grad + c * map.grad(s.grad[a]);
    }
    return out;
}

VectorSample sample_vector(const Mesh& mesh, const DofMap& dofs, const Vector& coeffs, int cell, Point ref) {
    const AffineMap map = affine_map(mesh, cell);
    const ShapeValues s = shape_eval(dofs.element(), ref);
    const auto nodes = dofs.cell_nodes(cell);
    VectorSample out;
    for (int a = 0; a < s.count; ++a) {
        const Vec2 g = map.grad(s.grad[a]);
        for (int i = 0; i < 2; ++i) {
            const double c = coeffs[2 * nodes[a] + i];
            out.value[i] += c * s.value[a];
            out.grad(i, 0) += c * g.x;
            out.grad(i, 1) += c * g.y;
        }
    }
    return out;
}

RigidMotionBasis rigid_motion_basis(const DofMap& dofs) {
    if (dofs.kind() != SpaceKind::VectorP2) throw std::invalid_argument("rigid_motion_basis: needs vector P2");
    RigidMotionBasis rm;
    rm.fields[0] = interpolate(dofs, VectorField([](Point, double) { return Vec2{1.0, 0.0}; }), 0.0);
    rm.fields[1] = interpolate(dofs, VectorField([](Point, double) { return Vec2{0.0, 1.0}; }), 0.0);
    rm.fields[2] = interpolate(dofs, VectorField([](Point p, double) { return Vec2{-p.y, p.x}; }), 0.0);
    return rm;
}

}  // namespace poromfe
