#pragma once

#include <array>
#include <span>
#include <vector>

#include "poromfe/elements.hpp"
#include "poromfe/mesh.hpp"
#include "poromfe/types.hpp"

namespace poromfe {

enum class SpaceKind { ScalarP1, ScalarP2, VectorP2 };

/// Global numbering of a continuous Lagrange space.
///
/// Nodes are the mesh vertices followed (for P2) by the edge midpoints.
/// Vector spaces interleave components: dof = 2 * node + component.
class DofMap {
public:
    DofMap(const Mesh& mesh, SpaceKind kind);

    SpaceKind kind() const { return kind_; }
    ElementKind element() const { return kind_ == SpaceKind::ScalarP1 ? ElementKind::P1 : ElementKind::P2; }
    int components() const { return kind_ == SpaceKind::VectorP2 ? 2 : 1; }
    int num_nodes() const { return static_cast<int>(node_coords_.size()); }
    int num_dofs() const { return num_nodes() * components(); }
    int nodes_per_cell() const { return node_count(element()); }
    int dofs_per_cell() const { return nodes_per_cell() * components(); }
    int num_cells() const { return static_cast<int>(cell_nodes_.size()) / nodes_per_cell(); }

    std::span<const int> cell_nodes(int cell) const {
        return {cell_nodes_.data() + static_cast<std::size_t>(cell) * nodes_per_cell(),
                static_cast<std::size_t>(nodes_per_cell())};
    }
    /// Global dofs of a cell, node-major with components interleaved.
    std::span<const int> cell_dofs(int cell) const {
        return {cell_dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell(),
                static_cast<std::size_t>(dofs_per_cell())};
    }
    int dof(int node, int component) const { return node * components() + component; }
    Point node_coord(int node) const { return node_coords_[node]; }
    const std::vector<Point>& node_coords() const { return node_coords_; }

    /// Nodes lying on a boundary edge: its two vertices, plus its midpoint for P2.
    std::vector<int> edge_nodes(const Mesh& mesh, int edge) const;

private:
    SpaceKind kind_;
    int num_vertices_;
    std::vector<Point> node_coords_;
    std::vector<int> cell_nodes_;
    std::vector<int> cell_dofs_;
};

DofMap build_dof_map(const Mesh& mesh, SpaceKind kind);

struct Constraint {
    int dof;
    int node;
    int component;
    Point coord;
};

/// Strongly imposed values on a set of dofs; values come from a field
/// evaluated at the constrained nodes.
class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(std::vector<Constraint> entries, ScalarField value);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Constraint>& entries() const { return entries_; }
    std::vector<double> values(double t) const;
    /// Overwrites the constrained entries of x with their prescribed values.
    void apply(Vector& x, double t) const;

    /// Union of two sets; a dof listed in both keeps the first value.
    static ConstraintSet merge(const ConstraintSet& a, const ConstraintSet& b);

private:
    std::vector<Constraint> entries_;
    std::vector<ScalarField> value_;  // one per entry
};

/// All dofs of component `component` whose node lies on an edge carrying
/// one of `tags` (edge endpoints included). For scalar spaces component is 0.
ConstraintSet dirichlet_set(const Mesh& mesh, const DofMap& dofs, std::span<const BoundaryTag> tags,
                            int component, ScalarField value);

Vector interpolate(const DofMap& dofs, const ScalarField& f, double t);
Vector interpolate(const DofMap& dofs, const VectorField& f, double t);

/// Scalar field value and gradient at a reference point of a cell.
struct ScalarSample {
    double value = 0.0;
    Vec2 grad;
};
ScalarSample sample_scalar(const Mesh& mesh, const DofMap& dofs, const Vector& coeffs, int cell, Point ref);

/// Vector field value and gradient (row i = grad of component i).
struct VectorSample {
    Vec2 value;
    Mat2 grad;
};
VectorSample sample_vector(const Mesh& mesh, const DofMap& dofs, const Vector& coeffs, int cell, Point ref);

/// Interpolants of (1,0), (0,1), (-y,x) in a vector P2 space.
struct RigidMotionBasis {
    std::array<Vector, 3> fields;
};

RigidMotionBasis rigid_motion_basis(const DofMap& dofs);

}  // namespace poromfe
