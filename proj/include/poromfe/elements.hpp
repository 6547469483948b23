#pragma once

#include <array>
#include <vector>

#include "poromfe/mesh.hpp"
#include "poromfe/types.hpp"

namespace poromfe {

enum class ElementKind { P1, P2 };

constexpr int node_count(ElementKind kind) { return kind == ElementKind::P1 ? 3 : 6; }

/// Basis values and reference gradients at one point of the reference
/// triangle (0,0), (1,0), (0,1). P2 nodes are the three vertices followed by
/// the midpoints of the edges opposite vertices 0, 1, 2.
struct ShapeValues {
    int count = 0;
    std::array<double, 6> value{};
    std::array<Vec2, 6> grad{};
};

ShapeValues shape_eval(ElementKind kind, Point ref);

/// Reference coordinates of the element's nodes.
std::vector<Point> reference_nodes(ElementKind kind);

struct QuadratureRule {
    std::vector<Point> points;   // reference coordinates
    std::vector<double> weights; // sum to 1/2
    int degree = 0;
};

/// Symmetric positive rule exact to at least `degree` (1..6) on the
/// reference triangle. Throws std::invalid_argument otherwise.
const QuadratureRule& quadrature_rule(int degree);

/// Three-point Gauss-Legendre rule on [0, 1]; exact to degree 5.
struct LineRule {
    std::array<double, 3> points;
    std::array<double, 3> weights;
};
const LineRule& edge_rule();

struct AffineMap {
    Mat2 jacobian;       // columns are the physical images of the reference edges
    double det = 0.0;
    Mat2 inv_transpose;
    Point origin;

    Point map(Point ref) const { return origin + matvec(jacobian, ref); }
    Vec2 grad(Vec2 ref_grad) const { return matvec(inv_transpose, ref_grad); }
};

/// Throws MeshError if the triangle is degenerate or clockwise.
AffineMap affine_map(const Mesh& mesh, int triangle);

/// Map for an arbitrary triangle given by its vertices.
AffineMap affine_map(Point a, Point b, Point c);

}  // namespace poromfe
