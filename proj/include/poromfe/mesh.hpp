#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "poromfe/types.hpp"

namespace poromfe {

/// Boundary parts of an axis-aligned rectangle, numbered counterclockwise
/// starting from the right side.
enum class BoundaryTag : std::uint8_t {
    Gamma1 = 1,  // x = x_max
    Gamma2 = 2,  // y = y_min
    Gamma3 = 3,  // x = x_min
    Gamma4 = 4,  // y = y_max
};

const char* to_string(BoundaryTag tag);

struct Rectangle {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 1.0;
    double y_max = 1.0;

    double area() const { return (x_max - x_min) * (y_max - y_min); }
};

struct BoundaryFacet {
    int edge;
    BoundaryTag tag;
};

struct BoundaryFacetGeometry {
    int edge;
    BoundaryTag tag;
    Vec2 normal;  // outward, unit length
    double length;
};

/// Conforming triangulation of a rectangle. Immutable once built.
///
/// Local edge k of a triangle is the edge opposite its local vertex k, i.e.
/// (v1,v2), (v2,v0), (v0,v1). Edges are stored with sorted vertex indices.
class Mesh {
public:
    /// Builds edges, adjacency and boundary tags from a vertex/triangle list.
    /// Throws MeshError if any triangle is not counterclockwise or the
    /// triangulation is not conforming.
    Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles, Rectangle domain);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    /// Adjacent triangles per edge; second entry is -1 on the boundary.
    const std::vector<std::array<int, 2>>& edge_triangles() const { return edge_triangles_; }
    const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
    const std::vector<BoundaryFacet>& boundary() const { return boundary_; }
    const Rectangle& domain() const { return domain_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    double triangle_area(int t) const;
    /// Maximum edge length.
    double max_edge_length() const;
    Point edge_midpoint(int e) const;

    /// Tag of a boundary vertex; corners take the lower-numbered tag.
    std::optional<BoundaryTag> vertex_tag(int v) const;
    /// Tag of an edge if it lies on the boundary.
    std::optional<BoundaryTag> edge_tag(int e) const;

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<BoundaryFacet> boundary_;
    std::vector<std::int8_t> edge_tag_;
    Rectangle domain_;
};

/// n x n grid of cells, each split along its lower-left to upper-right diagonal.
/// Throws std::invalid_argument for n < 1.
Mesh build_uniform_mesh(int n, Rectangle domain = {});

std::vector<BoundaryFacetGeometry> boundary_facets(const Mesh& mesh);

/// Same triangulation with vertex i moved to position perm[i].
Mesh renumber_vertices(const Mesh& mesh, const std::vector<int>& perm);

/// Legacy VTK ASCII dump (UNSTRUCTURED_GRID, triangles only).
void write_vtk(std::ostream& os, const Mesh& mesh);

}  // namespace poromfe
