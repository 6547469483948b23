#include "poromfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "poromfe/errors.hpp"

namespace poromfe {

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::Gamma1: return "Gamma1";
        case BoundaryTag::Gamma2: return "Gamma2";
        case BoundaryTag::Gamma3: return "Gamma3";
        case BoundaryTag::Gamma4: return "Gamma4";
    }
    return "?";
}

namespace {

std::optional<BoundaryTag> side_of(const Rectangle& d, Point a, Point b) {
    const double tol = 1e-12 * std::max(d.x_max - d.x_min, d.y_max - d.y_min);
    auto on = [tol](double v, double ref) { return std::abs(v - ref) <= tol; };
    if (on(a.x, d.x_max) && on(b.x, d.x_max)) return BoundaryTag::Gamma1;
    if (on(a.y, d.y_min) && on(b.y, d.y_min)) return BoundaryTag::Gamma2;
    if (on(a.x, d.x_min) && on(b.x, d.x_min)) return BoundaryTag::Gamma3;
    if (on(a.y, d.y_max) && on(b.y, d.y_max)) return BoundaryTag::Gamma4;
    return std::nullopt;
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles, Rectangle domain)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), domain_(domain) {
    const int nv = num_vertices();
    for (int t = 0; t < num_triangles(); ++t) {
        for (int v : triangles_[t])
            if (v < 0 || v >= nv) throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
        if (!(triangle_area(t) > 0.0))
            throw MeshError("triangle " + std::to_string(t) + " is degenerate or clockwise");
    }

    // Directed edge (a -> b) as seen from the triangle that owns it.
    std::map<std::pair<int, int>, int> lookup;
    std::vector<std::array<int, 2>> directed;
    triangle_edges_.resize(triangles_.size());
    for (int t = 0; t < num_triangles(); ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[(k + 1) % 3];
            const int b = tri[(k + 2) % 3];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = lookup.emplace(std::pair{key.first, key.second}, num_edges());
            if (inserted) {
                edges_.push_back({key.first, key.second});
                edge_triangles_.push_back({t, -1});
                directed.push_back({a, b});
            } else {
                auto& adj = edge_triangles_[it->second];
                if (adj[1] != -1) throw MeshError("edge shared by more than two triangles");
                if (directed[it->second] != std::array<int, 2>{b, a})
                    throw MeshError("adjacent triangles induce the same edge orientation");
                adj[1] = t;
            }
            triangle_edges_[t][k] = it->second;
        }
    }

    edge_tag_.assign(edges_.size(), 0);
    for (int e = 0; e < num_edges(); ++e) {
        if (edge_triangles_[e][1] != -1) continue;
        const auto tag = side_of(domain_, vertices_[edges_[e][0]], vertices_[edges_[e][1]]);
        if (!tag) throw MeshError("boundary edge " + std::to_string(e) + " does not lie on the rectangle");
        boundary_.push_back({e, *tag});
        edge_tag_[e] = static_cast<std::int8_t>(*tag);
    }
}

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles_[t];
    const Point a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& e : edges_) h = std::max(h, norm(vertices_[e[1]] - vertices_[e[0]]));
    return h;
}

Point Mesh::edge_midpoint(int e) const {
    return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
}

std::optional<BoundaryTag> Mesh::edge_tag(int e) const {
    if (edge_tag_[e] == 0) return std::nullopt;
    return static_cast<BoundaryTag>(edge_tag_[e]);
}

std::optional<BoundaryTag> Mesh::vertex_tag(int v) const {
    std::optional<BoundaryTag> best;
    for (const auto& f : boundary_) {
        const auto& e = edges_[f.edge];
        if (e[0] != v && e[1] != v) continue;
        if (!best || static_cast<int>(f.tag) < static_cast<int>(*best)) best = f.tag;
    }
    return best;
}

Mesh build_uniform_mesh(int n, Rectangle domain) {
    if (n < 1) throw std::invalid_argument("build_uniform_mesh: n must be >= 1");
    const int m = n + 1;
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(m) * m);
    const double dx = (domain.x_max - domain.x_min) / n;
    const double dy = (domain.y_max - domain.y_min) / n;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            // Pin the far sides exactly so boundary detection is exact.
            const double x = i == n ? domain.x_max : domain.x_min + i * dx;
            const double y = j == n ? domain.y_max : domain.y_min + j * dy;
            vertices.push_back({x, y});
        }

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int v00 = j * m + i, v10 = v00 + 1, v01 = v00 + m, v11 = v01 + 1;
            triangles.push_back({v00, v10, v11});
            triangles.push_back({v00, v11, v01});
        }
    return Mesh(std::move(vertices), std::move(triangles), domain);
}

std::vector<BoundaryFacetGeometry> boundary_facets(const Mesh& mesh) {
    std::vector<BoundaryFacetGeometry> out;
    out.reserve(mesh.boundary().size());
    for (const auto& f : mesh.boundary()) {
        const auto& e = mesh.edges()[f.edge];
        const double len = norm(mesh.vertices()[e[1]] - mesh.vertices()[e[0]]);
        Vec2 n;
        switch (f.tag) {
            case BoundaryTag::Gamma1: n = {1.0, 0.0}; break;
            case BoundaryTag::Gamma2: n = {0.0, -1.0}; break;
            case BoundaryTag::Gamma3: n = {-1.0, 0.0}; break;
            case BoundaryTag::Gamma4: n = {0.0, 1.0}; break;
        }
        out.push_back({f.edge, f.tag, n, len});
    }
    return out;
}

Mesh renumber_vertices(const Mesh& mesh, const std::vector<int>& perm) {
    if (perm.size() != mesh.vertices().size())
        throw std::invalid_argument("renumber_vertices: permutation size mismatch");
    std::vector<Point> vertices(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) vertices[perm[i]] = mesh.vertices()[i];
    auto triangles = mesh.triangles();
    for (auto& t : triangles)
        for (int& v : t) v = perm[v];
    return Mesh(std::move(vertices), std::move(triangles), mesh.domain());
}

void write_vtk(std::ostream& os, const Mesh& mesh) {
    os << "# vtk DataFile Version 3.0\nporomfe mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    os.precision(17);
    for (const auto& p : mesh.vertices()) os << p.x << ' ' << p.y << " 0\n";
    os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << mesh.num_triangles() << '\n';
    for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
}

}  // namespace poromfe
