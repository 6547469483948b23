#include "poromfe/elements.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "poromfe/errors.hpp"

namespace poromfe {

ShapeValues shape_eval(ElementKind kind, Point ref) {
    const double l0 = 1.0 - ref.x - ref.y, l1 = ref.x, l2 = ref.y;
    const Vec2 g0{-1.0, -1.0}, g1{1.0, 0.0}, g2{0.0, 1.0};
    ShapeValues s;
    if (kind == ElementKind::P1) {
        s.count = 3;
        s.value = {l0, l1, l2};
        s.grad = {g0, g1, g2};
        return s;
    }
    s.count = 6;
    s.value = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l1 * l2, 4 * l2 * l0, 4 * l0 * l1};
    s.grad = {(4 * l0 - 1) * g0,
              (4 * l1 - 1) * g1,
              (4 * l2 - 1) * g2,
              4.0 * (l1 * g2 + l2 * g1),
              4.0 * (l2 * g0 + l0 * g2),
              4.0 * (l0 * g1 + l1 * g0)};
    return s;
}

std::vector<Point> reference_nodes(ElementKind kind) {
    if (kind == ElementKind::P1) return {{0, 0}, {1, 0}, {0, 1}};
    return {{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}, {0, 0.5}, {0.5, 0}};
}

namespace {

// Orbits of symmetric rules, weights normalised to a unit-area triangle.
void add_centroid(QuadratureRule& r, double w) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5 * w);
}

void add_s21(QuadratureRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    for (Point p : {Point{a, a}, Point{b, a}, Point{a, b}}) {
        r.points.push_back(p);
        r.weights.push_back(0.5 * w);
    }
}

void add_s111(QuadratureRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    for (Point p : {Point{a, b}, Point{b, a}, Point{b, c}, Point{c, b}, Point{a, c}, Point{c, a}}) {
        r.points.push_back(p);
        r.weights.push_back(0.5 * w);
    }
}

QuadratureRule make_rule(int degree) {
    QuadratureRule r;
    switch (degree) {
        case 1:
            add_centroid(r, 1.0);
            r.degree = 1;
            break;
        case 2:
            add_s21(r, 1.0 / 6.0, 1.0 / 3.0);
            r.degree = 2;
            break;
        case 3:
        case 4:
            add_s21(r, 0.4459484909159648863183293, 0.223381589678011465695007);
            add_s21(r, 0.09157621350977074345957146, 0.1099517436553218676383263);
            r.degree = 4;
            break;
        case 5: {
            const double s = std::sqrt(15.0);
            add_centroid(r, 9.0 / 40.0);
            add_s21(r, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
            add_s21(r, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
            r.degree = 5;
            break;
        }
        case 6:
            add_s21(r, 0.2492867451709104212916386, 0.1167862757263793660252896);
            add_s21(r, 0.0630890144915022283403316, 0.05084490637020681692093681);
            add_s111(r, 0.05314504984481694735324967, 0.3103524510337844054166077, 0.08285107561837357519355346);
            r.degree = 6;
            break;
        default:
            throw std::invalid_argument("quadrature_rule: unsupported degree " + std::to_string(degree));
    }
    return r;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
    static const std::array<QuadratureRule, 6> rules = {make_rule(1), make_rule(2), make_rule(3),
                                                         make_rule(4), make_rule(5), make_rule(6)};
    if (degree < 1 || degree > 6)
        throw std::invalid_argument("quadrature_rule: unsupported degree " + std::to_string(degree));
    return rules[degree - 1];
}

const LineRule& edge_rule() {
    static const LineRule rule = [] {
        const double s = 0.5 * std::sqrt(0.6);
        return LineRule{{0.5 - s, 0.5, 0.5 + s}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    }();
    return rule;
}

AffineMap affine_map(Point a, Point b, Point c) {
    AffineMap m;
    m.origin = a;
    m.jacobian = Mat2{{b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y}};
    m.det = det(m.jacobian);
    if (!(m.det > 0.0)) throw MeshError("affine_map: degenerate or clockwise triangle");
    const double inv = 1.0 / m.det;
    // inverse = [d -b; -c a] / det, then transpose
    m.inv_transpose = Mat2{{m.jacobian(1, 1) * inv, -m.jacobian(1, 0) * inv,
                            -m.jacobian(0, 1) * inv, m.jacobian(0, 0) * inv}};
    return m;
}

AffineMap affine_map(const Mesh& mesh, int triangle) {
    const auto& t = mesh.triangles().at(triangle);
    const auto& v = mesh.vertices();
    return affine_map(v[t[0]], v[t[1]], v[t[2]]);
}

}  // namespace poromfe
