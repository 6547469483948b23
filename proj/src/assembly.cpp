#include "poromfe/assembly.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "poromfe/elements.hpp"

namespace poromfe {

void ModelParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("ModelParams: lambda must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be positive");
    if (!(c0 > 0.0)) throw std::invalid_argument("ModelParams: c0 must be positive");
    if (!(mu_f > 0.0)) throw std::invalid_argument("ModelParams: mu_f must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("ModelParams: alpha must be non-negative");
    const Mat2& k = permeability;
    if (std::abs(k(0, 1) - k(1, 0)) > 1e-14 * (std::abs(k(0, 0)) + std::abs(k(1, 1))) || !(k(0, 0) > 0.0) ||
        !(det(k) > 0.0))
        throw std::invalid_argument("ModelParams: permeability must be symmetric positive definite");
}

Mat2 nonlinear_stress(const Mat2& g, const ModelParams& p) {
    Mat2 n = p.mu * sym(g) + p.mu * matmul(transpose(g), g);
    const double s = p.lambda * contract(g, g);
    n(0, 0) += s;
    n(1, 1) += s;
    return n;
}

Mat2 nonlinear_stress_derivative(const Mat2& g, const Mat2& w, const ModelParams& p) {
    Mat2 d = p.mu * sym(w) + p.mu * (matmul(transpose(w), g) + matmul(transpose(g), w));
    const double s = 2.0 * p.lambda * contract(g, w);
    d(0, 0) += s;
    d(1, 1) += s;
    return d;
}

namespace {

/// Reference basis values/gradients tabulated at the points of one rule.
struct RefTable {
    int nq = 0;
    int nb = 0;
    std::vector<double> weight;
    std::vector<Point> point;
    std::vector<double> value;  // [q * nb + a]
    std::vector<Vec2> grad;
};

const RefTable& ref_table(ElementKind kind, int degree) {
    static const auto tables = [] {
        std::map<std::pair<int, int>, RefTable> out;
        for (ElementKind k : {ElementKind::P1, ElementKind::P2})
            for (int d = 1; d <= 6; ++d) {
                const auto& rule = quadrature_rule(d);
                RefTable t;
                t.nq = static_cast<int>(rule.points.size());
                t.nb = node_count(k);
                t.weight = rule.weights;
                t.point = rule.points;
                for (Point p : rule.points) {
                    const ShapeValues s = shape_eval(k, p);
                    for (int a = 0; a < t.nb; ++a) {
                        t.value.push_back(s.value[a]);
                        t.grad.push_back(s.grad[a]);
                    }
                }
                out.emplace(std::pair{static_cast<int>(k), d}, std::move(t));
            }
        return out;
    }();
    return tables.at({static_cast<int>(kind), degree});
}

/// Physical gradients of the P2 basis and the displacement gradient at a point.
struct P2Point {
    double jxw;
    std::array<Vec2, 6> g;
    Mat2 grad_u;
};

template <class F>
void for_each_p2_point(const Mesh& mesh, const DofMap& vdofs, const Vector& u, int cell, int degree, F&& f) {
    const RefTable& tab = ref_table(ElementKind::P2, degree);
    const AffineMap map = affine_map(mesh, cell);
    const auto dofs = vdofs.cell_dofs(cell);
    P2Point pt;
    for (int q = 0; q < tab.nq; ++q) {
        pt.jxw = tab.weight[q] * map.det;
        pt.grad_u = Mat2{};
        for (int a = 0; a < 6; ++a) {
            pt.g[a] = map.grad(tab.grad[q * 6 + a]);
            for (int i = 0; i < 2; ++i) {
                const double c = u[dofs[2 * a + i]];
                pt.grad_u(i, 0) += c * pt.g[a].x;
                pt.grad_u(i, 1) += c * pt.g[a].y;
            }
        }
        f(pt);
    }
}

/// Gradient of vector basis function (node a, component c): row c is g_a.
Mat2 basis_grad(Vec2 g, int c) {
    Mat2 w;
    w(c, 0) = g.x;
    w(c, 1) = g.y;
    return w;
}

}  // namespace

Vector assemble_nonlinear_residual(const Mesh& mesh, const DofMap& vdofs, const Vector& u, const ModelParams& params,
                                   ExecPolicy policy) {
    const int nd = vdofs.dofs_per_cell();
    const auto local = compute_cells(policy, vdofs.num_cells(), nd, [&](int cell, double* out) {
        for_each_p2_point(mesh, vdofs, u, cell, kAssemblyDegree, [&](const P2Point& pt) {
            const Mat2 n = nonlinear_stress(pt.grad_u, params);
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 2; ++c)
                    out[2 * a + c] += pt.jxw * (n(c, 0) * pt.g[a].x + n(c, 1) * pt.g[a].y);
        });
    });
    Vector r(vdofs.num_dofs(), 0.0);
    for (int cell = 0; cell < vdofs.num_cells(); ++cell) {
        const auto dofs = vdofs.cell_dofs(cell);
        for (int i = 0; i < nd; ++i) r[dofs[i]] += local[static_cast<std::size_t>(cell) * nd + i];
    }
    return r;
}

std::vector<double> element_jacobians(const Mesh& mesh, const DofMap& vdofs, const Vector& u,
                                      const ModelParams& params, ExecPolicy policy) {
    const int nd = vdofs.dofs_per_cell();
    return compute_cells(policy, vdofs.num_cells(), nd * nd, [&](int cell, double* out) {
        std::array<Mat2, 12> dn;
        for_each_p2_point(mesh, vdofs, u, cell, kAssemblyDegree, [&](const P2Point& pt) {
            for (int b = 0; b < 6; ++b)
                for (int k = 0; k < 2; ++k)
                    dn[2 * b + k] = nonlinear_stress_derivative(pt.grad_u, basis_grad(pt.g[b], k), params);
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 2; ++c) {
                    double* row = out + (2 * a + c) * nd;
                    for (int j = 0; j < 12; ++j)
                        row[j] += pt.jxw * (dn[j](c, 0) * pt.g[a].x + dn[j](c, 1) * pt.g[a].y);
                }
        });
    });
}

SparseMatrix assemble_newton_jacobian(const Mesh& mesh, const DofMap& vdofs, const Vector& u,
                                      const ModelParams& params, ExecPolicy policy) {
    const int nd = vdofs.dofs_per_cell();
    const auto local = element_jacobians(mesh, vdofs, u, params, policy);
    TripletAccumulator acc(vdofs.num_dofs(), vdofs.num_dofs());
    acc.reserve(local.size());
    for (int cell = 0; cell < vdofs.num_cells(); ++cell) {
        const auto dofs = vdofs.cell_dofs(cell);
        const double* m = local.data() + static_cast<std::size_t>(cell) * nd * nd;
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) acc.add(dofs[i], dofs[j], m[i * nd + j]);
    }
    return acc.to_csr();
}

SparseMatrix assemble_div(const Mesh& mesh, const DofMap& vdofs, const DofMap& sdofs) {
    if (vdofs.components() != 2 || sdofs.components() != 1)
        throw std::invalid_argument("assemble_div: expects (vector, scalar) spaces");
    const RefTable& vt = ref_table(vdofs.element(), kAssemblyDegree);
    const RefTable& st = ref_table(sdofs.element(), kAssemblyDegree);
    TripletAccumulator acc(sdofs.num_dofs(), vdofs.num_dofs());
    for (int cell = 0; cell < mesh.num_triangles(); ++cell) {
        const AffineMap map = affine_map(mesh, cell);
        const auto vd = vdofs.cell_dofs(cell);
        const auto sd = sdofs.cell_dofs(cell);
        std::vector<double> local(sd.size() * vd.size(), 0.0);
        for (int q = 0; q < vt.nq; ++q) {
            const double jxw = vt.weight[q] * map.det;
            for (int b = 0; b < vt.nb; ++b) {
                const Vec2 g = map.grad(vt.grad[q * vt.nb + b]);
                for (int a = 0; a < st.nb; ++a) {
                    const double psi = st.value[q * st.nb + a];
                    local[a * vd.size() + 2 * b] += jxw * g.x * psi;
                    local[a * vd.size() + 2 * b + 1] += jxw * g.y * psi;
                }
            }
        }
        for (std::size_t a = 0; a < sd.size(); ++a)
            for (std::size_t j = 0; j < vd.size(); ++j) acc.add(sd[a], vd[j], local[a * vd.size() + j]);
    }
    return acc.to_csr();
}

SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs, double coeff) {
    const RefTable& t = ref_table(dofs.element(), kAssemblyDegree);
    const int nc = dofs.components();
    TripletAccumulator acc(dofs.num_dofs(), dofs.num_dofs());
    for (int cell = 0; cell < mesh.num_triangles(); ++cell) {
        const double detj = affine_map(mesh, cell).det;
        const auto nodes = dofs.cell_nodes(cell);
        std::vector<double> local(t.nb * t.nb, 0.0);
        for (int q = 0; q < t.nq; ++q) {
            const double jxw = coeff * t.weight[q] * detj;
            for (int a = 0; a < t.nb; ++a)
                for (int b = 0; b < t.nb; ++b) local[a * t.nb + b] += jxw * t.value[q * t.nb + a] * t.value[q * t.nb + b];
        }
        for (int a = 0; a < t.nb; ++a)
            for (int b = 0; b < t.nb; ++b)
                for (int c = 0; c < nc; ++c) acc.add(dofs.dof(nodes[a], c), dofs.dof(nodes[b], c), local[a * t.nb + b]);
    }
    return acc.to_csr();
}

SparseMatrix assemble_diffusion(const Mesh& mesh, const DofMap& sdofs, const ModelParams& params) {
    params.validate();
    if (sdofs.components() != 1) throw std::invalid_argument("assemble_diffusion: scalar space required");
    const RefTable& t = ref_table(sdofs.element(), kAssemblyDegree);
    const Mat2 k = (1.0 / params.mu_f) * params.permeability;
    TripletAccumulator acc(sdofs.num_dofs(), sdofs.num_dofs());
    for (int cell = 0; cell < mesh.num_triangles(); ++cell) {
        const AffineMap map = affine_map(mesh, cell);
        const auto nodes = sdofs.cell_nodes(cell);
        std::vector<double> local(t.nb * t.nb, 0.0);
        std::vector<Vec2> g(t.nb);
        for (int q = 0; q < t.nq; ++q) {
            const double jxw = t.weight[q] * map.det;
            for (int a = 0; a < t.nb; ++a) g[a] = map.grad(t.grad[q * t.nb + a]);
            for (int a = 0; a < t.nb; ++a)
                for (int b = 0; b < t.nb; ++b) local[a * t.nb + b] += jxw * dot(matvec(k, g[b]), g[a]);
        }
        for (int a = 0; a < t.nb; ++a)
            for (int b = 0; b < t.nb; ++b) acc.add(nodes[a], nodes[b], local[a * t.nb + b]);
    }
    return acc.to_csr();
}

LoadVectors assemble_loads(const Mesh& mesh, const DofMap& vdofs, const DofMap& sdofs, const ModelParams& params,
                           const LoadData& data, double t) {
    LoadVectors out{Vector(vdofs.num_dofs(), 0.0), Vector(sdofs.num_dofs(), 0.0)};
    const RefTable& vt = ref_table(vdofs.element(), kAssemblyDegree);
    const RefTable& st = ref_table(sdofs.element(), kAssemblyDegree);
    const Vec2 gravity_flux = (params.rho_f / params.mu_f) * matvec(params.permeability, params.gravity);
    const bool has_gravity = gravity_flux.x != 0.0 || gravity_flux.y != 0.0;

    for (int cell = 0; cell < mesh.num_triangles(); ++cell) {
        const AffineMap map = affine_map(mesh, cell);
        const auto vnodes = vdofs.cell_nodes(cell);
        const auto snodes = sdofs.cell_nodes(cell);
        for (int q = 0; q < vt.nq; ++q) {
            const double jxw = vt.weight[q] * map.det;
            const Point x = map.map(vt.point[q]);
            if (data.body_force) {
                const Vec2 f = data.body_force(x, t);
                for (int a = 0; a < vt.nb; ++a) {
                    const double w = jxw * vt.value[q * vt.nb + a];
                    out.u[2 * vnodes[a]] += w * f.x;
                    out.u[2 * vnodes[a] + 1] += w * f.y;
                }
            }
            if (data.flow_source) {
                const double s = data.flow_source(x, t);
                for (int a = 0; a < st.nb; ++a) out.flow[snodes[a]] += jxw * s * st.value[q * st.nb + a];
            }
            if (has_gravity)
                for (int a = 0; a < st.nb; ++a)
                    out.flow[snodes[a]] += jxw * dot(gravity_flux, map.grad(st.grad[q * st.nb + a]));
        }
    }

    const LineRule& line = edge_rule();
    for (const auto& f : boundary_facets(mesh)) {
        const int side = static_cast<int>(f.tag) - 1;
        const auto& tr_on = data.traction_active[side];
        const bool traction = data.traction && (tr_on[0] || tr_on[1]);
        const bool flux = data.flux && data.flux_active[side];
        if (!traction && !flux) continue;
        const auto& e = mesh.edges()[f.edge];
        const Point a = mesh.vertices()[e[0]], b = mesh.vertices()[e[1]];
        const auto vn = vdofs.edge_nodes(mesh, f.edge);  // {v0, v1, midpoint}
        const auto sn = sdofs.edge_nodes(mesh, f.edge);
        for (int q = 0; q < 3; ++q) {
            const double s = line.points[q];
            const double w = line.weights[q] * f.length;
            const Point x = a + s * (b - a);
            if (traction) {
                const std::array<double, 3> phi{(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)};
                const Vec2 g = data.traction(x, f.normal, t);
                for (int k = 0; k < 3; ++k)
                    for (int c = 0; c < 2; ++c)
                        if (tr_on[c]) out.u[vdofs.dof(vn[k], c)] += w * phi[k] * g[c];
            }
            if (flux) {
                const double g = data.flux(x, f.normal, t);
                if (sdofs.element() == ElementKind::P1) {
                    out.flow[sn[0]] += w * (1 - s) * g;
                    out.flow[sn[1]] += w * s * g;
                } else {
                    out.flow[sn[0]] += w * (1 - s) * (1 - 2 * s) * g;
                    out.flow[sn[1]] += w * s * (2 * s - 1) * g;
                    out.flow[sn[2]] += w * 4 * s * (1 - s) * g;
                }
            }
        }
    }
    return out;
}

SparseMatrix assemble_rigid_motion_coupling(const Mesh& mesh, const DofMap& vdofs) {
    const SparseMatrix m = assemble_mass(mesh, vdofs);
    const RigidMotionBasis rm = rigid_motion_basis(vdofs);
    TripletAccumulator acc(vdofs.num_dofs(), 3);
    for (int k = 0; k < 3; ++k) {
        const Vector col = spmv(m, rm.fields[k]);
        for (int i = 0; i < vdofs.num_dofs(); ++i)
            if (col[i] != 0.0) acc.add(i, k, col[i]);
    }
    return acc.to_csr();
}

double pairing_full_gradient(const Mesh& mesh, const DofMap& vdofs, const Vector& u, const Vector& v,
                             const ModelParams& params) {
    double total = 0.0;
    for (int cell = 0; cell < mesh.num_triangles(); ++cell) {
        const auto dofs = vdofs.cell_dofs(cell);
        for_each_p2_point(mesh, vdofs, u, cell, kNormDegree, [&](const P2Point& pt) {
            Mat2 gv;
            for (int a = 0; a < 6; ++a)
                for (int i = 0; i < 2; ++i) gv = gv + v[dofs[2 * a + i]] * basis_grad(pt.g[a], i);
            total += pt.jxw * contract(nonlinear_stress(pt.grad_u, params), gv);
        });
    }
    return total;
}

MonotonicitySample monotonicity_sample(const Mesh& mesh, const DofMap& vdofs, const Vector& u, const Vector& v,
                                       const ModelParams& params) {
    MonotonicitySample out;
    double stress2 = 0.0, strain2 = 0.0;
    for (int cell = 0; cell < mesh.num_triangles(); ++cell) {
        const auto dofs = vdofs.cell_dofs(cell);
        for_each_p2_point(mesh, vdofs, u, cell, kNormDegree, [&](const P2Point& pt) {
            Mat2 gv;
            for (int a = 0; a < 6; ++a)
                for (int i = 0; i < 2; ++i) gv = gv + v[dofs[2 * a + i]] * basis_grad(pt.g[a], i);
            const Mat2 dn = nonlinear_stress(pt.grad_u, params) - nonlinear_stress(gv, params);
            const Mat2 de = sym(pt.grad_u - gv);
            out.pairing += pt.jxw * contract(dn, de);
            stress2 += pt.jxw * contract(dn, dn);
            strain2 += pt.jxw * contract(de, de);
        });
    }
    out.stress_diff_norm = std::sqrt(stress2);
    out.strain_diff_norm = std::sqrt(strain2);
    return out;
}

double strain_norm(const Mesh& mesh, const DofMap& vdofs, const Vector& u) {
    double s = 0.0;
    for (int cell = 0; cell < mesh.num_triangles(); ++cell)
        for_each_p2_point(mesh, vdofs, u, cell, kNormDegree, [&](const P2Point& pt) {
            const Mat2 e = sym(pt.grad_u);
            s += pt.jxw * contract(e, e);
        });
    return std::sqrt(s);
}

}  // namespace poromfe
