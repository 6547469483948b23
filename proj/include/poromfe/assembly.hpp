#pragma once

#include <array>
#include <functional>
#include <utility>

#include "poromfe/linalg.hpp"
#include "poromfe/mesh.hpp"
#include "poromfe/parallel.hpp"
#include "poromfe/spaces.hpp"
#include "poromfe/types.hpp"

namespace poromfe {

/// Material constants of the poroelastic model.
///
/// The coupling coefficients follow from the change of variables
/// xi = alpha p - lambda div u, eta = c0 p + alpha div u, inverted as
/// p = kappa1 xi + kappa2 eta and div u = kappa1 eta - kappa3 xi.
struct ModelParams {
    double lambda = 0.1;
    double mu = 0.1;
    double alpha = 1e-5;
    double c0 = 2.0;
    Mat2 permeability = 1e-3 * Mat2::identity();
    double mu_f = 1.0;
    double rho_f = 0.0;
    Vec2 gravity{0.0, 0.0};

    double kappa1() const { return alpha / (alpha * alpha + lambda * c0); }
    double kappa2() const { return lambda / (alpha * alpha + lambda * c0); }
    double kappa3() const { return c0 / (alpha * alpha + lambda * c0); }

    /// Throws std::invalid_argument on non-positive lambda, mu, c0, mu_f or a
    /// permeability that is not symmetric positive definite.
    void validate() const;
};

/// N(grad u) = mu eps(u) + mu grad^T u grad u + lambda |grad u|_F^2 I.
Mat2 nonlinear_stress(const Mat2& grad_u, const ModelParams& params);

/// Directional derivative of nonlinear_stress at grad_u along w.
Mat2 nonlinear_stress_derivative(const Mat2& grad_u, const Mat2& w, const ModelParams& params);

/// Quadrature degrees: assembly integrands are at most cubic for P2 fields.
inline constexpr int kAssemblyDegree = 5;
inline constexpr int kNormDegree = 6;

/// r_i = (N(grad u_h), eps(phi_i)) for every vector P2 basis function.
Vector assemble_nonlinear_residual(const Mesh& mesh, const DofMap& vdofs, const Vector& u, const ModelParams& params,
                                   ExecPolicy policy = ExecPolicy::Serial);

/// Local Jacobians of the residual above, dofs_per_cell^2 doubles per cell
/// (row-major, rows = test functions).
std::vector<double> element_jacobians(const Mesh& mesh, const DofMap& vdofs, const Vector& u,
                                      const ModelParams& params, ExecPolicy policy = ExecPolicy::Serial);

/// Exact derivative of assemble_nonlinear_residual with respect to u.
SparseMatrix assemble_newton_jacobian(const Mesh& mesh, const DofMap& vdofs, const Vector& u,
                                      const ModelParams& params, ExecPolicy policy = ExecPolicy::Serial);

/// B_ij = (div phi_j, psi_i); rows follow the scalar space.
SparseMatrix assemble_div(const Mesh& mesh, const DofMap& vdofs, const DofMap& sdofs);

/// M_ij = coeff (phi_j, phi_i) for a scalar or vector space.
SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs, double coeff = 1.0);

/// S_ij = (1/mu_f) (K grad phi_j, grad phi_i). Throws if K is not SPD.
SparseMatrix assemble_diffusion(const Mesh& mesh, const DofMap& sdofs, const ModelParams& params);

/// Boundary value functions receive the point, outward normal and time.
using TractionField = std::function<Vec2(Point, Vec2, double)>;
using FluxField = std::function<double(Point, Vec2, double)>;

/// Source terms and the boundary parts on which natural conditions act.
struct LoadData {
    VectorField body_force;
    ScalarField flow_source;
    TractionField traction;
    FluxField flux;
    /// traction_active[tag - 1][component]: traction acts on this component of that side.
    std::array<std::array<bool, 2>, 4> traction_active{};
    std::array<bool, 4> flux_active{};
};

struct LoadVectors {
    Vector u;     // (f, v) + <f1, v>
    Vector flow;  // (phi, psi) + <phi1, psi> + (1/mu_f)(K rho_f g, grad psi)
};

LoadVectors assemble_loads(const Mesh& mesh, const DofMap& vdofs, const DofMap& sdofs, const ModelParams& params,
                           const LoadData& data, double t);

/// (u_h, r) for the three rigid motion fields, as columns of an nv x 3 matrix.
SparseMatrix assemble_rigid_motion_coupling(const Mesh& mesh, const DofMap& vdofs);

/// (N(grad u), grad v) using the full gradient of v instead of its symmetric
/// part; agrees with the eps(v) form because N is symmetric.
double pairing_full_gradient(const Mesh& mesh, const DofMap& vdofs, const Vector& u, const Vector& v,
                             const ModelParams& params);

/// (N(grad u) - N(grad v), eps(u) - eps(v)) together with the two L2 norms
/// |N(grad u) - N(grad v)| and |eps(u) - eps(v)|.
struct MonotonicitySample {
    double pairing = 0.0;
    double stress_diff_norm = 0.0;
    double strain_diff_norm = 0.0;
};
MonotonicitySample monotonicity_sample(const Mesh& mesh, const DofMap& vdofs, const Vector& u, const Vector& v,
                                       const ModelParams& params);

/// |eps(u)|_{L2}.
double strain_norm(const Mesh& mesh, const DofMap& vdofs, const Vector& u);

}  // namespace poromfe
