#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poromfe/assembly.hpp"
#include "poromfe/mesh.hpp"
#include "poromfe/types.hpp"

namespace poromfe {

struct DisplacementDirichlet {
    int component;
    std::vector<BoundaryTag> tags;
    ScalarField value;
};

struct PressureDirichlet {
    std::vector<BoundaryTag> tags;
    ScalarField value;
};

/// A complete problem on the unit square: data, boundary conditions,
/// initial values and (when known) the exact solution.
struct Scenario {
    std::string name;
    ModelParams params;
    VectorField exact_u;  // empty when no exact solution is known
    ScalarField exact_p;
    std::function<Mat2(Point, double)> exact_grad_u;  // row i = grad of component i
    std::function<Vec2(Point, double)> exact_grad_p;
    VectorField body_force;
    ScalarField flow_source;
    TractionField traction;
    FluxField flux;
    std::vector<DisplacementDirichlet> u_dirichlet;
    std::optional<PressureDirichlet> p_dirichlet;
    VectorField u0;
    ScalarField p0;
    double final_time = 1.0;

    bool has_exact_solution() const {
        return static_cast<bool>(exact_u) && static_cast<bool>(exact_p) && static_cast<bool>(exact_grad_u) &&
               static_cast<bool>(exact_grad_p);
    }

    /// Source terms plus the boundary parts where traction/flux act: every
    /// displacement component of a side that carries no Dirichlet data for
    /// it, and every side without pressure Dirichlet data.
    LoadData load_data() const;
};

/// u = t/2 (x^2, y^2), p = t exp(x + y); u1 prescribed on Gamma1/Gamma3,
/// u2 on Gamma2/Gamma4, p on the whole boundary.
Scenario test1(const ModelParams& params);

/// u = t^2/2 (x^2, y^2), p = sin(x + y) exp(t); same boundary layout as test1.
Scenario test2(const ModelParams& params);

/// Pure traction/flux problem with zero loads except a constant flow source.
/// Initial state zero unless overridden.
Scenario pure_flux(const ModelParams& params, double flow_source, double final_time = 1.0);

Scenario make_scenario(std::string_view name, const ModelParams& params);
std::vector<std::string> scenario_names();

/// Named parameter tables: test1-soft, test1-stiff, test2-soft, test2-stiff.
/// Throws std::invalid_argument for unknown names.
ModelParams param_set(std::string_view name);
std::vector<std::string> param_set_names();

/// Largest discrepancies between the scenario's source terms and the ones
/// recomputed from its exact fields by finite differences. Relative to the
/// magnitude of the respective reference quantity.
struct AuditReport {
    int samples = 0;
    double body_force = 0.0;
    double flow_source = 0.0;
    double traction = 0.0;
    bool passed(double tol) const { return body_force <= tol && flow_source <= tol && traction <= tol; }
};

/// Throws std::invalid_argument if the scenario has no exact solution.
AuditReport audit(const Scenario& scenario, int samples = 20, unsigned seed = 7);

/// Green-strain based stress: mu E + lambda tr(E) I with E = sym(G) + G^T G.
Mat2 green_stress(const Mat2& grad_u, const ModelParams& params);

}  // namespace poromfe
