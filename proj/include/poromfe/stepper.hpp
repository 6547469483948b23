#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "poromfe/assembly.hpp"
#include "poromfe/linalg.hpp"
#include "poromfe/mesh.hpp"
#include "poromfe/mms.hpp"
#include "poromfe/parallel.hpp"
#include "poromfe/spaces.hpp"

namespace poromfe {

struct SchemeConfig {
    /// 1: monolithic solve for (u, xi, eta); 0: (u, xi) with eta lagged, then a flow solve.
    int theta = 1;
    double dt = 0.0;
    double final_time = 1.0;
    double newton_tol = 1e-10;      // relative to the residual at the initial iterate
    double newton_abs_tol = 1e-14;
    int newton_max_iter = 20;
    double linear_tol = 1e-12;
    /// theta = 0 is only stable for dt <= dt_h2_constant * h^2.
    double dt_h2_constant = 1.0;
    ExecPolicy policy = ExecPolicy::Serial;

    /// N with N * dt == final_time; throws std::invalid_argument otherwise.
    int num_steps() const;
    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
};

/// Coefficients at one time level. p and q are derived from xi and eta.
struct SystemState {
    int step = 0;
    double time = 0.0;
    Vector u;    // vector P2
    Vector xi;   // P1
    Vector eta;  // P1
    Vector p;    // kappa1 xi + kappa2 eta^{n+theta}
    Vector q;    // kappa1 eta - kappa3 xi
    /// kappa1 xi + kappa2 eta^{n+1}: the pressure inside the Darcy flux.
    /// Equals p for theta = 1.
    Vector flux_pressure;
};

struct NewtonReport {
    int iterations = 0;              // number of linear solves
    std::vector<double> residuals;   // residual norm before each update and after the last
    bool converged = false;
};

struct StepReport {
    NewtonReport newton;
    double linear_residual = 0.0;    // largest relative residual of the linear solves
};

/// Fully discrete multiphysics scheme on one mesh: Taylor-Hood P2-P1 for
/// (u, xi), P1 for eta, backward Euler in time, Newton for the nonlinear
/// stress. Boundary data are imposed strongly; the displacement is kept
/// orthogonal to rigid motions through Lagrange multipliers when no
/// displacement component is prescribed anywhere.
class MfeaSolver {
public:
    MfeaSolver(Mesh mesh, Scenario scenario, SchemeConfig config);
    ~MfeaSolver();
    MfeaSolver(const MfeaSolver&) = delete;
    MfeaSolver& operator=(const MfeaSolver&) = delete;

    const Mesh& mesh() const { return mesh_; }
    const Scenario& scenario() const { return scenario_; }
    const ModelParams& params() const { return scenario_.params; }
    const SchemeConfig& config() const { return config_; }
    const DofMap& displacement_space() const { return vdofs_; }
    const DofMap& pressure_space() const { return sdofs_; }

    bool rigid_motion_constrained() const { return rigid_motion_; }
    const ConstraintSet& displacement_constraints() const { return u_constraints_; }
    const ConstraintSet& pressure_constraints() const { return p_constraints_; }

    /// P1 mass, P1 diffusion (1/mu_f)(K grad, grad) and (div v, psi).
    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& diffusion() const { return diffusion_; }
    const SparseMatrix& divergence() const { return div_; }

    LoadVectors loads(double t) const;

    /// Human-readable warnings about the configuration (e.g. dt too large for theta = 0).
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Interpolated initial data; q from the L2 projection of div u_h.
    SystemState initialize() const;
    SystemState initialize(Vector u0, Vector p0) const;

    /// Advances one step. Throws StepError or SolverError.
    SystemState step(const SystemState& prev, StepReport* report = nullptr);

    /// Newton solve of the coupled block for step prev -> prev + 1. For
    /// theta = 1 eta is updated in place; for theta = 0 it is read as eta^n.
    NewtonReport newton_solve(const SystemState& prev, Vector& u, Vector& xi, Vector& eta);

    /// theta = 0 flow update: solves for kappa1 xi + kappa2 eta, returns eta^{n+1}.
    Vector flow_step(const SystemState& prev, const Vector& xi_next);

    /// Residual of the Newton system at the given iterate, with constrained
    /// rows replaced by their constraint defects (displacement rows by 0).
    /// For theta = 0 eta is ignored and eta^n is taken from prev.
    Vector residual(const SystemState& prev, const Vector& u, const Vector& xi, const Vector& eta) const;

private:
    struct Blocks;
    void build_blocks();
    Vector pack(const Vector& u, const Vector& xi, const Vector& eta) const;
    Vector rhs(const SystemState& prev, const LoadVectors& loads) const;
    Vector residual_packed(const Vector& x, const Vector& b, double t_next) const;
    void lift(Vector& x, double t_next) const;

    Mesh mesh_;
    Scenario scenario_;
    SchemeConfig config_;
    LoadData load_data_;
    DofMap vdofs_;
    DofMap sdofs_;
    bool rigid_motion_ = false;
    ConstraintSet u_constraints_;
    ConstraintSet p_constraints_;
    SparseMatrix mass_;
    SparseMatrix diffusion_;
    SparseMatrix div_;
    std::vector<std::string> warnings_;
    std::unique_ptr<Blocks> blocks_;
};

/// sqrt(2 * largest cell area); 1/n on the uniform n x n mesh.
double mesh_size(const Mesh& mesh);

struct Trajectory {
    std::vector<SystemState> states;   // states[0] is the initial state
    std::vector<StepReport> reports;   // reports[n] belongs to states[n + 1]
};

using StepObserver = std::function<void(const SystemState& prev, const SystemState& next, const StepReport&)>;

/// Runs all steps to the final time. With keep_states = false only the
/// initial and final states are retained.
Trajectory run(MfeaSolver& solver, const StepObserver& observer = {}, bool keep_states = true);

}  // namespace poromfe
