#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poromfe/assembly.hpp"
#include "poromfe/mms.hpp"
#include "poromfe/stepper.hpp"

namespace poromfe {

/// Errors of one discrete solution against the exact fields. The H1 values
/// are full norms: sqrt(L2^2 + |grad|^2).
struct ErrorReport {
    double h = 0.0;
    double dt = 0.0;
    int theta = 1;
    double time = 0.0;
    double l2_u = 0.0;
    double h1_u = 0.0;
    double l2_p = 0.0;
    double h1_p = 0.0;
};

/// Exact fields with their gradients (row i of the matrix = grad of component i).
struct ExactSolution {
    VectorField u;
    std::function<Mat2(Point, double)> grad_u;
    ScalarField p;
    std::function<Vec2(Point, double)> grad_p;
};

ExactSolution exact_solution(const Scenario& scenario);

ErrorReport error_norms(const Mesh& mesh, const DofMap& vdofs, const DofMap& sdofs, const Vector& u, const Vector& p,
                        const ExactSolution& exact, double t);

/// Errors of a solver state against the scenario's exact solution at the state's time.
ErrorReport error_norms(const MfeaSolver& solver, const SystemState& state);

/// L2 and full H1 error of a scalar field alone.
std::array<double, 2> scalar_errors(const Mesh& mesh, const DofMap& sdofs, const Vector& p, const ScalarField& exact,
                                    const std::function<Vec2(Point, double)>& grad, double t);

struct RateRow {
    int n = 0;                               // mesh parameter, h = 1/n
    double h = 0.0;
    std::array<double, 4> error{};           // L2_u, H1_u, L2_p, H1_p
    std::array<double, 4> rate{};            // NaN in the first row
};

struct RateTable {
    std::vector<RateRow> rows;
};

/// rate_i = log(e_{i-1} / e_i) / log(h_{i-1} / h_i), rows ordered as given.
RateTable make_rate_table(const std::vector<int>& n, const std::vector<std::array<double, 4>>& errors);

struct StudyConfig {
    std::string scenario = "test1";
    ModelParams params;
    std::vector<int> levels{3, 6, 12, 24};
    int theta = 1;
    /// dt = dt_factor * h^2; when unset, 1/2 for theta = 1 and 1 for theta = 0.
    std::optional<double> dt_factor;
    /// Fixed dt for all levels; overrides dt_factor.
    std::optional<double> dt;
    std::optional<double> final_time;  // defaults to the scenario's
    int jobs = 1;
    ExecPolicy policy = ExecPolicy::Serial;
};

double default_dt_factor(int theta);

struct StudyLevel {
    int n = 0;
    double dt = 0.0;
    int steps = 0;
    int max_newton_iterations = 0;
    ErrorReport errors;
    bool ok = false;
    std::string failure;
};

struct StudyResult {
    std::vector<StudyLevel> levels;  // ordered like the configured levels
    RateTable table;                 // successful levels up to the first failure
    bool complete = false;
};

/// Runs one solve per level (concurrently when jobs > 1) and tabulates
/// terminal errors. Throws std::invalid_argument for fewer than two levels or
/// a scenario without exact solution.
StudyResult convergence_study(const StudyConfig& config);

/// Conservation residuals at one time level (zero up to round-off under pure
/// traction/flux conditions):
///   eta:  (eta^n, 1) - (eta^0, 1) - dt sum_{k<=n} [(phi(t_k), 1) + <phi1(t_k), 1>]
///   xi:   (N(grad u^n), I) - d (xi^n, 1) - (f, x) - <f1, x>
///   flux: <u^n . n, 1> - [kappa1 C_eta(t_{n-1+theta}) - kappa3 (xi^n, 1)]
struct ConservationRow {
    int step = 0;
    double eta = 0.0;
    double xi = 0.0;
    double flux = 0.0;
};

/// User-supplied constants of the energy functionals.
struct EnergyConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c4 = 0.0;
};

struct MonitorRow {
    int step = 0;
    double time = 0.0;
    int newton_iterations = 0;
    ConservationRow conservation;
    /// Sum of the terms of the discrete energy identity relative to the largest term.
    double energy_residual = 0.0;
    double energy_scale = 0.0;
    double J = 0.0;       // J^{step-1}
    double S = 0.0;       // S^{step-1}
    double S_hat = 0.0;   // S-hat^{step-1}, decoupled scheme only (0 otherwise)
    double S_alt = 0.0;   // S with d_t eta^{n+1} in place of d_t eta^{n+theta}
};

struct MonitorLog {
    std::vector<MonitorRow> rows;
    /// J^0 - J^l - S^l for every row; nonnegative when the stated inequality holds.
    std::vector<double> margins() const;
};

/// Per-step diagnostics fed from the time loop; keeps only the few states
/// the difference quotients need.
class Monitor {
public:
    Monitor(const MfeaSolver& solver, EnergyConstants constants);
    void observe(const SystemState& prev, const SystemState& next, const StepReport& report);
    const MonitorLog& log() const { return log_; }

private:
    double boundary_flux(const Vector& u) const;

    const MfeaSolver& solver_;
    EnergyConstants constants_;
    MonitorLog log_;
    Vector identity_x_;            // interpolant of x
    double eta0_mass_ = 0.0;
    double source_sum_ = 0.0;      // sum_{k<=n} [(phi(t_k),1) + <phi1(t_k),1>]
    std::vector<double> c_eta_;    // C_eta(t_k)
    Vector older_eta_;             // eta^{n-2}
    Vector prev_flow_load_;        // flow load at t_{n-1}
    double s_sum_ = 0.0, s_hat_sum_ = 0.0, s_alt_sum_ = 0.0;
    bool started_ = false;
};

MonitorLog monitor_trajectory(const MfeaSolver& solver, const Trajectory& trajectory, EnergyConstants constants);

}  // namespace poromfe
