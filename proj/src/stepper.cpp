#include "poromfe/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "poromfe/errors.hpp"

namespace poromfe {

int SchemeConfig::num_steps() const {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const double n = std::round(final_time / dt);
    if (std::abs(n * dt - final_time) > 1e-12 * final_time) {
        std::ostringstream msg;
        msg << "final time " << final_time << " is not a multiple of dt = " << dt;
        throw std::invalid_argument(msg.str());
    }
    return static_cast<int>(n);
}

void SchemeConfig::validate() const {
    if (theta != 0 && theta != 1) throw std::invalid_argument("theta must be 0 or 1");
    if (!(final_time >= 0.0) || !std::isfinite(final_time)) throw std::invalid_argument("final time must be >= 0");
    if (!(newton_tol > 0.0) || !(newton_abs_tol >= 0.0)) throw std::invalid_argument("Newton tolerances must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("Newton needs at least one iteration");
    if (!(linear_tol > 0.0)) throw std::invalid_argument("linear tolerance must be positive");
    if (!(dt_h2_constant > 0.0)) throw std::invalid_argument("dt/h^2 constant must be positive");
    num_steps();
}

double mesh_size(const Mesh& mesh) {
    double area = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) area = std::max(area, mesh.triangle_area(t));
    return std::sqrt(2.0 * area);
}

struct MfeaSolver::Blocks {
    int nu = 0, np = 0, nm = 0, n = 0;
    int xi0 = 0, eta0 = -1, m0 = 0;
    SparseMatrix base;          // constant part of the Newton matrix on the full pattern
    std::vector<int> jac_pos;   // CSR position of every element Jacobian entry
    std::vector<char> fixed;    // packed dofs with prescribed displacement
    std::vector<int> p_rows;    // eta rows replaced by the pressure constraint
    std::vector<int> p_xi_pos, p_eta_pos;
    LinearSolver newton;

    SparseMatrix flow;          // (1/kappa2) M + dt S, constrained rows/cols eliminated
    SparseMatrix flow_full;
    std::vector<char> flow_fixed;
    LinearSolver flow_solver;
    bool flow_ready = false;
};

MfeaSolver::MfeaSolver(Mesh mesh, Scenario scenario, SchemeConfig config)
    : mesh_(std::move(mesh)),
      scenario_(std::move(scenario)),
      config_(config),
      vdofs_(mesh_, SpaceKind::VectorP2),
      sdofs_(mesh_, SpaceKind::ScalarP1) {
    scenario_.params.validate();
    config_.validate();
    load_data_ = scenario_.load_data();

    for (const auto& bc : scenario_.u_dirichlet) {
        auto set = dirichlet_set(mesh_, vdofs_, bc.tags, bc.component, bc.value);
        u_constraints_ = ConstraintSet::merge(u_constraints_, set);
    }
    rigid_motion_ = scenario_.u_dirichlet.empty();
    if (scenario_.p_dirichlet) {
        p_constraints_ = dirichlet_set(mesh_, sdofs_, scenario_.p_dirichlet->tags, 0, scenario_.p_dirichlet->value);
    }

    mass_ = assemble_mass(mesh_, sdofs_);
    diffusion_ = assemble_diffusion(mesh_, sdofs_, scenario_.params);
    div_ = assemble_div(mesh_, vdofs_, sdofs_);

    if (config_.theta == 0) {
        const double h = mesh_size(mesh_);
        if (config_.dt > config_.dt_h2_constant * h * h * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "theta = 0 with dt = " << config_.dt << " > " << config_.dt_h2_constant << " * h^2 = "
                << config_.dt_h2_constant * h * h << "; the decoupled scheme needs dt = O(h^2)";
            warnings_.push_back(msg.str());
        }
    }
    build_blocks();
}

MfeaSolver::~MfeaSolver() = default;

void MfeaSolver::build_blocks() {
    blocks_ = std::make_unique<Blocks>();
    Blocks& b = *blocks_;
    const ModelParams& prm = scenario_.params;
    const double dt = config_.dt;
    b.nu = vdofs_.num_dofs();
    b.np = sdofs_.num_dofs();
    b.nm = rigid_motion_ ? 3 : 0;
    b.xi0 = b.nu;
    if (config_.theta == 1) {
        b.eta0 = b.nu + b.np;
        b.m0 = b.nu + 2 * b.np;
    } else {
        b.m0 = b.nu + b.np;
    }
    b.n = b.m0 + b.nm;
    b.newton = LinearSolver(config_.linear_tol);
    b.flow_solver = LinearSolver(config_.linear_tol);

    auto for_each = [](const SparseMatrix& a, auto&& f) {
        for (int i = 0; i < a.rows(); ++i)
            for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) f(i, a.col_idx()[k], a.values()[k]);
    };

    TripletAccumulator acc(b.n, b.n);
    const int nd = vdofs_.dofs_per_cell();
    for (int c = 0; c < vdofs_.num_cells(); ++c) {
        const auto dofs = vdofs_.cell_dofs(c);
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) acc.add(dofs[i], dofs[j], 0.0);
    }
    for_each(div_, [&](int i, int j, double v) {
        acc.add(j, b.xi0 + i, -v);
        acc.add(b.xi0 + i, j, v);
    });
    for_each(mass_, [&](int i, int j, double v) {
        acc.add(b.xi0 + i, b.xi0 + j, prm.kappa3() * v);
        if (b.eta0 >= 0) {
            acc.add(b.xi0 + i, b.eta0 + j, -prm.kappa1() * v);
            acc.add(b.eta0 + i, b.eta0 + j, v);
        }
    });
    if (b.eta0 >= 0) {
        for_each(diffusion_, [&](int i, int j, double v) {
            acc.add(b.eta0 + i, b.xi0 + j, dt * prm.kappa1() * v);
            acc.add(b.eta0 + i, b.eta0 + j, dt * prm.kappa2() * v);
        });
    }
    if (rigid_motion_) {
        for_each(assemble_rigid_motion_coupling(mesh_, vdofs_), [&](int i, int k, double v) {
            acc.add(i, b.m0 + k, v);
            acc.add(b.m0 + k, i, v);
        });
    }
    b.base = acc.to_csr();

    b.jac_pos.resize(static_cast<std::size_t>(vdofs_.num_cells()) * nd * nd);
    for (int c = 0; c < vdofs_.num_cells(); ++c) {
        const auto dofs = vdofs_.cell_dofs(c);
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
                b.jac_pos[(static_cast<std::size_t>(c) * nd + i) * nd + j] = b.base.find(dofs[i], dofs[j]);
    }

    b.fixed.assign(b.n, 0);
    for (const auto& e : u_constraints_.entries()) b.fixed[e.dof] = 1;
    if (b.eta0 >= 0) {
        for (const auto& e : p_constraints_.entries()) {
            const int row = b.eta0 + e.dof;
            b.p_rows.push_back(row);
            b.p_xi_pos.push_back(b.base.find(row, b.xi0 + e.dof));
            b.p_eta_pos.push_back(b.base.find(row, row));
        }
    }
}

LoadVectors MfeaSolver::loads(double t) const {
    return assemble_loads(mesh_, vdofs_, sdofs_, scenario_.params, load_data_, t);
}

SystemState MfeaSolver::initialize() const {
    Vector u0 = scenario_.u0 ? interpolate(vdofs_, scenario_.u0, 0.0) : Vector(vdofs_.num_dofs(), 0.0);
    Vector p0 = scenario_.p0 ? interpolate(sdofs_, scenario_.p0, 0.0) : Vector(sdofs_.num_dofs(), 0.0);
    return initialize(std::move(u0), std::move(p0));
}

SystemState MfeaSolver::initialize(Vector u0, Vector p0) const {
    if (u0.size() != static_cast<std::size_t>(vdofs_.num_dofs()) ||
        p0.size() != static_cast<std::size_t>(sdofs_.num_dofs()))
        throw std::invalid_argument("initial data has the wrong size");
    const ModelParams& prm = scenario_.params;

    if (rigid_motion_) {
        const SparseMatrix r = assemble_rigid_motion_coupling(mesh_, vdofs_);
        const RigidMotionBasis basis = rigid_motion_basis(vdofs_);
        Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
        Eigen::Vector3d moments = Eigen::Vector3d::Zero();
        for (int i = 0; i < r.rows(); ++i) {
            for (int k = r.row_ptr()[i]; k < r.row_ptr()[i + 1]; ++k) {
                const int col = r.col_idx()[k];
                moments[col] += r.values()[k] * u0[i];
                for (int l = 0; l < 3; ++l) gram(l, col) += basis.fields[l][i] * r.values()[k];
            }
        }
        const Eigen::Vector3d c = gram.ldlt().solve(moments);
        for (int l = 0; l < 3; ++l)
            for (std::size_t i = 0; i < u0.size(); ++i) u0[i] -= c[l] * basis.fields[l][i];
    }

    const Vector bu = spmv(div_, u0);
    const Vector q0 = solve(mass_, bu, config_.linear_tol);

    SystemState s;
    s.u = std::move(u0);
    s.xi.resize(p0.size());
    s.eta.resize(p0.size());
    for (std::size_t i = 0; i < p0.size(); ++i) {
        s.eta[i] = prm.c0 * p0[i] + prm.alpha * q0[i];
        s.xi[i] = prm.alpha * p0[i] - prm.lambda * q0[i];
    }
    s.p.resize(p0.size());
    s.q.resize(p0.size());
    for (std::size_t i = 0; i < p0.size(); ++i) {
        s.p[i] = prm.kappa1() * s.xi[i] + prm.kappa2() * s.eta[i];
        s.q[i] = prm.kappa1() * s.eta[i] - prm.kappa3() * s.xi[i];
    }
    s.flux_pressure = s.p;
    return s;
}

Vector MfeaSolver::pack(const Vector& u, const Vector& xi, const Vector& eta) const {
    const Blocks& b = *blocks_;
    Vector x(b.n, 0.0);
    std::copy(u.begin(), u.end(), x.begin());
    std::copy(xi.begin(), xi.end(), x.begin() + b.xi0);
    if (b.eta0 >= 0) std::copy(eta.begin(), eta.end(), x.begin() + b.eta0);
    return x;
}

Vector MfeaSolver::rhs(const SystemState& prev, const LoadVectors& loads) const {
    const Blocks& b = *blocks_;
    const ModelParams& prm = scenario_.params;
    Vector rhs(b.n, 0.0);
    std::copy(loads.u.begin(), loads.u.end(), rhs.begin());
    const Vector m_eta = spmv(mass_, prev.eta);
    if (b.eta0 >= 0) {
        for (int i = 0; i < b.np; ++i) rhs[b.eta0 + i] = m_eta[i] + config_.dt * loads.flow[i];
    } else {
        for (int i = 0; i < b.np; ++i) rhs[b.xi0 + i] = prm.kappa1() * m_eta[i];
    }
    return rhs;
}

void MfeaSolver::lift(Vector& x, double t_next) const {
    const Blocks& b = *blocks_;
    u_constraints_.apply(x, t_next);
    if (b.eta0 >= 0 && !p_constraints_.empty()) {
        const ModelParams& prm = scenario_.params;
        const auto values = p_constraints_.values(t_next);
        for (std::size_t k = 0; k < values.size(); ++k) {
            const int dof = p_constraints_.entries()[k].dof;
            x[b.eta0 + dof] = (values[k] - prm.kappa1() * x[b.xi0 + dof]) / prm.kappa2();
        }
    }
}

Vector MfeaSolver::residual_packed(const Vector& x, const Vector& rhs, double t_next) const {
    const Blocks& b = *blocks_;
    Vector r = spmv(b.base, x);
    const Vector u(x.begin(), x.begin() + b.nu);
    const Vector n = assemble_nonlinear_residual(mesh_, vdofs_, u, scenario_.params, config_.policy);
    for (int i = 0; i < b.nu; ++i) r[i] += n[i];
    for (int i = 0; i < b.n; ++i) r[i] -= rhs[i];
    for (const auto& e : u_constraints_.entries()) r[e.dof] = 0.0;
    if (b.eta0 >= 0 && !p_constraints_.empty()) {
        const ModelParams& prm = scenario_.params;
        const auto values = p_constraints_.values(t_next);
        for (std::size_t k = 0; k < values.size(); ++k) {
            const int dof = p_constraints_.entries()[k].dof;
            r[b.eta0 + dof] = prm.kappa1() * x[b.xi0 + dof] + prm.kappa2() * x[b.eta0 + dof] - values[k];
        }
    }
    return r;
}

Vector MfeaSolver::residual(const SystemState& prev, const Vector& u, const Vector& xi, const Vector& eta) const {
    const double t_next = (prev.step + 1) * config_.dt;
    const Vector x = pack(u, xi, eta);
    return residual_packed(x, rhs(prev, loads(t_next)), t_next);
}

NewtonReport MfeaSolver::newton_solve(const SystemState& prev, Vector& u, Vector& xi, Vector& eta) {
    Blocks& b = *blocks_;
    const ModelParams& prm = scenario_.params;
    const double t_next = (prev.step + 1) * config_.dt;
    const Vector b_vec = rhs(prev, loads(t_next));

    Vector x = pack(u, xi, eta);
    lift(x, t_next);
    Vector r = residual_packed(x, b_vec, t_next);
    double r_norm = norm2(r);
    const double target = std::max(config_.newton_tol * r_norm, config_.newton_abs_tol);

    NewtonReport report;
    report.residuals.push_back(r_norm);
    SparseMatrix jac = b.base;
    const auto& rp = jac.row_ptr();
    const auto& ci = jac.col_idx();

    while (report.iterations < config_.newton_max_iter) {
        const Vector uk(x.begin(), x.begin() + b.nu);
        const std::vector<double> local = element_jacobians(mesh_, vdofs_, uk, prm, config_.policy);
        auto& vals = jac.values();
        vals = b.base.values();
        for (std::size_t k = 0; k < local.size(); ++k) vals[b.jac_pos[k]] += local[k];
        if (!u_constraints_.empty()) {
            for (int i = 0; i < b.n; ++i) {
                for (int k = rp[i]; k < rp[i + 1]; ++k) {
                    if (b.fixed[i]) vals[k] = ci[k] == i ? 1.0 : 0.0;
                    else if (b.fixed[ci[k]]) vals[k] = 0.0;
                }
            }
        }
        for (std::size_t k = 0; k < b.p_rows.size(); ++k) {
            const int row = b.p_rows[k];
            std::fill(vals.begin() + rp[row], vals.begin() + rp[row + 1], 0.0);
            vals[b.p_xi_pos[k]] = prm.kappa1();
            vals[b.p_eta_pos[k]] = prm.kappa2();
        }

        b.newton.factorize(jac);
        const Vector delta = b.newton.solve(r);
        for (int i = 0; i < b.n; ++i) x[i] -= delta[i];
        ++report.iterations;

        const double prev_norm = r_norm;
        r = residual_packed(x, b_vec, t_next);
        r_norm = norm2(r);
        report.residuals.push_back(r_norm);
        if (!std::isfinite(r_norm)) break;

        const double step_size = norm2(delta);
        const double scale = 1.0 + norm2(x);
        // Residual at round-off level: further updates no longer change the iterate.
        const bool stalled = step_size <= 1e-14 * scale || (r_norm >= 0.5 * prev_norm && step_size <= 1e-11 * scale);
        if (r_norm <= target || stalled) {
            report.converged = true;
            break;
        }
    }
    if (!report.converged) {
        std::ostringstream msg;
        msg << "Newton did not converge in step " << prev.step + 1 << " after " << report.iterations
            << " iterations (residual " << r_norm << ")";
        throw StepError(msg.str(), r_norm);
    }

    u.assign(x.begin(), x.begin() + b.nu);
    xi.assign(x.begin() + b.xi0, x.begin() + b.xi0 + b.np);
    if (b.eta0 >= 0) eta.assign(x.begin() + b.eta0, x.begin() + b.eta0 + b.np);
    return report;
}

Vector MfeaSolver::flow_step(const SystemState& prev, const Vector& xi_next) {
    Blocks& b = *blocks_;
    const ModelParams& prm = scenario_.params;
    const double dt = config_.dt;
    const double t_next = (prev.step + 1) * dt;
    const double k1 = prm.kappa1(), k2 = prm.kappa2();

    if (!b.flow_ready) {
        TripletAccumulator acc(b.np, b.np);
        for (int i = 0; i < b.np; ++i) {
            for (int k = mass_.row_ptr()[i]; k < mass_.row_ptr()[i + 1]; ++k)
                acc.add(i, mass_.col_idx()[k], mass_.values()[k] / k2);
            for (int k = diffusion_.row_ptr()[i]; k < diffusion_.row_ptr()[i + 1]; ++k)
                acc.add(i, diffusion_.col_idx()[k], dt * diffusion_.values()[k]);
        }
        b.flow_full = acc.to_csr();
        b.flow = b.flow_full;
        b.flow_fixed.assign(b.np, 0);
        for (const auto& e : p_constraints_.entries()) b.flow_fixed[e.dof] = 1;
        auto& vals = b.flow.values();
        for (int i = 0; i < b.np; ++i) {
            for (int k = b.flow.row_ptr()[i]; k < b.flow.row_ptr()[i + 1]; ++k) {
                const int j = b.flow.col_idx()[k];
                if (b.flow_fixed[i]) vals[k] = i == j ? 1.0 : 0.0;
                else if (b.flow_fixed[j]) vals[k] = 0.0;
            }
        }
        try {
            b.flow_solver.factorize(b.flow);
        } catch (const SolverError& e) {
            throw StepError(std::string("flow step: ") + e.what(), e.residual());
        }
        b.flow_ready = true;
    }

    const LoadVectors ld = loads(t_next);
    const Vector m_eta = spmv(mass_, prev.eta);
    const Vector m_xi = spmv(mass_, xi_next);
    Vector rhs(b.np);
    for (int i = 0; i < b.np; ++i) rhs[i] = m_eta[i] + (k1 / k2) * m_xi[i] + dt * ld.flow[i];
    if (!p_constraints_.empty()) {
        Vector lifted(b.np, 0.0);
        p_constraints_.apply(lifted, t_next);
        const Vector shift = spmv(b.flow_full, lifted);
        for (int i = 0; i < b.np; ++i) rhs[i] = b.flow_fixed[i] ? lifted[i] : rhs[i] - shift[i];
    }
    Vector chi;
    try {
        chi = b.flow_solver.solve(rhs);
    } catch (const SolverError& e) {
        throw StepError(std::string("flow step: ") + e.what(), e.residual());
    }
    Vector eta(b.np);
    for (int i = 0; i < b.np; ++i) eta[i] = (chi[i] - k1 * xi_next[i]) / k2;
    return eta;
}

SystemState MfeaSolver::step(const SystemState& prev, StepReport* report) {
    const ModelParams& prm = scenario_.params;
    SystemState next;
    next.step = prev.step + 1;
    next.time = next.step * config_.dt;
    next.u = prev.u;
    next.xi = prev.xi;
    next.eta = prev.eta;

    StepReport local;
    local.newton = newton_solve(prev, next.u, next.xi, next.eta);
    local.linear_residual = blocks_->newton.last_residual();

    const Vector* eta_p = &next.eta;
    if (config_.theta == 0) {
        next.eta = flow_step(prev, next.xi);
        local.linear_residual = std::max(local.linear_residual, blocks_->flow_solver.last_residual());
        eta_p = &prev.eta;
    }
    const std::size_t np = next.xi.size();
    next.p.resize(np);
    next.q.resize(np);
    next.flux_pressure.resize(np);
    for (std::size_t i = 0; i < np; ++i) {
        next.p[i] = prm.kappa1() * next.xi[i] + prm.kappa2() * (*eta_p)[i];
        next.q[i] = prm.kappa1() * next.eta[i] - prm.kappa3() * next.xi[i];
        next.flux_pressure[i] = prm.kappa1() * next.xi[i] + prm.kappa2() * next.eta[i];
    }
    if (report) *report = std::move(local);
    return next;
}

Trajectory run(MfeaSolver& solver, const StepObserver& observer, bool keep_states) {
    Trajectory traj;
    const int steps = solver.config().num_steps();
    SystemState current = solver.initialize();
    traj.states.push_back(current);
    for (int n = 0; n < steps; ++n) {
        StepReport report;
        SystemState next = solver.step(current, &report);
        if (observer) observer(current, next, report);
        if (keep_states) traj.states.push_back(next);
        traj.reports.push_back(std::move(report));
        current = std::move(next);
    }
    if (!keep_states && steps > 0) traj.states.push_back(std::move(current));
    return traj;
}

}  // namespace poromfe
