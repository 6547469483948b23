#include "poromfe/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "poromfe/elements.hpp"
#include "poromfe/errors.hpp"

namespace poromfe {

namespace {

double sum_sq(const Mat2& a) { return contract(a, a); }

double weighted_dot(const SparseMatrix& a, const Vector& x, const Vector& y) { return dot(x, spmv(a, y)); }

double total(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

Vector difference_quotient(const Vector& next, const Vector& prev, double dt) {
    Vector d(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) d[i] = (next[i] - prev[i]) / dt;
    return d;
}

}  // namespace

ExactSolution exact_solution(const Scenario& scenario) {
    if (!scenario.has_exact_solution())
        throw std::invalid_argument("scenario '" + scenario.name + "' has no exact solution");
    return {scenario.exact_u, scenario.exact_grad_u, scenario.exact_p, scenario.exact_grad_p};
}

std::array<double, 2> scalar_errors(const Mesh& mesh, const DofMap& sdofs, const Vector& p, const ScalarField& exact,
                                    const std::function<Vec2(Point, double)>& grad, double t) {
    const QuadratureRule& rule = quadrature_rule(kNormDegree);
    double l2 = 0.0, semi = 0.0;
    for (int c = 0; c < mesh.num_triangles(); ++c) {
        const AffineMap map = affine_map(mesh, c);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double jxw = rule.weights[q] * map.det;
            const Point x = map.map(rule.points[q]);
            const ScalarSample s = sample_scalar(mesh, sdofs, p, c, rule.points[q]);
            const double e = s.value - exact(x, t);
            const Vec2 ge = s.grad - grad(x, t);
            l2 += jxw * e * e;
            semi += jxw * dot(ge, ge);
        }
    }
    return {std::sqrt(l2), std::sqrt(l2 + semi)};
}

ErrorReport error_norms(const Mesh& mesh, const DofMap& vdofs, const DofMap& sdofs, const Vector& u, const Vector& p,
                        const ExactSolution& exact, double t) {
    const QuadratureRule& rule = quadrature_rule(kNormDegree);
    double l2 = 0.0, semi = 0.0;
    for (int c = 0; c < mesh.num_triangles(); ++c) {
        const AffineMap map = affine_map(mesh, c);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double jxw = rule.weights[q] * map.det;
            const Point x = map.map(rule.points[q]);
            const VectorSample s = sample_vector(mesh, vdofs, u, c, rule.points[q]);
            const Vec2 e = s.value - exact.u(x, t);
            l2 += jxw * dot(e, e);
            semi += jxw * sum_sq(s.grad - exact.grad_u(x, t));
        }
    }
    const auto pe = scalar_errors(mesh, sdofs, p, exact.p, exact.grad_p, t);
    ErrorReport r;
    r.h = mesh_size(mesh);
    r.time = t;
    r.l2_u = std::sqrt(l2);
    r.h1_u = std::sqrt(l2 + semi);
    r.l2_p = pe[0];
    r.h1_p = pe[1];
    return r;
}

ErrorReport error_norms(const MfeaSolver& solver, const SystemState& state) {
    ErrorReport r = error_norms(solver.mesh(), solver.displacement_space(), solver.pressure_space(), state.u, state.p,
                                exact_solution(solver.scenario()), state.time);
    r.dt = solver.config().dt;
    r.theta = solver.config().theta;
    return r;
}

RateTable make_rate_table(const std::vector<int>& n, const std::vector<std::array<double, 4>>& errors) {
    if (n.size() != errors.size()) throw std::invalid_argument("rate table: size mismatch");
    RateTable table;
    for (std::size_t i = 0; i < n.size(); ++i) {
        RateRow row;
        row.n = n[i];
        row.h = 1.0 / n[i];
        row.error = errors[i];
        for (int k = 0; k < 4; ++k) {
            row.rate[k] = i == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : std::log(errors[i - 1][k] / errors[i][k]) / std::log(table.rows.back().h / row.h);
        }
        table.rows.push_back(row);
    }
    return table;
}

double default_dt_factor(int theta) { return theta == 1 ? 0.5 : 1.0; }

StudyResult convergence_study(const StudyConfig& config) {
    if (config.levels.size() < 2) throw std::invalid_argument("a convergence study needs at least two mesh levels");
    for (int n : config.levels)
        if (n < 1) throw std::invalid_argument("mesh levels must be positive");
    const Scenario probe = make_scenario(config.scenario, config.params);
    exact_solution(probe);

    StudyResult result;
    result.levels.resize(config.levels.size());

    auto solve_level = [&](std::size_t i) {
        StudyLevel& level = result.levels[i];
        level.n = config.levels[i];
        try {
            const double h = 1.0 / level.n;
            SchemeConfig sc;
            sc.theta = config.theta;
            sc.dt = config.dt ? *config.dt : config.dt_factor.value_or(default_dt_factor(config.theta)) * h * h;
            sc.final_time = config.final_time.value_or(probe.final_time);
            sc.policy = config.policy;
            level.dt = sc.dt;
            MfeaSolver solver(build_uniform_mesh(level.n), make_scenario(config.scenario, config.params), sc);
            level.steps = sc.num_steps();
            SystemState state = solver.initialize();
            for (int k = 0; k < level.steps; ++k) {
                StepReport report;
                state = solver.step(state, &report);
                level.max_newton_iterations = std::max(level.max_newton_iterations, report.newton.iterations);
            }
            level.errors = error_norms(solver, state);
            level.ok = true;
        } catch (const std::exception& e) {
            level.failure = e.what();
        }
    };

    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(config.levels.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < config.levels.size(); ++i) solve_level(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < config.levels.size(); i = next++) solve_level(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<int> ns;
    std::vector<std::array<double, 4>> errs;
    result.complete = true;
    for (const auto& level : result.levels) {
        if (!level.ok) {
            result.complete = false;
            break;
        }
        ns.push_back(level.n);
        errs.push_back({level.errors.l2_u, level.errors.h1_u, level.errors.l2_p, level.errors.h1_p});
    }
    result.table = make_rate_table(ns, errs);
    return result;
}

std::vector<double> MonitorLog::margins() const {
    std::vector<double> m;
    if (rows.empty()) return m;
    for (const auto& r : rows) m.push_back(rows.front().J - r.J - r.S);
    return m;
}

Monitor::Monitor(const MfeaSolver& solver, EnergyConstants constants) : solver_(solver), constants_(constants) {
    identity_x_ = interpolate(solver.displacement_space(), VectorField([](Point x, double) { return x; }), 0.0);
}

double Monitor::boundary_flux(const Vector& u) const {
    const Mesh& mesh = solver_.mesh();
    const DofMap& vdofs = solver_.displacement_space();
    double flux = 0.0;
    for (const auto& f : boundary_facets(mesh)) {
        const auto nodes = vdofs.edge_nodes(mesh, f.edge);
        auto normal_component = [&](int node) {
            return u[vdofs.dof(node, 0)] * f.normal.x + u[vdofs.dof(node, 1)] * f.normal.y;
        };
        // Simpson's rule is exact for the quadratic trace.
        flux += f.length * (normal_component(nodes[0]) + normal_component(nodes[1]) + 4.0 * normal_component(nodes[2])) / 6.0;
    }
    return flux;
}

void Monitor::observe(const SystemState& prev, const SystemState& next, const StepReport& report) {
    const ModelParams& prm = solver_.params();
    const int theta = solver_.config().theta;
    const double dt = solver_.config().dt;
    const SparseMatrix& mass = solver_.mass();
    const SparseMatrix& diff = solver_.diffusion();
    const Mesh& mesh = solver_.mesh();
    const DofMap& vdofs = solver_.displacement_space();
    const double k1 = prm.kappa1(), k2 = prm.kappa2(), k3 = prm.kappa3();

    if (!started_) {
        const Vector ones(prev.eta.size(), 1.0);
        eta0_mass_ = weighted_dot(mass, ones, prev.eta);
        c_eta_.assign(1, eta0_mass_);
        older_eta_ = prev.eta;
        prev_flow_load_ = solver_.loads(prev.time).flow;
        started_ = true;
    }

    const LoadVectors ld = solver_.loads(next.time);
    const Vector ones(next.eta.size(), 1.0);
    const int n = next.step;

    MonitorRow row;
    row.step = n;
    row.time = next.time;
    row.newton_iterations = report.newton.iterations;

    source_sum_ += dt * total(ld.flow);
    c_eta_.push_back(eta0_mass_ + source_sum_);
    const double xi_mass = weighted_dot(mass, ones, next.xi);
    row.conservation.step = n;
    row.conservation.eta = weighted_dot(mass, ones, next.eta) - c_eta_[n];
    row.conservation.xi = pairing_full_gradient(mesh, vdofs, next.u, identity_x_, prm) - 2.0 * xi_mass -
                          dot(ld.u, identity_x_);
    row.conservation.flux = boundary_flux(next.u) - (k1 * c_eta_[n - 1 + theta] - k3 * xi_mass);

    const Vector du = difference_quotient(next.u, prev.u, dt);
    const Vector dxi = difference_quotient(next.xi, prev.xi, dt);
    const Vector deta_new = difference_quotient(next.eta, prev.eta, dt);
    const Vector deta_old = difference_quotient(prev.eta, older_eta_, dt);
    const Vector stress = assemble_nonlinear_residual(mesh, vdofs, next.u, prm, solver_.config().policy);
    const Vector s_p = spmv(diff, next.p);

    // Discrete energy identity: the residual equations tested with
    // (d_t u, xi, p) and summed.
    std::array<double, 6> terms{};
    terms[0] = k3 * weighted_dot(mass, dxi, next.xi);
    terms[2] = dot(stress, du);
    terms[4] = -dot(ld.u, du);
    if (theta == 1) {
        terms[1] = k2 * weighted_dot(mass, deta_new, next.eta);
        terms[3] = dot(next.p, s_p);
        terms[5] = -dot(ld.flow, next.p);
    } else {
        terms[1] = k2 * weighted_dot(mass, deta_old, prev.eta);
        terms[3] = dot(prev.flux_pressure, s_p);
        terms[5] = -dot(prev_flow_load_, next.p);
    }
    double sum = 0.0, scale = 0.0;
    for (double t : terms) {
        sum += t;
        scale = std::max(scale, std::abs(t));
    }
    row.energy_scale = scale;
    row.energy_residual = scale > 0.0 ? std::abs(sum) / scale : 0.0;

    const double strain_next = strain_norm(mesh, vdofs, next.u);
    const Vector& eta_j = theta == 1 ? next.eta : prev.eta;
    row.J = 0.5 * (constants_.c2 * strain_next * strain_next + k2 * weighted_dot(mass, eta_j, eta_j) +
                   k3 * weighted_dot(mass, next.xi, next.xi) - 2.0 * dot(ld.u, next.u));

    if (n >= 2) {
        const double strain_prev = strain_norm(mesh, vdofs, prev.u);
        const double strain_du = strain_norm(mesh, vdofs, du);
        const Vector& deta = theta == 1 ? deta_new : deta_old;
        const double p_sp = dot(next.p, s_p);
        const double load_p = dot(ld.flow, next.p);
        const double xi_term = k3 * dt / 2.0 * weighted_dot(mass, dxi, dxi);
        const double coupling = (1 - theta) * k1 * dt * dot(dxi, s_p);
        const double common = p_sp - load_p + xi_term - coupling -
                              constants_.c1 / dt * strain_prev * strain_next;
        const double s_term = dt / 2.0 * constants_.c4 * strain_du * strain_du + common +
                              k2 * dt / 2.0 * weighted_dot(mass, deta, deta);
        const double alt_term = dt / 2.0 * constants_.c4 * strain_du * strain_du + common +
                                k2 * dt / 2.0 * weighted_dot(mass, deta_new, deta_new);
        s_sum_ += dt * s_term;
        s_alt_sum_ += dt * alt_term;
        if (theta == 0) {
            const double hat_term = dt / 4.0 * constants_.c4 * strain_du * strain_du + 0.5 * p_sp - load_p +
                                    k2 * dt / 2.0 * weighted_dot(mass, deta, deta) + xi_term -
                                    constants_.c1 / dt * strain_next * strain_next;
            s_hat_sum_ += dt * hat_term;
        }
    }
    row.S = s_sum_;
    row.S_alt = s_alt_sum_;
    row.S_hat = s_hat_sum_;
    log_.rows.push_back(row);

    older_eta_ = prev.eta;
    prev_flow_load_ = ld.flow;
}

MonitorLog monitor_trajectory(const MfeaSolver& solver, const Trajectory& trajectory, EnergyConstants constants) {
    Monitor monitor(solver, constants);
    for (std::size_t k = 0; k + 1 < trajectory.states.size(); ++k)
        monitor.observe(trajectory.states[k], trajectory.states[k + 1], trajectory.reports.at(k));
    return monitor.log();
}

}  // namespace poromfe
