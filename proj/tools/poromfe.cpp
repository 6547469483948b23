#include <cstdio>
#include <filesystem>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "poromfe/errors.hpp"
#include "poromfe/io.hpp"
#include "poromfe/stepper.hpp"
#include "poromfe/verify.hpp"

namespace fs = std::filesystem;
using namespace poromfe;
using namespace poromfe::cli;

namespace {

// Removes everything written so far unless the command completes.
class OutputGuard {
public:
    explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {}
    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
    }
    void write(const std::string& name, const std::function<void(std::ostream&)>& writer) {
        const fs::path path = dir_ / name;
        write_file_atomic(path, writer);
        written_.push_back(path);
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    bool committed_ = false;
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

SchemeConfig scheme(const RunConfig& cfg, const Scenario& sc, int n, Command cmd) {
    SchemeConfig s;
    s.theta = cfg.theta;
    s.dt = cfg.time_step(n, cmd);
    s.final_time = sc.final_time;
    s.newton_tol = cfg.newton_tol;
    s.newton_max_iter = cfg.newton_max_iter;
    s.linear_tol = cfg.linear_tol;
    s.dt_h2_constant = cfg.dt_h2_constant;
    s.policy = cfg.parallel ? ExecPolicy::Parallel : ExecPolicy::Serial;
    return s;
}

std::string vtk_name(double t) { return "solution_t" + format_number(t) + ".vtk"; }

int single_mesh(const RunConfig& cfg) { return cfg.mesh_list.size() == 1 ? cfg.mesh_list.front() : cfg.n; }

int cmd_run(const RunConfig& cfg, bool monitors_only) {
    const Command cmd = monitors_only ? Command::Energy : Command::Run;
    const int n = single_mesh(cfg);
    Scenario sc = cfg.make_scenario();
    const SchemeConfig sch = scheme(cfg, sc, n, cmd);
    MfeaSolver solver(build_uniform_mesh(n), std::move(sc), sch);
    for (const auto& w : solver.warnings()) std::cerr << "warning: " << w << '\n';

    const fs::path dir = cfg.output_root();
    ensure_dir(dir);

    Monitor monitor(solver, cfg.constants);
    int max_newton = 0;
    SystemState state = solver.initialize();
    const int steps = sch.num_steps();
    try {
        for (int k = 0; k < steps; ++k) {
            StepReport report;
            SystemState next = solver.step(state, &report);
            monitor.observe(state, next, report);
            max_newton = std::max(max_newton, report.newton.iterations);
            state = std::move(next);
        }
    } catch (const StepError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }

    OutputGuard out(dir);
    if (!monitors_only && cfg.emit_vtk)
        out.write(vtk_name(state.time), [&](std::ostream& os) { write_solution_vtk(os, solver, state); });
    if (cfg.emit_monitors || monitors_only)
        out.write("monitors.csv", [&](std::ostream& os) { write_monitors_csv(os, monitor.log()); });
    out.commit();

    const auto& log = monitor.log();
    double eta_res = 0.0, energy_res = 0.0;
    for (const auto& r : log.rows) {
        eta_res = std::max(eta_res, std::abs(r.conservation.eta));
        energy_res = std::max(energy_res, r.energy_residual);
    }
    std::cout << "scenario " << solver.scenario().name << ", params " << cfg.resolved_param_set() << ", n = " << n
              << ", theta = " << sch.theta << ", dt = " << format_number(sch.dt) << ", steps = " << steps << '\n';
    std::cout << "max Newton iterations per step: " << max_newton << '\n';
    if (cfg.pretty && monitors_only) write_monitors_pretty(std::cout, log);
    std::cout << "max |eta conservation residual|: " << format_number(eta_res) << '\n';
    std::cout << "max relative energy identity residual: " << format_number(energy_res) << '\n';
    if (solver.scenario().has_exact_solution()) {
        const ErrorReport e = error_norms(solver, state);
        std::cout << "errors at t = " << format_number(state.time) << ": L2_u " << format_number(e.l2_u) << ", H1_u "
                  << format_number(e.h1_u) << ", L2_p " << format_number(e.l2_p) << ", H1_p "
                  << format_number(e.h1_p) << '\n';
    }
    std::cout << "output: " << dir.string() << '\n';
    return 0;
}

int cmd_study(const RunConfig& cfg) {
    StudyConfig sc;
    sc.scenario = cfg.scenario;
    sc.params = cfg.params();
    if (!cfg.mesh_list.empty()) sc.levels = cfg.mesh_list;
    sc.theta = cfg.theta;
    sc.dt = cfg.dt;
    sc.dt_factor = cfg.dt_factor;
    sc.final_time = cfg.final_time;
    sc.jobs = cfg.jobs;
    sc.policy = cfg.parallel ? ExecPolicy::Parallel : ExecPolicy::Serial;

    const fs::path dir = cfg.output_root();
    ensure_dir(dir);
    const StudyResult result = convergence_study(sc);
    for (const auto& level : result.levels)
        if (!level.ok) std::cerr << "error: level n = " << level.n << " failed: " << level.failure << '\n';

    if (cfg.emit_csv) {
        OutputGuard out(dir);
        out.write("rates.csv", [&](std::ostream& os) { write_rates_csv(os, result.table); });
        out.commit();
    }
    if (cfg.pretty) write_rates_pretty(std::cout, result.table);
    else write_rates_csv(std::cout, result.table);
    if (!result.complete) {
        std::cerr << "study incomplete: rates cover the levels before the first failure\n";
        return 3;
    }
    return 0;
}

int cmd_audit(const RunConfig& cfg) {
    const Scenario sc = cfg.make_scenario();
    const AuditReport r = audit(sc, cfg.audit_samples);
    const double tol = 1e-6;
    std::cout << "scenario " << sc.name << ", params " << cfg.resolved_param_set() << ", " << r.samples
              << " samples\n";
    std::cout << "body force relative discrepancy:  " << format_number(r.body_force) << '\n';
    std::cout << "flow source relative discrepancy: " << format_number(r.flow_source) << '\n';
    std::cout << "traction relative discrepancy:    " << format_number(r.traction) << '\n';
    std::cout << (r.passed(tol) ? "PASS" : "FAIL") << " (tolerance " << format_number(tol) << ")\n";
    return r.passed(tol) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear poroelasticity solver (P2-P1-P1 multiphysics scheme) and verification driver"};
    app.require_subcommand(1);

    OptionSet run_opts, study_opts, audit_opts, energy_opts;
    auto* run = app.add_subcommand("run", "solve one configuration; writes solution_t<T>.vtk and monitors.csv");
    run_opts.attach(*run);
    auto* study = app.add_subcommand("study", "convergence study over a mesh list; writes rates.csv");
    study_opts.attach(*study);
    auto* aud = app.add_subcommand("audit", "check manufactured sources against the exact fields");
    audit_opts.attach(*aud);
    auto* energy = app.add_subcommand("energy", "rerun and write only the monitor log (conservation, energy)");
    energy_opts.attach(*energy);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) return cmd_run(run_opts.resolve(Command::Run), false);
        if (*study) return cmd_study(study_opts.resolve(Command::Study));
        if (*aud) return cmd_audit(audit_opts.resolve(Command::Audit));
        if (*energy) return cmd_run(energy_opts.resolve(Command::Energy), true);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
