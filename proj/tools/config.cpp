#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "CLI11.hpp"
#include "poromfe/errors.hpp"

namespace poromfe::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const std::string s = trim(v);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    int out = 0;
    const std::string s = trim(v);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    std::string s = trim(v);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
    return out;
}

struct Setting {
    const char* key;
    const char* flag;
    const char* help;
    std::function<void(RunConfig&, const std::string&, const std::string&)> apply;
};

const std::vector<Setting>& settings() {
    static const std::vector<Setting> table = {
        {"problem.scenario", "--scenario", "test1 | test2 | flux | zero (default test1)",
         [](RunConfig& c, const std::string&, const std::string& v) { c.scenario = trim(v); }},
        {"problem.params", "--params",
         "parameter table test1-soft | test1-stiff | test2-soft | test2-stiff (default test1-soft, test2-soft for test2)",
         [](RunConfig& c, const std::string&, const std::string& v) { c.param_set = trim(v); }},
        {"problem.lambda", "--lambda", "override the Lame constant lambda",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.lambda = to_double(k, v); }},
        {"problem.mu", "--mu", "override the Lame constant mu",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.mu = to_double(k, v); }},
        {"problem.alpha", "--alpha", "override the Biot-Willis constant",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
        {"problem.c0", "--c0", "override the storage coefficient",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.c0 = to_double(k, v); }},
        {"problem.permeability", "--permeability", "override K = k I",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.permeability = to_double(k, v); }},
        {"problem.mu_f", "--mu-f", "fluid viscosity (default 1)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.mu_f = to_double(k, v); }},
        {"problem.rho_f", "--rho-f", "fluid density (default 0)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.rho_f = to_double(k, v); }},
        {"problem.gravity", "--gravity", "gravity vector gx,gy (default 0,0)",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const auto parts = split(v);
             if (parts.size() != 2) throw ConfigError(k + ": expected gx,gy");
             c.gravity = Vec2{to_double(k, parts[0]), to_double(k, parts[1])};
         }},
        {"problem.flow_source", "--flow-source", "constant fluid source of the flux scenario (default 1)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.flow_source = to_double(k, v); }},
        {"mesh.n", "--n", "cells per side of the uniform mesh (default 6)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_int(k, v); }},
        {"mesh.list", "--mesh-list", "comma-separated mesh levels for study (default 3,6,12,24)",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.mesh_list.clear();
             for (const auto& p : split(v)) c.mesh_list.push_back(to_int(k, p));
         }},
        {"time.theta", "--theta", "1: monolithic, 0: decoupled (default 1)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.theta = to_int(k, v); }},
        {"time.dt", "--dt", "fixed time step (default: dt-factor * h^2)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); }},
        {"time.dt_factor", "--dt-factor",
         "dt = factor * h^2 (default 1 for run/energy; study: 1/2 for theta=1, 1 for theta=0)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.dt_factor = to_double(k, v); }},
        {"time.final_time", "--final-time", "final time (default: the scenario's, 1)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.final_time = to_double(k, v); }},
        {"time.dt_h2_constant", "--dt-h2-constant", "warn for theta=0 when dt > c h^2 (default 1)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.dt_h2_constant = to_double(k, v); }},
        {"solver.newton_tol", "--newton-tol", "relative Newton tolerance (default 1e-10)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.newton_tol = to_double(k, v); }},
        {"solver.newton_max_iter", "--newton-max-iter", "Newton iteration limit (default 20)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.newton_max_iter = to_int(k, v); }},
        {"solver.linear_tol", "--linear-tol", "relative residual of the linear solves (default 1e-12)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.linear_tol = to_double(k, v); }},
        {"solver.parallel", "--parallel-kernels", "run element kernels under OpenMP (true/false, default false)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.parallel = to_bool(k, v); }},
        {"solver.jobs", "--jobs", "mesh levels solved concurrently by study (default 1)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.jobs = to_int(k, v); }},
        {"output.dir", "--output-dir", "output directory (default $PF_OUTPUT_DIR, else .)",
         [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); }},
        {"output.csv", "--csv", "write rates.csv (true/false, default true)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.emit_csv = to_bool(k, v); }},
        {"output.vtk", "--vtk", "write the terminal fields as VTK (true/false, default true)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.emit_vtk = to_bool(k, v); }},
        {"output.monitors", "--monitors", "write monitors.csv (true/false, default true)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.emit_monitors = to_bool(k, v); }},
        {"output.pretty", "", "aligned tables on stdout (true/false)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.pretty = to_bool(k, v); }},
        {"energy.c1", "--c1", "constant C1 of the energy functionals (default 0)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.constants.c1 = to_double(k, v); }},
        {"energy.c2", "--c2", "constant C2 (default 0)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.constants.c2 = to_double(k, v); }},
        {"energy.c4", "--c4", "constant C4 (default 0)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.constants.c4 = to_double(k, v); }},
        {"audit.samples", "--samples", "sample points of the source audit (default 20)",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.audit_samples = to_int(k, v); }},
    };
    return table;
}

void validate(const RunConfig& c, Command cmd) {
    if (c.n < 1) throw ConfigError("mesh.n must be >= 1");
    if (c.theta != 0 && c.theta != 1) throw ConfigError("time.theta must be 0 or 1");
    for (int n : c.mesh_list)
        if (n < 1) throw ConfigError("mesh.list entries must be >= 1");
    if (c.jobs < 1) throw ConfigError("solver.jobs must be >= 1");
    if (c.dt && !(*c.dt > 0.0)) throw ConfigError("time.dt must be positive");
    if (c.dt_factor && !(*c.dt_factor > 0.0)) throw ConfigError("time.dt_factor must be positive");
    if (c.audit_samples < 1) throw ConfigError("audit.samples must be >= 1");
    if ((cmd == Command::Run || cmd == Command::Energy) && c.mesh_list.size() > 1)
        throw ConfigError("a single run takes one mesh; got a mesh list of " + std::to_string(c.mesh_list.size()) +
                          " levels");
    if (cmd == Command::Study && c.mesh_list.size() == 1) throw ConfigError("study needs at least 2 mesh levels");
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end())
        throw ConfigError("unknown scenario '" + c.scenario + "'");
}

}  // namespace

std::string RunConfig::resolved_param_set() const {
    if (param_set) return *param_set;
    return scenario == "test2" ? "test2-soft" : "test1-soft";
}

ModelParams RunConfig::params() const {
    ModelParams p;
    try {
        p = poromfe::param_set(resolved_param_set());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (lambda) p.lambda = *lambda;
    if (mu) p.mu = *mu;
    if (alpha) p.alpha = *alpha;
    if (c0) p.c0 = *c0;
    if (permeability) p.permeability = *permeability * Mat2::identity();
    if (mu_f) p.mu_f = *mu_f;
    if (rho_f) p.rho_f = *rho_f;
    if (gravity) p.gravity = *gravity;
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

Scenario RunConfig::make_scenario() const {
    const ModelParams p = params();
    Scenario s = scenario == "flux" ? pure_flux(p, flow_source) : poromfe::make_scenario(scenario, p);
    if (final_time) s.final_time = *final_time;
    return s;
}

std::filesystem::path RunConfig::output_root() const {
    if (output_dir) return *output_dir;
    if (const char* env = std::getenv("PF_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

double RunConfig::time_step(int level, Command cmd) const {
    if (dt) return *dt;
    const double h = 1.0 / level;
    const double factor = dt_factor ? *dt_factor : (cmd == Command::Study ? default_dt_factor(theta) : 1.0);
    return factor * h * h;
}

std::map<std::string, std::string> parse_ini(std::istream& in, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        const std::string body = trim(cut == std::string::npos ? line : line.substr(0, cut));
        if (body.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": missing key");
        out[section.empty() ? key : section + "." + key] = trim(body.substr(eq + 1));
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& s : settings()) {
        if (key == s.key) {
            s.apply(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& s : settings()) keys.emplace_back(s.key);
    return keys;
}

void OptionSet::attach(CLI::App& app) {
    app.add_option("-c,--config", config_file_, "INI configuration file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
    for (const auto& s : settings()) {
        if (std::string(s.flag).empty()) continue;
        app.add_option(s.flag, flag_values_[s.key], s.help);
        bindings_.emplace_back(s.key, s.flag);
    }
    app.add_flag("--pretty", pretty_, "print aligned tables instead of CSV summaries");
    app.add_flag("--parallel", parallel_, "shorthand for --parallel-kernels true");
}

RunConfig OptionSet::resolve(Command cmd) const {
    RunConfig cfg;
    if (!config_file_.empty()) {
        std::ifstream in(config_file_);
        if (!in) throw ConfigError("cannot read config file " + config_file_);
        for (const auto& [key, value] : parse_ini(in, config_file_)) apply_setting(cfg, key, value);
    }
    for (const auto& [key, flag] : bindings_) {
        const auto it = flag_values_.find(key);
        if (it != flag_values_.end() && !it->second.empty()) apply_setting(cfg, key, it->second);
    }
    if (pretty_) cfg.pretty = true;
    if (parallel_) cfg.parallel = true;
    validate(cfg, cmd);
    return cfg;
}

}  // namespace poromfe::cli
