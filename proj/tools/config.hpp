#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poromfe/assembly.hpp"
#include "poromfe/mms.hpp"
#include "poromfe/verify.hpp"

namespace CLI {
class App;
}

namespace poromfe::cli {

enum class Command { Run, Study, Audit, Energy };

struct RunConfig {
    std::string scenario = "test1";
    std::optional<std::string> param_set;   // default: test2-soft for test2, test1-soft otherwise
    std::optional<double> lambda, mu, alpha, c0, permeability, mu_f, rho_f;
    std::optional<Vec2> gravity;
    double flow_source = 1.0;                // constant source of the flux scenario

    int n = 6;
    std::vector<int> mesh_list;

    int theta = 1;
    std::optional<double> dt;
    std::optional<double> dt_factor;         // dt = factor * h^2
    std::optional<double> final_time;
    double dt_h2_constant = 1.0;

    double newton_tol = 1e-10;
    int newton_max_iter = 20;
    double linear_tol = 1e-12;
    bool parallel = false;
    int jobs = 1;

    std::optional<std::filesystem::path> output_dir;
    bool emit_csv = true;
    bool emit_vtk = true;
    bool emit_monitors = true;
    bool pretty = false;

    EnergyConstants constants;
    int audit_samples = 20;

    std::string resolved_param_set() const;
    ModelParams params() const;
    Scenario make_scenario() const;
    /// --output-dir, else $PF_OUTPUT_DIR, else the working directory.
    std::filesystem::path output_root() const;
    double time_step(int n, Command cmd) const;
};

/// key = value lines with [section] headers; '#' and ';' start comments.
/// Returns "section.key" -> value. Throws ConfigError on malformed lines.
std::map<std::string, std::string> parse_ini(std::istream& in, const std::string& origin);

/// Applies one "section.key" setting. Throws ConfigError for unknown keys or
/// values that do not parse.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every accepted "section.key", in documentation order.
std::vector<std::string> known_keys();

/// Registers the config options on a subcommand. After parsing, call
/// resolve() to merge the optional config file with the flags (flags win).
class OptionSet {
public:
    void attach(CLI::App& app);
    RunConfig resolve(Command cmd) const;

private:
    std::string config_file_;
    std::map<std::string, std::string> flag_values_;
    std::vector<std::pair<std::string, std::string>> bindings_;  // flag storage key -> setting key
    bool pretty_ = false;
    bool parallel_ = false;
};

}  // namespace poromfe::cli
