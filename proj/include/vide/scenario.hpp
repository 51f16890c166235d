#pragma once

#include "vide/solver.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vide {

enum class Diagnostic { BlowUpRate, GrowthRate, Perturbation };

std::string to_string(Diagnostic d);
Diagnostic parse_diagnostic(std::string_view name);

/// Overrides on top of SolverConfig defaults; unset fields keep the default.
struct SolverOverrides {
    std::optional<double> initial_step;
    std::optional<double> min_step;
    std::optional<double> max_step;
    std::optional<double> rel_tol;
    std::optional<double> blowup_threshold;
    std::optional<double> geometric_ratio;
    std::optional<double> t_end;
    std::optional<double> max_steps;

    bool operator==(const SolverOverrides&) const = default;
};

/// One sweep axis: a qualified parameter (e.g. "nonlinearity.beta") and its values.
struct GridAxis {
    std::string key;
    std::vector<double> values;

    bool operator==(const GridAxis&) const = default;
};

struct Scenario {
    std::string name = "scenario";
    std::string kernel_id = "power_decay:omega=1,alpha=0";
    std::string nonlinearity_id = "power_plus_one:beta=2";
    std::string forcing_id = "zero";
    double x0 = 1.0;
    double rel_band = 0.05;
    SolverOverrides solver;
    std::set<Diagnostic> diagnostics;
    std::vector<GridAxis> grid;

    bool operator==(const Scenario&) const = default;
};

/// Threshold used for Osgood-infinite runs unless the scenario sets one: the solution
/// must be allowed to grow through the whole double range.
inline constexpr double kGlobalRunThreshold = 1e300;

/// Parses the INI text; throws ConfigError on syntax errors, unknown keys, ids that do
/// not resolve, x0 <= 0, or a growth-rate request with a kernel that is not L1.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string format_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Replaces one id parameter (grid keys: nonlinearity.*, kernel.*, forcing.*; short
/// aliases beta, omega, gamma, K).
Scenario with_parameter(const Scenario& s, const std::string& key, double value);
std::string canonical_grid_key(const std::string& key);

/// SolverConfig defaults with the scenario overrides applied.  Osgood-infinite runs
/// get kGlobalRunThreshold unless blowup_threshold is set.
SolverConfig solver_config(const Scenario& s, bool osgood_infinite);

}  // namespace vide
