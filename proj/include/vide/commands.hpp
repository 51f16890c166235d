#pragma once

#include "vide/asymptotics.hpp"
#include "vide/scenario.hpp"
#include "vide/trajectory.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace vide {

/// Process exit codes; the only machine-readable contract of the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitUndecided = 2,
    kExitAborted = 3,
};

/// Everything cmd_rates and cmd_sweep compute for one scenario.
struct ScenarioRun {
    Trajectory trajectory;
    OsgoodClass osgood = OsgoodClass::Undecided;
    std::vector<RateDiagnostic> diagnostics;
    std::optional<PerturbationReport> perturbation;
    std::vector<std::string> notes;  ///< requested diagnostics that could not run
};

/// Diagnostics to run: the requested set, or by default the blow-up rate for an
/// Osgood-finite f, the growth rate for an Osgood-infinite f with integrable kernel,
/// and the perturbation criterion when the forcing is not zero.
std::set<Diagnostic> applicable_diagnostics(const Scenario& s, OsgoodClass osgood);

ScenarioRun run_scenario(const Scenario& s);

/// Exit code for a finished run: 3 on abort, 2 when any diagnostic is not Consistent
/// or the perturbation verdict is Inconclusive, 0 otherwise.
int exit_code(const ScenarioRun& run);

int cmd_classify(const Scenario& s, std::ostream& out);
int cmd_solve(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& out);
/// Writes diagnostic CSVs when out_dir is set.
int cmd_rates(const Scenario& s, const std::optional<std::filesystem::path>& out_dir, std::ostream& out);

struct SweepOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    bool emit_configs = false;
    std::vector<GridAxis> extra_grid;  ///< appended to the scenario grid
};

/// Cartesian product of the axes; no axes gives no cells.
std::vector<Scenario> sweep_cells(const Scenario& s, const std::vector<GridAxis>& axes);

/// Writes <out_dir>/<name>_sweep.csv (one row per cell) and, with emit_configs,
/// <out_dir>/<name>_cell<i>.ini.  Returns 0 unless every cell failed (then 3).
int cmd_sweep(const Scenario& s, const SweepOptions& options, std::ostream& out);

/// Parses "key=v1,v2,..".
GridAxis parse_grid_axis(const std::string& text);

}  // namespace vide
