#pragma once

#include "vide/asymptotics.hpp"
#include "vide/trajectory.hpp"

#include <ostream>
#include <string>

namespace vide {

/// `t,x,dx,step` rows (step = t_n - t_{n-1}), then `# problem=` and `# status=` lines.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// `index,level,t`.
void write_crossings_csv(std::ostream& out, const Trajectory& traj);

/// `t,value` rows and a `# functional=... verdict=...` line.
void write_diagnostic_csv(std::ostream& out, const RateDiagnostic& d);
void write_perturbation_csv(std::ostream& out, const PerturbationReport& r);

/// Gnuplot script plotting x(t) (log scale) from the trajectory CSV.  When a
/// crossings file is given the crossing times are overlaid.
void write_plot_script(std::ostream& out, const std::string& title, const std::string& trajectory_csv,
                       const std::string& crossings_csv = {});

/// One-line status summary, e.g. "status=blowup T_est=2.1032 T_err=3e-06".
std::string status_summary(const TrajectoryStatus& status);

}  // namespace vide
