#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vide {

struct ReachedHorizon {
    double t_end = 0.0;
};

struct BlowUpDetected {
    double T_est = 0.0;
    double T_err = 0.0;
};

enum class AbortReason {
    NonConvergentImplicitStep,
    PositivityLoss,
    NonFiniteValue,
    StepLimit,
};

struct Aborted {
    AbortReason reason = AbortReason::NonConvergentImplicitStep;
    double t = 0.0;
};

using TrajectoryStatus = std::variant<ReachedHorizon, BlowUpDetected, Aborted>;

/// First time x reaches x0 * R^index.
struct Crossing {
    int index = 0;
    double level = 0.0;
    double time = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> derivs;
    /// log x at each node.  Filled by solvers that integrate in log space, where
    /// values may overflow to inf while log_values stay finite.
    std::vector<double> log_values;
    TrajectoryStatus status = ReachedHorizon{};
    std::vector<Crossing> crossings;
    double x0 = 1.0;
    double ratio = 2.0;
    std::string problem = "vide";

    [[nodiscard]] bool reached_horizon() const noexcept {
        return std::holds_alternative<ReachedHorizon>(status);
    }
    [[nodiscard]] bool blew_up() const noexcept {
        return std::holds_alternative<BlowUpDetected>(status);
    }
    [[nodiscard]] bool aborted() const noexcept { return std::holds_alternative<Aborted>(status); }
    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }

    /// log x at node i, from log_values when present.
    [[nodiscard]] double log_value(std::size_t i) const;
    /// x(t) by cubic Hermite interpolation on the grid.
    [[nodiscard]] double value_at(double t) const;
    /// log x(t); Hermite on log x (slope x'/x) so it stays finite past overflow.
    [[nodiscard]] double log_value_at(double t) const;
};

std::string to_string(AbortReason reason);
std::string status_name(const TrajectoryStatus& status);

/// Cubic Hermite interpolant on [t0, t1].
double hermite(double t0, double y0, double d0, double t1, double y1, double d1, double t);

/// Appends every crossing of x0 * R^n inside the step [t0, t1] (cubic Hermite plus
/// bisection).  `next_index` is the first level not yet crossed and is advanced.
void record_crossings(std::vector<Crossing>& out, int& next_index, double x0, double ratio,
                      double t0, double y0, double d0, double t1, double y1, double d1);

/// Rebuilds traj.crossings from the stored grid (for trajectories assembled by hand).
void recompute_crossings(Trajectory& traj);

}  // namespace vide
