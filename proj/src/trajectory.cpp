#include "vide/trajectory.hpp"

#include "vide/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

namespace vide {

namespace {

std::size_t segment(const std::vector<double>& times, double t) {
    if (times.size() < 2 || t < times.front() || t > times.back()) {
        throw DomainError(fmt::format("t = {} outside the trajectory grid", t));
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto j = static_cast<std::size_t>(std::distance(times.begin(), it));
    return std::min(j == 0 ? 0 : j - 1, times.size() - 2);
}

}  // namespace

double hermite(double t0, double y0, double d0, double t1, double y1, double d1, double t) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 +
           (u3 - u2) * h * d1;
}

void record_crossings(std::vector<Crossing>& out, int& next_index, double x0, double ratio,
                      double t0, double y0, double d0, double t1, double y1, double d1) {
    for (;;) {
        const double level = x0 * std::pow(ratio, next_index);
        if (!std::isfinite(level) || !(y1 >= level)) return;
        double lo = t0;
        double hi = t1;
        if (y0 < level) {
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                if (hermite(t0, y0, d0, t1, y1, d1, mid) < level) lo = mid; else hi = mid;
            }
        }
        out.push_back({next_index, level, hi});
        ++next_index;
    }
}

double Trajectory::log_value(std::size_t i) const {
    return log_values.empty() ? std::log(values[i]) : log_values[i];
}

double Trajectory::value_at(double t) const {
    if (times.size() == 1 && t == times.front()) return values.front();
    const std::size_t j = segment(times, t);
    return hermite(times[j], values[j], derivs[j], times[j + 1], values[j + 1], derivs[j + 1], t);
}

double Trajectory::log_value_at(double t) const {
    if (times.size() == 1 && t == times.front()) return log_value(0);
    const std::size_t j = segment(times, t);
    if (std::isfinite(values[j + 1]) && values[j] > 0.0) {
        const double x = hermite(times[j], values[j], derivs[j], times[j + 1], values[j + 1],
                                 derivs[j + 1], t);
        if (x > 0.0 && std::isfinite(x)) return std::log(x);
    }
    const double u = (t - times[j]) / (times[j + 1] - times[j]);
    return log_value(j) + u * (log_value(j + 1) - log_value(j));
}

std::string to_string(AbortReason reason) {
    switch (reason) {
        case AbortReason::NonConvergentImplicitStep: return "NonConvergentImplicitStep";
        case AbortReason::PositivityLoss: return "PositivityLoss";
        case AbortReason::NonFiniteValue: return "NonFiniteValue";
        case AbortReason::StepLimit: return "StepLimit";
    }
    return "Unknown";
}

std::string status_name(const TrajectoryStatus& status) {
    if (std::holds_alternative<ReachedHorizon>(status)) return "horizon";
    if (std::holds_alternative<BlowUpDetected>(status)) return "blowup";
    return "aborted";
}

void recompute_crossings(Trajectory& traj) {
    traj.crossings.clear();
    int next = 1;
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        record_crossings(traj.crossings, next, traj.x0, traj.ratio, traj.times[i], traj.values[i],
                         traj.derivs[i], traj.times[i + 1], traj.values[i + 1], traj.derivs[i + 1]);
    }
}

}  // namespace vide
