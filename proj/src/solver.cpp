#include "vide/solver.hpp"

#include "history_stepper.hpp"
#include "vide/asymptotics.hpp"
#include "vide/errors.hpp"

#include <fmt/core.h>

#include <cmath>

namespace vide {

void validate(const SolverConfig& c) {
    if (!(c.min_step > 0.0 && c.min_step <= c.initial_step && c.initial_step <= c.max_step)) {
        throw ConfigError(fmt::format("solver: need 0 < min_step <= initial_step <= max_step (got {}, {}, {})",
                                      c.min_step, c.initial_step, c.max_step));
    }
    if (!(c.rel_tol > 0.0 && c.rel_tol <= 1e-2)) {
        throw ConfigError(fmt::format("solver: rel_tol = {} outside (0, 1e-2]", c.rel_tol));
    }
    if (!(c.geometric_ratio > 1.0)) throw ConfigError("solver: geometric ratio must exceed 1");
    if (!(c.blowup_threshold > 0.0)) throw ConfigError("solver: blow-up threshold must be positive");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("solver: t_end must be finite and >= 0");
    if (c.fixed_step && !(*c.fixed_step > 0.0)) throw ConfigError("solver: fixed step must be positive");
    if (c.max_steps == 0) throw ConfigError("solver: max_steps must be positive");
}

Trajectory solve(const Kernel& kernel, const Nonlinearity& nl, const Forcing& forcing, double x0,
                 const SolverConfig& config) {
    detail::HistoryProblem p;
    p.kernel = [kernel](double tau) { return kernel(tau); };
    p.kernel_at_zero = kernel.at_zero();
    p.kernel_sup = kernel.sup_bound();
    p.window = kernel.support();
    p.f = [nl](double x) { return nl(x); };
    if (!forcing.is_zero()) {
        p.H = [forcing](double t) { return forcing.H(t); };
        p.h = [forcing](double t) { return forcing.h(t); };
    }
    p.x0 = x0;
    return detail::HistoryStepper(std::move(p), config).run();
}

double convolution_term(const Trajectory& prefix, const Kernel& kernel, const Nonlinearity& nl,
                        double t) {
    const auto& ts = prefix.times;
    if (ts.empty() || t <= ts.front()) return 0.0;
    double sum = 0.0;
    std::size_t j = 0;
    double left = kernel(t - ts[0]) * nl(prefix.values[0]);
    for (; j + 1 < ts.size() && ts[j + 1] <= t; ++j) {
        const double right = kernel(t - ts[j + 1]) * nl(prefix.values[j + 1]);
        sum += 0.5 * (ts[j + 1] - ts[j]) * (left + right);
        left = right;
    }
    if (t > ts[j]) {
        const double right = kernel.at_zero() * nl(prefix.values[j]);
        sum += 0.5 * (t - ts[j]) * (left + right);
    }
    return sum;
}

std::pair<double, double> estimate_blowup_time(const Trajectory& traj, const SolverConfig&) {
    constexpr std::size_t kMinCrossings = 6;
    if (traj.crossings.size() < kMinCrossings) {
        throw AccelerationError(AccelerationError::Kind::InsufficientCrossings,
                                fmt::format("{} crossing times recorded, need {}",
                                            traj.crossings.size(), kMinCrossings));
    }
    std::vector<double> times;
    times.reserve(traj.crossings.size());
    for (const Crossing& c : traj.crossings) times.push_back(c.time);
    const Extrapolation e = aitken_extrapolate(times);
    return {e.limit, e.err};
}

double residual_check(const Trajectory& traj, const Kernel& kernel, const Nonlinearity& nl,
                      const Forcing& forcing, double x0) {
    if (!traj.reached_horizon()) throw DomainError("residual_check needs a run that reached its horizon");
    const auto& ts = traj.times;
    const std::size_t n = ts.size();
    std::vector<double> fx(n);
    for (std::size_t i = 0; i < n; ++i) fx[i] = nl(traj.values[i]);

    double worst = std::abs(traj.values[0] - x0 - forcing.H(ts[0]));
    double prev_conv = 0.0;
    double integral = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double conv = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            conv += 0.5 * (ts[j + 1] - ts[j]) *
                    (kernel(ts[i] - ts[j]) * fx[j] + kernel(ts[i] - ts[j + 1]) * fx[j + 1]);
        }
        integral += 0.5 * (ts[i] - ts[i - 1]) * (prev_conv + conv);
        prev_conv = conv;
        worst = std::max(worst, std::abs(traj.values[i] - x0 - forcing.H(ts[i]) - integral));
    }
    return worst;
}

}  // namespace vide
