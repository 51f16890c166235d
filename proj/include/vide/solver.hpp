#pragma once

#include "vide/forcing.hpp"
#include "vide/kernel.hpp"
#include "vide/nonlinearity.hpp"
#include "vide/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <utility>

namespace vide {

struct SolverConfig {
    double initial_step = 1e-3;
    double min_step = 1e-13;
    double max_step = 0.25;
    double rel_tol = 1e-6;
    double blowup_threshold = 1e12;
    double geometric_ratio = 2.0;
    double t_end = 10.0;
    std::size_t max_steps = 2'000'000;
    /// Uniform steps of this size with no error control (convergence-order studies).
    std::optional<double> fixed_step;
    /// Skip history whose whole contribution is below 1e-17 of the running sum.
    /// Needs a kernel sup bound; silently off otherwise.
    bool truncate_history = true;
};

/// Throws ConfigError when the invariants on the fields fail.
void validate(const SolverConfig& config);

Trajectory solve(const Kernel& kernel, const Nonlinearity& nl, const Forcing& forcing, double x0,
                 const SolverConfig& config);

/// Product-trapezoid value of int_0^t w(t-s) f(x(s)) ds on the stored grid.  When t lies
/// past the last node the final panel is closed with the last value held constant.
double convolution_term(const Trajectory& prefix, const Kernel& kernel, const Nonlinearity& nl,
                        double t);

/// Aitken limit of the crossing times.  Throws AccelerationError.
std::pair<double, double> estimate_blowup_time(const Trajectory& traj, const SolverConfig& config);

/// max_i |x_i - x0 - H(t_i) - int_0^{t_i} W(t_i - s) f(x(s)) ds|, W(t) = int_0^t w.
double residual_check(const Trajectory& traj, const Kernel& kernel, const Nonlinearity& nl,
                      const Forcing& forcing, double x0);

}  // namespace vide
