#pragma once

#include "vide/asymptotics.hpp"
#include "vide/kernel.hpp"
#include "vide/nonlinearity.hpp"
#include "vide/solver.hpp"
#include "vide/trajectory.hpp"

#include <functional>
#include <optional>
#include <string>

namespace vide {

/// z'(t) = C int_{t-delta}^t f(z(s)) ds, or with C replaced by the weight w(t - s);
/// z = psi on [-delta, 0].
struct DelayProblem {
    double C = 1.0;
    std::optional<Kernel> kernel;
    double delta = 1.0;
    std::function<double(double)> psi = [](double) { return 1.0; };
    std::string psi_id = "constant:1";

    static DelayProblem constant(double C, double delta, double psi_value = 1.0);
    static DelayProblem affine(double C, double delta, double psi_at_zero, double slope);
};

/// Throws ConfigError/DomainError when delta <= 0, C <= 0 or psi is not positive on a sample.
void validate(const DelayProblem& problem);

/// Samples of the initial function used to seed the history.
inline constexpr int kInitialFunctionNodes = 256;

Trajectory solve_delay(const DelayProblem& problem, const Nonlinearity& nl, const SolverConfig& config);
Trajectory solve_delay_kernel(const DelayProblem& problem, const Nonlinearity& nl,
                              const SolverConfig& config);

/// z'' = f(z) by adaptive RK4 (step doubling), blow-up handling as in solve.
Trajectory solve_second_order(const Nonlinearity& nl, double z0, double dz0, double t_end,
                              const SolverConfig& config);

/// y' = sqrt(Fbar(y)), y(0) = 1, integrated as (log y)' = sqrt(Fbar(y)) / y so the run
/// can continue after y overflows; log_values carries log y.  Throws DomainError for
/// an Osgood-finite f when t_end >= F_B(1).
Trajectory solve_aux_ivp(const Nonlinearity& nl, double t_end, const SolverConfig& config);

/// Tail check for a ratio that should tend to 0 along a global run.
struct LagRatioTest {
    std::vector<RateSample> samples;
    bool decreasing_tail = false;
    double final_value = 0.0;
    double threshold = 1e-3;
    bool passed = false;
};

inline constexpr double kLagRatioThreshold = 1e-3;

/// z(t - sigma) / z(t) on 16 points spanning the second half of the run; passes when
/// the last 8 samples decrease and the final one is below the threshold.
LagRatioTest lag_ratio_test(const Trajectory& z, double sigma, double threshold = kLagRatioThreshold);

/// Fbar(z(t - delta)) / Fbar(z(t)) on the same points.
LagRatioTest fbar_lag_ratio_test(const Trajectory& z, const Nonlinearity& nl, double delta,
                                 double threshold = kLagRatioThreshold);

}  // namespace vide
