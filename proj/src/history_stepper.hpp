#pragma once

#include "vide/solver.hpp"
#include "vide/trajectory.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace vide::detail {

/// x'(t) = h(t) + int_{max(t_min, t - window)}^t k(t - s) f(x(s)) ds.
///
/// Covers the VIDE (t_min = 0, window = kernel support) and both bounded-delay
/// equations (t_min = -delta, window = delta, history seeded from psi).
struct HistoryProblem {
    std::function<double(double)> kernel;
    double kernel_at_zero = 0.0;
    std::optional<double> kernel_sup;
    double window = std::numeric_limits<double>::infinity();
    std::function<double(double)> f;
    /// Running integral of the forcing and the forcing itself; empty means zero.
    std::function<double(double)> H;
    std::function<double(double)> h;
    /// Initial-function samples on [t_min, 0), strictly increasing, all negative.
    std::vector<double> pre_times;
    std::vector<double> pre_values;
    double x0 = 1.0;
    std::string name = "vide";
};

/// Blow-up status from the crossing times, with a conservative x / x' fallback when
/// acceleration fails or lands before the last node.
BlowUpDetected finalize_blowup(const Trajectory& traj, const SolverConfig& config);

class HistoryStepper {
public:
    HistoryStepper(HistoryProblem problem, SolverConfig config);

    Trajectory run();

private:
    struct StepResult {
        enum class Outcome { Ok, NonConvergent, NonPositive, NonFinite };
        Outcome outcome = Outcome::Ok;
        double x = 0.0;
        double dx = 0.0;
        double conv = 0.0;
        double H = 0.0;
    };

    void push_node(double t, double x, double dx, double conv, double H);
    void pop_node();

    /// Memory integral at t > last node, without the unknown end-point term.
    [[nodiscard]] double history_sum(double t) const;
    /// x at s inside the stored grid (linear on the initial function, Hermite after).
    [[nodiscard]] double interpolate(double s) const;
    [[nodiscard]] StepResult implicit_step(double step) const;
    [[nodiscard]] double forcing_H(double t) const { return problem_.H ? problem_.H(t) : 0.0; }
    [[nodiscard]] double forcing_h(double t) const { return problem_.h ? problem_.h(t) : 0.0; }

    HistoryProblem problem_;
    SolverConfig config_;
    double t_min_ = 0.0;
    std::size_t first_solution_node_ = 0;

    std::vector<double> t_;
    std::vector<double> x_;
    std::vector<double> dx_;
    std::vector<double> fx_;
    std::vector<double> fmax_;  // prefix max of f(x)
    std::vector<double> conv_;
    std::vector<double> H_;
};

}  // namespace vide::detail
