#include "history_stepper.hpp"

#include "vide/asymptotics.hpp"
#include "vide/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vide::detail {

namespace {

constexpr int kMaxFixedPointIterations = 8;
constexpr int kUndampedIterations = 4;
constexpr int kPinnedStepsForBlowup = 10;
constexpr double kNegligibleHistory = 1e-17;

Aborted abort_for(int outcome_code, double t) {
    switch (outcome_code) {
        case 1: return {AbortReason::NonConvergentImplicitStep, t};
        case 2: return {AbortReason::PositivityLoss, t};
        default: return {AbortReason::NonFiniteValue, t};
    }
}

}  // namespace

BlowUpDetected finalize_blowup(const Trajectory& traj, const SolverConfig& config) {
    const double t_last = traj.times.back();
    BlowUpDetected b;
    try {
        std::tie(b.T_est, b.T_err) = estimate_blowup_time(traj, config);
    } catch (const AccelerationError&) {
        b.T_est = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(b.T_est > t_last)) {
        // Power-law blow-up x ~ (T - t)^{-p} has T - t = p x / x'; p is unknown, so the
        // distance x / x' is reported with an error of the same size.
        const double gap = traj.values.back() / std::max(traj.derivs.back(), 1e-300);
        b.T_est = t_last + gap;
        b.T_err = gap;
    }
    return b;
}

HistoryStepper::HistoryStepper(HistoryProblem problem, SolverConfig config)
    : problem_(std::move(problem)), config_(config) {
    validate(config_);
    if (!(problem_.x0 > 0.0)) throw DomainError("initial value must be positive");
    if (problem_.pre_times.size() != problem_.pre_values.size()) {
        throw ConfigError("initial function: times and values differ in length");
    }
    t_min_ = problem_.pre_times.empty() ? 0.0 : problem_.pre_times.front();
    for (std::size_t i = 0; i < problem_.pre_times.size(); ++i) {
        const double v = problem_.pre_values[i];
        if (!(v > 0.0)) throw DomainError("initial function must be positive");
        push_node(problem_.pre_times[i], v, 0.0, 0.0, 0.0);
    }
    first_solution_node_ = t_.size();
    push_node(0.0, problem_.x0, 0.0, 0.0, forcing_H(0.0));
    conv_.back() = history_sum(0.0);
    dx_.back() = forcing_h(0.0) + conv_.back();
}

void HistoryStepper::push_node(double t, double x, double dx, double conv, double H) {
    const double fx = problem_.f(x);
    t_.push_back(t);
    x_.push_back(x);
    dx_.push_back(dx);
    fx_.push_back(fx);
    fmax_.push_back(fmax_.empty() ? fx : std::max(fmax_.back(), fx));
    conv_.push_back(conv);
    H_.push_back(H);
}

void HistoryStepper::pop_node() {
    t_.pop_back();
    x_.pop_back();
    dx_.pop_back();
    fx_.pop_back();
    fmax_.pop_back();
    conv_.pop_back();
    H_.pop_back();
}

double HistoryStepper::interpolate(double s) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), s);
    std::size_t j = static_cast<std::size_t>(std::distance(t_.begin(), it));
    j = std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, t_.size() - 2);
    if (j + 1 <= first_solution_node_) {
        const double u = (s - t_[j]) / (t_[j + 1] - t_[j]);
        return x_[j] + u * (x_[j + 1] - x_[j]);
    }
    return hermite(t_[j], x_[j], dx_[j], t_[j + 1], x_[j + 1], dx_[j + 1], s);
}

double HistoryStepper::history_sum(double t) const {
    const auto& k = problem_.kernel;
    const std::size_t n = t_.size() - 1;
    const double a = std::max(t_min_, t - problem_.window);
    const bool truncate = config_.truncate_history && problem_.kernel_sup.has_value();
    const double sup = problem_.kernel_sup.value_or(0.0);

    double right = k(t - t_[n]) * fx_[n];
    double sum = 0.5 * (t - t_[n]) * right;
    for (std::size_t j = n; j > 0; --j) {
        const double tl = t_[j - 1];
        if (tl < a) {
            if (t_[j] > a) {
                const double fa = problem_.f(interpolate(a));
                sum += 0.5 * (t_[j] - a) * (k(t - a) * fa + right);
            }
            break;
        }
        const double left = k(t - tl) * fx_[j - 1];
        sum += 0.5 * (t_[j] - tl) * (left + right);
        right = left;
        if (truncate && (tl - std::max(a, t_[0])) * sup * fmax_[j - 1] <= kNegligibleHistory * sum) {
            break;
        }
    }
    return sum;
}

HistoryStepper::StepResult HistoryStepper::implicit_step(double step) const {
    using Outcome = StepResult::Outcome;
    const std::size_t n = t_.size() - 1;
    const double t = t_[n] + step;
    const double k0 = problem_.kernel_at_zero;
    const double S = history_sum(t);

    StepResult r;
    r.H = forcing_H(t);
    const double base = x_[n] + (r.H - H_[n]) + 0.5 * step * conv_[n];

    double x = x_[n] + step * dx_[n];
    if (n > first_solution_node_) {
        const double d2 = (dx_[n] - dx_[n - 1]) / (t_[n] - t_[n - 1]);
        x += 0.5 * step * step * d2;
    }
    if (!(x > 0.0) || !std::isfinite(x)) x = x_[n];

    const double fp_tol = std::max(1e-3 * config_.rel_tol, 4.0 * std::numeric_limits<double>::epsilon());
    bool converged = false;
    for (int it = 0; it < kMaxFixedPointIterations; ++it) {
        const double next = base + 0.5 * step * (S + 0.5 * step * k0 * problem_.f(x));
        if (!std::isfinite(next)) {
            r.outcome = Outcome::NonFinite;
            return r;
        }
        if (!(next > 0.0)) {
            r.outcome = Outcome::NonPositive;
            return r;
        }
        if (std::abs(next - x) <= fp_tol * std::abs(next)) {
            x = next;
            converged = true;
            break;
        }
        x = it >= kUndampedIterations ? 0.5 * (x + next) : next;
    }
    if (!converged) {
        r.outcome = Outcome::NonConvergent;
        return r;
    }
    r.x = x;
    r.conv = S + 0.5 * step * k0 * problem_.f(x);
    r.dx = forcing_h(t) + r.conv;
    if (!std::isfinite(r.dx)) r.outcome = Outcome::NonFinite;
    return r;
}

Trajectory HistoryStepper::run() {
    using Outcome = StepResult::Outcome;
    Trajectory traj;
    traj.x0 = problem_.x0;
    traj.ratio = config_.geometric_ratio;
    traj.problem = problem_.name;

    const double t_end = config_.t_end;
    const double tol = config_.rel_tol;
    int next_crossing = 1;
    int pinned = 0;
    double step = config_.fixed_step.value_or(config_.initial_step);
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    std::optional<TrajectoryStatus> status;

    auto accept_node = [&](const StepResult& r, double t) {
        const std::size_t n = t_.size() - 1;
        record_crossings(traj.crossings, next_crossing, problem_.x0, config_.geometric_ratio, t_[n],
                         x_[n], dx_[n], t, r.x, r.dx);
        push_node(t, r.x, r.dx, r.conv, r.H);
    };

    while (!status) {
        const std::size_t n = t_.size() - 1;
        const double tn = t_[n];
        const double remaining = t_end - tn;
        if (remaining <= 0.0) {
            status = ReachedHorizon{t_end};
            break;
        }
        if (accepted >= config_.max_steps || attempts >= 8 * config_.max_steps) {
            status = Aborted{AbortReason::StepLimit, tn};
            break;
        }
        ++attempts;
        const double floor_step =
            std::max(config_.min_step, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(tn));
        double h = std::min({step, config_.max_step, 0.25 * problem_.window});
        if (config_.fixed_step) h = std::min(*config_.fixed_step, 0.25 * problem_.window);
        const bool final_step = h >= remaining * (1.0 - 1e-12);
        if (final_step) h = remaining;

        if (config_.fixed_step) {
            const StepResult r = implicit_step(h);
            if (r.outcome != Outcome::Ok) {
                status = abort_for(static_cast<int>(r.outcome), tn);
                break;
            }
            accept_node(r, final_step ? t_end : tn + h);
            ++accepted;
            if (r.x >= config_.blowup_threshold) status = BlowUpDetected{};
            continue;
        }

        const StepResult coarse = implicit_step(h);
        StepResult fine1;
        StepResult fine2;
        bool pushed = false;
        if (coarse.outcome == Outcome::Ok) {
            fine1 = implicit_step(0.5 * h);
            if (fine1.outcome == Outcome::Ok) {
                push_node(tn + 0.5 * h, fine1.x, fine1.dx, fine1.conv, fine1.H);
                pushed = true;
                fine2 = implicit_step(0.5 * h);
            }
        }
        const Outcome failure = coarse.outcome != Outcome::Ok ? coarse.outcome
                                : fine1.outcome != Outcome::Ok ? fine1.outcome
                                                               : fine2.outcome;
        if (failure != Outcome::Ok) {
            if (pushed) pop_node();
            if (0.5 * h >= floor_step) {
                step = 0.5 * h;
                continue;
            }
            status = abort_for(static_cast<int>(failure), tn);
            break;
        }

        const double err = std::abs(fine2.x - coarse.x) / 3.0;
        bool forced = false;
        if (err > tol * std::abs(fine2.x)) {
            if (0.5 * h >= floor_step) {
                pop_node();
                step = 0.5 * h;
                continue;
            }
            forced = true;
        }

        // fine1 is already on the grid; record its crossings against the previous node.
        pop_node();
        accept_node(fine1, tn + 0.5 * h);
        accept_node(fine2, final_step ? t_end : tn + h);
        ++accepted;

        if (forced) {
            pinned = fine2.dx > dx_[n] ? pinned + 1 : 0;
            if (pinned >= kPinnedStepsForBlowup) status = BlowUpDetected{};
        } else {
            pinned = 0;
            if (err < tol * std::abs(fine2.x) / 16.0 && !final_step) step = 2.0 * h;
            else if (!final_step) step = h;
        }
        if (fine2.x >= config_.blowup_threshold) status = BlowUpDetected{};
    }

    for (std::size_t i = first_solution_node_; i < t_.size(); ++i) {
        traj.times.push_back(t_[i]);
        traj.values.push_back(x_[i]);
        traj.derivs.push_back(dx_[i]);
    }

    if (std::holds_alternative<BlowUpDetected>(*status)) status = finalize_blowup(traj, config_);
    traj.status = *status;
    return traj;
}

}  // namespace vide::detail
