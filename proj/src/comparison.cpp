#include "vide/comparison.hpp"

#include "history_stepper.hpp"
#include "vide/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vide {

namespace {

detail::HistoryProblem delay_history(const DelayProblem& p, const Nonlinearity& nl) {
    validate(p);
    detail::HistoryProblem h;
    h.window = p.delta;
    h.f = [nl](double x) { return nl(x); };
    for (int i = 0; i < kInitialFunctionNodes; ++i) {
        const double t = -p.delta + p.delta * i / kInitialFunctionNodes;
        h.pre_times.push_back(t);
        h.pre_values.push_back(p.psi(t));
    }
    h.x0 = p.psi(0.0);
    return h;
}

struct Rk4State {
    double z = 0.0;
    double v = 0.0;
};

Rk4State rk4_step(const Nonlinearity& nl, Rk4State s, double h) {
    const auto acc = [&nl](double z) { return nl(z); };
    const double k1z = s.v;
    const double k1v = acc(s.z);
    const double k2z = s.v + 0.5 * h * k1v;
    const double k2v = acc(s.z + 0.5 * h * k1z);
    const double k3z = s.v + 0.5 * h * k2v;
    const double k3v = acc(s.z + 0.5 * h * k2z);
    const double k4z = s.v + h * k3v;
    const double k4v = acc(s.z + h * k3z);
    return {s.z + h / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z),
            s.v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)};
}

double rk4_scalar(const std::function<double(double)>& g, double y, double h) {
    const double k1 = g(y);
    const double k2 = g(y + 0.5 * h * k1);
    const double k3 = g(y + 0.5 * h * k2);
    const double k4 = g(y + h * k3);
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

// Step-doubling error of a fourth-order step: |fine - coarse| / 15.
constexpr double kRichardson4 = 15.0;
constexpr int kPinnedStepsForBlowup = 10;

LagRatioTest tail_test(const Trajectory& z, double lag, double threshold,
                       const std::function<double(double, double)>& log_ratio) {
    if (!z.reached_horizon()) throw DomainError("lag ratio tests need a global run");
    const double t_end = z.times.back();
    const double start = std::max(lag, 0.5 * t_end);
    if (!(t_end > start)) throw DomainError("run too short for the requested lag");
    LagRatioTest r;
    r.threshold = threshold;
    constexpr int kPoints = 16;
    for (int i = 0; i < kPoints; ++i) {
        const double t = start + (t_end - start) * i / (kPoints - 1);
        r.samples.push_back({t, std::exp(log_ratio(z.log_value_at(t - lag), z.log_value_at(t)))});
    }
    r.decreasing_tail = true;
    for (int i = kPoints / 2; i < kPoints; ++i) {
        r.decreasing_tail = r.decreasing_tail && r.samples[i].value < r.samples[i - 1].value;
    }
    r.final_value = r.samples.back().value;
    r.passed = r.decreasing_tail && r.final_value < threshold;
    return r;
}

}  // namespace

DelayProblem DelayProblem::constant(double C, double delta, double psi_value) {
    DelayProblem p;
    p.C = C;
    p.delta = delta;
    p.psi = [psi_value](double) { return psi_value; };
    p.psi_id = fmt::format("constant:{}", psi_value);
    return p;
}

DelayProblem DelayProblem::affine(double C, double delta, double psi_at_zero, double slope) {
    DelayProblem p;
    p.C = C;
    p.delta = delta;
    p.psi = [psi_at_zero, slope](double t) { return psi_at_zero + slope * t; };
    p.psi_id = fmt::format("affine:{},{}", psi_at_zero, slope);
    return p;
}

void validate(const DelayProblem& p) {
    if (!(p.delta > 0.0)) throw ConfigError("delay: delta must be positive");
    if (!p.kernel && !(p.C > 0.0)) throw ConfigError("delay: gain C must be positive");
    if (!p.psi) throw ConfigError("delay: missing initial function");
    for (int i = 0; i <= kInitialFunctionNodes; ++i) {
        const double t = -p.delta + p.delta * i / kInitialFunctionNodes;
        const double v = p.psi(t);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(fmt::format("delay: initial function not positive at t = {}", t));
        }
    }
}

Trajectory solve_delay(const DelayProblem& problem, const Nonlinearity& nl, const SolverConfig& config) {
    detail::HistoryProblem h = delay_history(problem, nl);
    const double C = problem.C;
    h.kernel = [C](double) { return C; };
    h.kernel_at_zero = C;
    h.kernel_sup = C;
    h.name = fmt::format("delay:C={},delta={},psi={}", C, problem.delta, problem.psi_id);
    return detail::HistoryStepper(std::move(h), config).run();
}

Trajectory solve_delay_kernel(const DelayProblem& problem, const Nonlinearity& nl,
                              const SolverConfig& config) {
    if (!problem.kernel) throw ConfigError("delay with kernel: no kernel given");
    detail::HistoryProblem h = delay_history(problem, nl);
    const Kernel w = *problem.kernel;
    h.kernel = [w](double tau) { return w(tau); };
    h.kernel_at_zero = w.at_zero();
    h.kernel_sup = w.sup_bound();
    h.window = std::min(problem.delta, w.support());
    h.name = fmt::format("delay_kernel:w={},delta={},psi={}", w.id(), problem.delta, problem.psi_id);
    return detail::HistoryStepper(std::move(h), config).run();
}

Trajectory solve_second_order(const Nonlinearity& nl, double z0, double dz0, double t_end,
                              const SolverConfig& base) {
    SolverConfig config = base;
    config.t_end = t_end;
    validate(config);
    if (!(z0 > 0.0)) throw DomainError("second-order problem needs z0 > 0");

    Trajectory traj;
    traj.x0 = z0;
    traj.ratio = config.geometric_ratio;
    traj.problem = fmt::format("second_order:z0={},dz0={}", z0, dz0);
    traj.times.push_back(0.0);
    traj.values.push_back(z0);
    traj.derivs.push_back(dz0);

    Rk4State s{z0, dz0};
    double t = 0.0;
    double step = config.fixed_step.value_or(config.initial_step);
    int next_crossing = 1;
    int pinned = 0;
    std::size_t accepted = 0;
    std::optional<TrajectoryStatus> status;
    const double tol = config.rel_tol;

    while (!status) {
        const double remaining = t_end - t;
        if (remaining <= 0.0) {
            status = ReachedHorizon{t_end};
            break;
        }
        if (accepted >= config.max_steps) {
            status = Aborted{AbortReason::StepLimit, t};
            break;
        }
        double h = std::min(step, config.max_step);
        if (config.fixed_step) h = *config.fixed_step;
        const bool final_step = h >= remaining * (1.0 - 1e-12);
        if (final_step) h = remaining;

        Rk4State next;
        bool forced = false;
        if (config.fixed_step) {
            next = rk4_step(nl, s, h);
        } else {
            const Rk4State coarse = rk4_step(nl, s, h);
            next = rk4_step(nl, rk4_step(nl, s, 0.5 * h), 0.5 * h);
            const double ez = std::abs(next.z - coarse.z) / std::abs(next.z);
            const double ev = std::abs(next.v - coarse.v) / std::max(std::abs(next.v), std::abs(next.z));
            const double err = std::max(ez, ev) / kRichardson4;
            const bool finite = std::isfinite(next.z) && std::isfinite(next.v) && std::isfinite(err);
            if (!finite || err > tol) {
                if (0.5 * h >= config.min_step) {
                    step = 0.5 * h;
                    continue;
                }
                if (!finite) {
                    status = Aborted{AbortReason::NonFiniteValue, t};
                    break;
                }
                forced = true;
            } else if (!final_step) {
                step = err < tol / 32.0 ? 2.0 * h : h;
            }
        }
        if (!(next.z > 0.0)) {
            status = Aborted{AbortReason::PositivityLoss, t};
            break;
        }
        const double t_next = final_step ? t_end : t + h;
        record_crossings(traj.crossings, next_crossing, z0, config.geometric_ratio, t, s.z, s.v,
                         t_next, next.z, next.v);
        pinned = forced && next.v > s.v ? pinned + 1 : 0;
        s = next;
        t = t_next;
        ++accepted;
        traj.times.push_back(t);
        traj.values.push_back(s.z);
        traj.derivs.push_back(s.v);
        if (s.z >= config.blowup_threshold || pinned >= kPinnedStepsForBlowup) status = BlowUpDetected{};
    }
    if (std::holds_alternative<BlowUpDetected>(*status)) status = detail::finalize_blowup(traj, config);
    traj.status = *status;
    return traj;
}

Trajectory solve_aux_ivp(const Nonlinearity& nl, double t_end, const SolverConfig& base) {
    SolverConfig config = base;
    config.t_end = t_end;
    validate(config);
    if (nl.osgood_class() == OsgoodClass::Finite && t_end >= eval_fb(nl, 1.0)) {
        throw DomainError(fmt::format(
            "auxiliary problem for Osgood-finite {} explodes at F_B(1) = {} <= t_end = {}", nl.id(),
            eval_fb(nl, 1.0), t_end));
    }
    // phi = log y, phi' = sqrt(Fbar(e^phi)) e^{-phi}.
    const std::function<double(double)> g = [&nl](double phi) {
        return std::exp(0.5 * nl.log_primitive_of_log(phi) - phi);
    };

    Trajectory traj;
    traj.x0 = 1.0;
    traj.ratio = config.geometric_ratio;
    traj.problem = "aux_ivp";
    const auto push = [&](double t, double phi) {
        traj.times.push_back(t);
        traj.log_values.push_back(phi);
        traj.values.push_back(std::exp(phi));
        traj.derivs.push_back(std::exp(0.5 * nl.log_primitive_of_log(phi)));
    };
    double t = 0.0;
    double phi = 0.0;
    push(t, phi);
    double step = config.fixed_step.value_or(config.initial_step);
    std::size_t accepted = 0;
    const double tol = config.rel_tol;
    while (t < t_end) {
        if (accepted >= config.max_steps) {
            traj.status = Aborted{AbortReason::StepLimit, t};
            return traj;
        }
        const double remaining = t_end - t;
        double h = config.fixed_step ? *config.fixed_step : std::min(step, config.max_step);
        const bool final_step = h >= remaining * (1.0 - 1e-12);
        if (final_step) h = remaining;
        double next = rk4_scalar(g, phi, h);
        if (!config.fixed_step) {
            const double coarse = next;
            next = rk4_scalar(g, rk4_scalar(g, phi, 0.5 * h), 0.5 * h);
            const double err = std::abs(next - coarse) / kRichardson4;
            const double scale = std::max(1.0, std::abs(next));
            if (!std::isfinite(next) || err > tol * scale) {
                if (0.5 * h >= config.min_step) {
                    step = 0.5 * h;
                    continue;
                }
                traj.status = Aborted{AbortReason::NonFiniteValue, t};
                return traj;
            }
            if (!final_step) step = err < tol * scale / 32.0 ? 2.0 * h : h;
        }
        phi = next;
        t = final_step ? t_end : t + h;
        ++accepted;
        push(t, phi);
    }
    traj.status = ReachedHorizon{t_end};
    return traj;
}

LagRatioTest lag_ratio_test(const Trajectory& z, double sigma, double threshold) {
    return tail_test(z, sigma, threshold, [](double lag_log, double now_log) { return lag_log - now_log; });
}

LagRatioTest fbar_lag_ratio_test(const Trajectory& z, const Nonlinearity& nl, double delta,
                                 double threshold) {
    return tail_test(z, delta, threshold, [&nl](double lag_log, double now_log) {
        return nl.log_primitive_of_log(lag_log) - nl.log_primitive_of_log(now_log);
    });
}

}  // namespace vide
