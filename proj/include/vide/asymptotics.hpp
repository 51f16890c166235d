#pragma once

#include "vide/forcing.hpp"
#include "vide/nonlinearity.hpp"
#include "vide/trajectory.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vide {

struct Extrapolation {
    double limit = 0.0;
    double err = 0.0;
};

/// Aitken delta-squared on the whole sequence; the limit is the last accelerated
/// value and err the last change between accelerated values.  Where increments do
/// not contract (zero second difference, noise floor) the raw value is used.  Throws AccelerationError with
/// InsufficientSamples (< 3) or DivergentAcceleration (accelerated increments
/// growing for three steps and larger than the raw increments).
Extrapolation aitken_extrapolate(std::span<const double> samples);

enum class RateFunctional { BlowUpRate, GrowthRate, PerturbationRate };
enum class Verdict { Consistent, Inconsistent, Inconclusive };

struct RateSample {
    double t = 0.0;
    double value = 0.0;
};

struct RateDiagnostic {
    RateFunctional functional = RateFunctional::BlowUpRate;
    std::vector<RateSample> samples;
    double extrapolated_limit = 0.0;
    double limit_err = 0.0;
    double target = 0.0;
    double rel_band = 0.05;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
};

inline constexpr double kDefaultRelBand = 0.05;

/// Consistent when err <= band*target and |limit - target| <= band*target;
/// Inconsistent when err is small but the limit is outside the band.
Verdict judge(double limit, double err, double target, double rel_band);

/// F_B(x(t)) / (T - t) on the recorded crossings, Aitken-extrapolated, against sqrt(2 w0).
RateDiagnostic blowup_rate_diagnostic(const Trajectory& traj, const Nonlinearity& nl, double w0,
                                      double rel_band = kDefaultRelBand);

/// Same sampling for an arbitrary profile g: g(x(t)) / (T - t) -> target.
RateDiagnostic blowup_profile_diagnostic(const Trajectory& traj,
                                         const std::function<double(double)>& g, double target,
                                         double rel_band = kDefaultRelBand);

/// F_U(x(t)) / t at t_end / 2^k, k = levels-1 .. 0.  For w0 > 0 the limit comes from a
/// least-squares fit of L + (a log t + b) / t; for w0 = 0 the samples over the last
/// decade must decrease and end at or below 0.2 sqrt(2).
RateDiagnostic growth_rate_diagnostic(const Trajectory& traj, const Nonlinearity& nl, double w0,
                                      double rel_band = kDefaultRelBand, int levels = 4);

enum class Perturbation { Preserving, NonPreserving, Inconclusive };

struct PerturbationReport {
    Perturbation verdict = Perturbation::Inconclusive;
    std::vector<RateSample> samples;  ///< F_U(H(t)) / t
    double limit = 0.0;               ///< extrapolated running maximum
    double threshold = 0.0;           ///< sqrt(2 w0)
};

/// t = 2^0 .. 2^16.
std::vector<double> default_perturbation_ladder();

PerturbationReport perturbation_criterion(const Forcing& forcing, const Nonlinearity& nl, double w0,
                                          std::span<const double> t_ladder,
                                          double rel_band = kDefaultRelBand);

std::string to_string(Verdict verdict);
std::string to_string(RateFunctional functional);
std::string to_string(Perturbation verdict);

}  // namespace vide
