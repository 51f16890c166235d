#pragma once

#include "vide/nonlinearity.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vide {

/// Tri-valued answer to "is int_eta^inf du / sqrt(Fbar(u)) finite?".
/// Undecided is always a legal answer: a finite ladder cannot prove either case.
struct OsgoodVerdict {
    OsgoodClass classification = OsgoodClass::Undecided;
    std::vector<std::pair<double, double>> partial_integral_at_cutoffs;  ///< (K, I(K))
    std::optional<double> extrapolated_tail;
    double fitted_ratio = 0.0;
    double fitted_power = 0.0;
};

/// 10^2, 10^3, ..., 10^12.
std::vector<double> default_cutoff_ladder();

inline constexpr double kDefaultOsgoodTol = 1e-2;

/// Ladder test on I(K) = int_eta^K du / sqrt(Fbar(u)).  Finite when the decade
/// increments decay geometrically (ratio < 0.9) and the extrapolated tail is below
/// tol * I(K_max); Infinite when the increments do not decay (ratio >= 0.99) or
/// fit a non-summable power law; Undecided otherwise.
OsgoodVerdict classify_osgood(const Nonlinearity& nl, double eta, std::span<const double> cutoffs,
                              double tol = kDefaultOsgoodTol);
OsgoodVerdict classify_osgood(const Nonlinearity& nl);

/// Classifies int dx / sqrt(x f(x)) with the same ladder test.
OsgoodVerdict classify_osgood_alternative(const Nonlinearity& nl, std::span<const double> cutoffs,
                                          double tol = kDefaultOsgoodTol);

/// True when the two integral criteria give compatible verdicts (Undecided is
/// compatible with anything).  Requires an increasing nonlinearity.
bool check_osgood_equivalence(const Nonlinearity& nl, std::span<const double> cutoffs,
                              double tol = kDefaultOsgoodTol);

/// A positive map with an optional log evaluator (log g(x)) used when g overflows.
struct GrowthMap {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> log_value;

    [[nodiscard]] double log_at(double x) const;
};

GrowthMap exp_square_map();  ///< x -> exp(x^2)

std::vector<double> default_epsilons();         ///< {0.1, 0.5, 1}
std::vector<double> default_growth_ladder();    ///< {8, 16, 32, 64, 128}

inline constexpr double kSuperexpThreshold = 1e-3;

/// Sampled test that g(x - eps) / g(x) falls below 1e-3 and is still decreasing
/// at the end of the ladder, for every eps.  A falsification test, not a proof.
bool test_superexponential(const GrowthMap& g, std::span<const double> epsilons,
                           std::span<const double> x_ladder);

struct RatioSample {
    std::string witness;
    double epsilon = 0.0;
    double x = 0.0;
    double ratio = 0.0;  ///< f(g(x - eps)) / f(g(x))
};

struct PreservationReport {
    bool preserves = false;
    bool structural = false;  ///< decided by one of the sufficient structural conditions
    std::string condition;    ///< which structural condition held, if any
    std::vector<RatioSample> samples;
};

/// Structural shortcut first (f(x)/x eventually increasing; increasing and
/// convex; regularly varying with positive index, all sampled), then the direct
/// sampled ratio test through every witness.
PreservationReport preservation_report(const Nonlinearity& nl, std::span<const GrowthMap> witnesses,
                                       std::span<const double> epsilons,
                                       std::span<const double> x_ladder);

/// Always runs the sampled ratio test (no structural shortcut).
PreservationReport sampled_preservation(const Nonlinearity& nl, std::span<const GrowthMap> witnesses,
                                        std::span<const double> epsilons,
                                        std::span<const double> x_ladder);

bool test_preserves_superexponential(const Nonlinearity& nl, std::span<const GrowthMap> witnesses,
                                     std::span<const double> epsilons,
                                     std::span<const double> x_ladder);

std::string to_string(OsgoodClass c);

}  // namespace vide
