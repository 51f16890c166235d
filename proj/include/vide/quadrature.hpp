#pragma once

#include <functional>
#include <span>

namespace vide::quad {

using Integrand = std::function<double(double)>;

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (31 point) on a finite interval.
/// Throws QuadratureError when the error estimate exceeds rel_tol * L1 norm.
Estimate integrate(const Integrand& f, double a, double b, double rel_tol);

/// Adaptive quadrature over [a, b] split at 0, +-1, +-2, +-4, ... so that very long
/// ranges (log-variable integrals reaching s ~ 1e10) stay within the recursion depth.
double integrate_dyadic(const Integrand& f, double a, double b, double rel_tol);

/// Fixed 20-point Gauss-Legendre; for short intervals with analytic integrands.
double gauss_legendre(const Integrand& f, double a, double b);

/// Outcome of the geometric-ladder convergence test shared by the Osgood
/// classifier and the kernel L1 norm.
struct LadderVerdict {
    enum class Class { Summable, NonSummable, Undecided };
    Class classification = Class::Undecided;
    double ratio = 0.0;        ///< fitted geometric ratio of successive increments
    double power = 0.0;        ///< fitted decay exponent of d_k ~ k^{-power}
    double partial_sum = 0.0;  ///< sum of all increments
    double tail = 0.0;         ///< extrapolated remainder when Summable
};

inline constexpr double kSummableRatio = 0.9;
inline constexpr double kNonSummableRatio = 0.99;

/// Classifies a sequence of positive increments d_k (the integral over successive
/// cutoff decades).  `first_index` is the ladder index k of increments[0], used by
/// the power-law fit.  Summable requires ratio < 0.9 and an extrapolated tail below
/// tail_tol * partial_sum; NonSummable requires ratio >= 0.99 or power <= 1.
LadderVerdict classify_increments(std::span<const double> increments, double first_index,
                                  double tail_tol);

}  // namespace vide::quad
