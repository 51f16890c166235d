#pragma once

#include "vide/nonlinearity.hpp"

#include <cmath>
#include <mutex>

namespace vide::detail {

struct NonlinearityCache {
    std::once_flag once;
    OsgoodClass osgood = OsgoodClass::Undecided;
};

/// log(1 + e^s) without overflow.
inline double softplus(double s) {
    return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

/// log(e^a + e^b).
inline double log_add_exp(double a, double b) {
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// log(e^L - 1) for L > 0.
inline double log_expm1(double L) {
    return L > 30.0 ? L + std::log1p(-std::exp(-L)) : std::log(std::expm1(L));
}

}  // namespace vide::detail
