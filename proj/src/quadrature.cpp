#include "vide/quadrature.hpp"

#include "vide/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace vide::quad {

namespace {

constexpr unsigned kMaxDepth = 20;

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Panel {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

// One GK31 panel.  Boost returns the |K - G| estimate of the rule on [-1, 1], so it
// is rescaled by the half-width here.
Panel kronrod_panel(const Integrand& f, double a, double b) {
    Panel p;
    p.value = Kronrod::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    p.error *= 0.5 * (b - a);
    return p;
}

// Relative size of |K - G| that is rounding noise in the integrand, not truncation.
constexpr double kNoiseFloor = 1e3 * std::numeric_limits<double>::epsilon();

Panel adaptive(const Integrand& f, double a, double b, const Panel& whole, double abs_tol,
               unsigned depth) {
    if (depth == 0 || whole.error <= abs_tol || whole.error <= kNoiseFloor * whole.l1) return whole;
    const double mid = 0.5 * (a + b);
    const Panel left = adaptive(f, a, mid, kronrod_panel(f, a, mid), 0.5 * abs_tol, depth - 1);
    const Panel right = adaptive(f, mid, b, kronrod_panel(f, mid, b), 0.5 * abs_tol, depth - 1);
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

}  // namespace

Estimate integrate(const Integrand& f, double a, double b, double rel_tol) {
    if (a == b) return {};
    if (a > b) {
        const Estimate e = integrate(f, b, a, rel_tol);
        return {-e.value, e.error};
    }
    const Panel top = kronrod_panel(f, a, b);
    const Panel p = adaptive(f, a, b, top, rel_tol * top.l1, kMaxDepth);
    if (!std::isfinite(p.value)) {
        throw QuadratureError(fmt::format("non-finite integral on [{}, {}]", a, b));
    }
    // |G - K| overestimates the Kronrod error substantially, hence the slack.
    const double allowed = 10.0 * std::max(rel_tol, kNoiseFloor) * p.l1 + std::numeric_limits<double>::min();
    if (p.error > allowed) {
        throw QuadratureError(fmt::format("quadrature on [{}, {}] reached error {:.3g} > {:.3g}",
                                          a, b, p.error, allowed));
    }
    return {p.value, p.error};
}

double integrate_dyadic(const Integrand& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    if (a > b) return -integrate_dyadic(f, b, a, rel_tol);

    std::vector<double> cuts{a};
    auto add_cut = [&](double c) {
        if (c > a && c < b) cuts.push_back(c);
    };
    add_cut(0.0);
    for (double c = 1.0; c < std::max(std::abs(a), std::abs(b)); c *= 2.0) {
        add_cut(c);
        add_cut(-c);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += integrate(f, cuts[i], cuts[i + 1], rel_tol).value;
    }
    return total;
}

double gauss_legendre(const Integrand& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

LadderVerdict classify_increments(std::span<const double> increments, double first_index,
                                  double tail_tol) {
    LadderVerdict v;
    for (double d : increments) v.partial_sum += d;
    if (increments.size() < 3) return v;

    const double last = increments.back();
    if (last <= 1e-16 * v.partial_sum) {
        v.classification = LadderVerdict::Class::Summable;
        v.ratio = 0.0;
        v.tail = 0.0;
        return v;
    }

    const std::size_t m = std::min<std::size_t>(increments.size(), 5);
    const std::size_t first = increments.size() - m;
    std::vector<double> k, logk, logd;
    for (std::size_t i = first; i < increments.size(); ++i) {
        if (increments[i] <= 0.0) return v;  // not a positive sequence: no decision
        const double idx = first_index + static_cast<double>(i);
        k.push_back(idx);
        logk.push_back(std::log(std::max(idx, 1.0)));
        logd.push_back(std::log(increments[i]));
    }
    v.ratio = std::exp(fit_slope(k, logd));
    v.power = -fit_slope(logk, logd);

    if (v.ratio < kSummableRatio) {
        v.tail = last * v.ratio / (1.0 - v.ratio);
        if (v.tail <= tail_tol * v.partial_sum) {
            v.classification = LadderVerdict::Class::Summable;
            return v;
        }
    }
    if (v.ratio >= kNonSummableRatio || v.power <= 1.0) v.classification = LadderVerdict::Class::NonSummable;
    return v;
}

}  // namespace vide::quad
