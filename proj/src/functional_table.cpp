#include "vide/functional_table.hpp"

#include "vide/errors.hpp"
#include "vide/quadrature.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vide {

namespace {

// Fritsch-Carlson: scale node slopes so each Hermite panel stays monotone.
void limit_slopes(std::span<const double> values, std::span<double> slopes, double h) {
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const double secant = (values[k + 1] - values[k]) / h;
        if (secant == 0.0) {
            slopes[k] = slopes[k + 1] = 0.0;
            continue;
        }
        const double a = slopes[k] / secant;
        const double b = slopes[k + 1] / secant;
        const double norm = a * a + b * b;
        if (norm > 9.0) {
            const double tau = 3.0 / std::sqrt(norm);
            slopes[k] = tau * a * secant;
            slopes[k + 1] = tau * b * secant;
        }
    }
}

}  // namespace

FunctionalTable FunctionalTable::build(const Nonlinearity& nl, double log_x_min,
                                       double log_x_max, std::size_t nodes, double tol) {
    if (nodes < 2 || !(log_x_max > log_x_min)) {
        throw ConfigError("FunctionalTable: need at least two nodes on a nonempty range");
    }
    FunctionalTable table(nl);
    const double h = (log_x_max - log_x_min) / static_cast<double>(nodes - 1);
    const auto g = [&nl](double s) { return functional_integrand_log(nl, s); };

    table.log_x_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) table.log_x_[k] = log_x_min + h * static_cast<double>(k);
    table.log_x_.back() = log_x_max;

    std::vector<double> panel(nodes - 1);
    for (std::size_t k = 0; k + 1 < nodes; ++k) {
        panel[k] = quad::integrate(g, table.log_x_[k], table.log_x_[k + 1], tol).value;
    }

    table.log_fbar_.reserve(nodes);
    table.fu_slope_.reserve(nodes);
    for (double s : table.log_x_) {
        table.log_fbar_.push_back(nl.log_primitive_of_log(s));
        table.fu_slope_.push_back(g(s));
    }

    table.fu_.resize(nodes);
    table.fu_[0] = eval_fu_log(nl, log_x_min, tol);
    for (std::size_t k = 0; k + 1 < nodes; ++k) table.fu_[k + 1] = table.fu_[k] + panel[k];
    limit_slopes(table.fu_, table.fu_slope_, h);

    if (nl.osgood_class() == OsgoodClass::Finite) {
        std::vector<double> fb(nodes);
        fb.back() = eval_fb_log(nl, log_x_max, tol);
        for (std::size_t k = nodes - 1; k > 0; --k) fb[k - 1] = fb[k] + panel[k - 1];
        table.fb_slope_.resize(nodes);
        for (std::size_t k = 0; k < nodes; ++k) table.fb_slope_[k] = -g(table.log_x_[k]);
        limit_slopes(fb, table.fb_slope_, h);
        table.fb_ = std::move(fb);
    }
    return table;
}

std::vector<double> FunctionalTable::grid() const {
    std::vector<double> x;
    x.reserve(log_x_.size());
    for (double s : log_x_) x.push_back(std::exp(s));
    return x;
}

std::size_t FunctionalTable::bracket(double s) const {
    if (s < log_x_.front() || s > log_x_.back()) {
        throw DomainError(fmt::format("FunctionalTable: log x = {} outside [{}, {}]", s,
                                      log_x_.front(), log_x_.back()));
    }
    const auto it = std::upper_bound(log_x_.begin(), log_x_.end(), s);
    const auto k = static_cast<std::size_t>(std::distance(log_x_.begin(), it));
    return std::min(k == 0 ? 0 : k - 1, log_x_.size() - 2);
}

double FunctionalTable::hermite(std::span<const double> values, std::span<const double> slopes,
                                double s) const {
    const std::size_t k = bracket(s);
    const double h = log_x_[k + 1] - log_x_[k];
    const double t = (s - log_x_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values[k] + (t3 - 2 * t2 + t) * h * slopes[k] +
           (-2 * t3 + 3 * t2) * values[k + 1] + (t3 - t2) * h * slopes[k + 1];
}

double FunctionalTable::fu_at_log(double s) const { return hermite(fu_, fu_slope_, s); }

double FunctionalTable::fb_at_log(double s) const {
    if (!fb_) throw OsgoodClassError("FunctionalTable: F_B column absent (Osgood-infinite f)");
    return hermite(*fb_, fb_slope_, s);
}

double FunctionalTable::fu_exact_at_log(double s) const {
    const std::size_t k = bracket(s);
    const auto g = [this](double v) { return functional_integrand_log(nl_, v); };
    return fu_[k] + quad::integrate(g, log_x_[k], s, 1e-13).value;
}

double FunctionalTable::invert_fu_log(double target, double tol) const {
    if (target < fu_.front() || target > fu_.back()) return vide::invert_fu_log(nl_, target, tol);
    const auto it = std::upper_bound(fu_.begin(), fu_.end(), target);
    std::size_t k = static_cast<std::size_t>(std::distance(fu_.begin(), it));
    k = std::min(k == 0 ? 0 : k - 1, fu_.size() - 2);
    double lo = log_x_[k];
    double hi = log_x_[k + 1];
    const double span = fu_[k + 1] - fu_[k];
    double s = span > 0.0 ? lo + (hi - lo) * (target - fu_[k]) / span : lo;
    const double accept = tol * std::max(1.0, std::abs(target));
    for (int it_count = 0; it_count < 40; ++it_count) {
        const double f = fu_exact_at_log(s) - target;
        if (std::abs(f) <= accept) return s;
        if (f < 0.0) lo = s; else hi = s;
        double next = s - f / functional_integrand_log(nl_, s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s) return s;
        s = next;
    }
    return s;
}

}  // namespace vide
