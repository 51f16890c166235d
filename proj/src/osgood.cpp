#include "vide/osgood.hpp"

#include "nonlinearity_cache.hpp"
#include "vide/errors.hpp"
#include "vide/quadrature.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vide {

namespace {

constexpr double kLadderQuadTol = 1e-10;

OsgoodVerdict classify_ladder(const std::function<double(double)>& integrand_log, double eta,
                              std::span<const double> cutoffs, double tol) {
    if (!(eta > 0.0)) throw DomainError("classify_osgood: eta must be positive");
    if (cutoffs.size() < 4) throw ConfigError("classify_osgood: need at least 4 cutoffs");
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        const double lower = i == 0 ? eta : cutoffs[i - 1];
        if (!(cutoffs[i] > lower)) {
            throw ConfigError("classify_osgood: cutoffs must increase and exceed eta");
        }
    }

    OsgoodVerdict verdict;
    std::vector<double> increments;
    double running = quad::integrate_dyadic(integrand_log, std::log(eta), std::log(cutoffs[0]),
                                            kLadderQuadTol);
    verdict.partial_integral_at_cutoffs.emplace_back(cutoffs[0], running);
    for (std::size_t i = 1; i < cutoffs.size(); ++i) {
        const double d = quad::integrate(integrand_log, std::log(cutoffs[i - 1]),
                                         std::log(cutoffs[i]), kLadderQuadTol)
                             .value;
        increments.push_back(d);
        running += d;
        verdict.partial_integral_at_cutoffs.emplace_back(cutoffs[i], running);
    }

    // I(K) already contains everything below cutoffs[0]; the tail test compares
    // against the whole partial integral.
    const double head = verdict.partial_integral_at_cutoffs.front().second;
    const double scale = running / std::max(running - head, std::numeric_limits<double>::min());
    const auto ladder = quad::classify_increments(increments, std::log10(cutoffs[1]), tol * scale);
    verdict.fitted_ratio = ladder.ratio;
    verdict.fitted_power = ladder.power;
    switch (ladder.classification) {
        case quad::LadderVerdict::Class::Summable:
            verdict.classification = OsgoodClass::Finite;
            verdict.extrapolated_tail = ladder.tail;
            break;
        case quad::LadderVerdict::Class::NonSummable:
            verdict.classification = OsgoodClass::Infinite;
            break;
        case quad::LadderVerdict::Class::Undecided:
            verdict.classification = OsgoodClass::Undecided;
            break;
    }
    return verdict;
}

// Sampling grid in s = log x for the structural conditions: 10 points per decade
// from max(X, 10) up to 1e12.
std::vector<double> structural_grid(const Nonlinearity& nl) {
    const double start = std::log(std::max(nl.monotone_from(), 10.0));
    const double stop = 12.0 * std::numbers::ln10;
    std::vector<double> s;
    for (double v = start; v <= stop + 1e-12; v += std::numbers::ln10 / 10.0) s.push_back(v);
    return s;
}

bool ratio_eventually_increasing(const Nonlinearity& nl, std::span<const double> grid) {
    double prev = nl.log_of_log(grid[0]) - grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = nl.log_of_log(grid[i]) - grid[i];
        if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) return false;
        prev = cur;
    }
    return true;
}

bool increasing_and_convex(const Nonlinearity& nl, std::span<const double> grid) {
    std::vector<double> x, f;
    for (double s : grid) {
        x.push_back(std::exp(s));
        f.push_back(nl(x.back()));
        if (!std::isfinite(f.back())) return false;
    }
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (f[i + 1] < f[i]) return false;
        const double slope = (f[i + 1] - f[i]) / (x[i + 1] - x[i]);
        if (slope < prev_slope * (1.0 - 1e-9)) return false;
        prev_slope = slope;
    }
    return true;
}

// f in RV(alpha): log(f(lambda x)/f(x)) / log(lambda) settles to one alpha > 0
// for lambda in {2, 10} at the end of the grid.
bool regularly_varying(const Nonlinearity& nl, std::span<const double> grid) {
    std::vector<double> alphas;
    for (double lambda : {2.0, 10.0}) {
        const double ll = std::log(lambda);
        for (std::size_t i = grid.size() - 4; i < grid.size(); ++i) {
            alphas.push_back((nl.log_of_log(grid[i] + ll) - nl.log_of_log(grid[i])) / ll);
        }
    }
    const auto [lo, hi] = std::minmax_element(alphas.begin(), alphas.end());
    return *lo > 0.05 && *hi - *lo < 0.05;
}

}  // namespace

std::string to_string(OsgoodClass c) {
    switch (c) {
        case OsgoodClass::Finite: return "FINITE";
        case OsgoodClass::Infinite: return "INFINITE";
        case OsgoodClass::Undecided: return "UNDECIDED";
    }
    return "UNDECIDED";
}

std::vector<double> default_cutoff_ladder() {
    std::vector<double> ladder;
    for (int k = 2; k <= 12; ++k) ladder.push_back(std::pow(10.0, k));
    return ladder;
}

OsgoodVerdict classify_osgood(const Nonlinearity& nl, double eta, std::span<const double> cutoffs,
                              double tol) {
    return classify_ladder([&nl](double s) { return functional_integrand_log(nl, s); }, eta,
                           cutoffs, tol);
}

OsgoodVerdict classify_osgood(const Nonlinearity& nl) {
    const auto ladder = default_cutoff_ladder();
    return classify_osgood(nl, 1.0, ladder);
}

OsgoodVerdict classify_osgood_alternative(const Nonlinearity& nl, std::span<const double> cutoffs,
                                          double tol) {
    // dx / sqrt(x f(x)) with x = e^s:  exp(s/2 - log f(e^s) / 2) ds.
    return classify_ladder(
        [&nl](double s) { return std::exp(0.5 * s - 0.5 * nl.log_of_log(s)); }, 1.0, cutoffs,
        tol);
}

bool check_osgood_equivalence(const Nonlinearity& nl, std::span<const double> cutoffs, double tol) {
    if (!nl.is_increasing()) {
        throw ConfigError("check_osgood_equivalence requires an increasing nonlinearity");
    }
    const auto a = classify_osgood(nl, 1.0, cutoffs, tol).classification;
    const auto b = classify_osgood_alternative(nl, cutoffs, tol).classification;
    return a == OsgoodClass::Undecided || b == OsgoodClass::Undecided || a == b;
}

OsgoodClass Nonlinearity::osgood_class() const {
    std::call_once(cache_->once, [this] { cache_->osgood = classify_osgood(*this).classification; });
    return cache_->osgood;
}

double GrowthMap::log_at(double x) const {
    if (log_value) return log_value(x);
    return std::log(value(x));
}

GrowthMap exp_square_map() {
    return {"exp(x^2)", [](double x) { return std::exp(x * x); }, [](double x) { return x * x; }};
}

std::vector<double> default_epsilons() { return {0.1, 0.5, 1.0}; }
std::vector<double> default_growth_ladder() { return {8.0, 16.0, 32.0, 64.0, 128.0}; }

bool test_superexponential(const GrowthMap& g, std::span<const double> epsilons,
                           std::span<const double> x_ladder) {
    if (x_ladder.size() < 2) throw ConfigError("test_superexponential: ladder too short");
    for (double eps : epsilons) {
        double prev = std::numeric_limits<double>::infinity();
        double last = prev;
        for (double x : x_ladder) {
            last = std::exp(g.log_at(x - eps) - g.log_at(x));
            if (x == x_ladder.back() && last > prev * (1.0 + 1e-9)) return false;
            prev = last;
        }
        if (!(last < kSuperexpThreshold)) return false;
    }
    return true;
}

PreservationReport sampled_preservation(const Nonlinearity& nl, std::span<const GrowthMap> witnesses,
                                        std::span<const double> epsilons,
                                        std::span<const double> x_ladder) {
    PreservationReport report;
    report.preserves = true;
    for (const auto& g : witnesses) {
        for (double eps : epsilons) {
            double prev = std::numeric_limits<double>::infinity();
            double last = prev;
            bool decreasing_at_end = true;
            for (double x : x_ladder) {
                last = std::exp(nl.log_of_log(g.log_at(x - eps)) - nl.log_of_log(g.log_at(x)));
                report.samples.push_back({g.name, eps, x, last});
                if (x == x_ladder.back()) decreasing_at_end = last <= prev * (1.0 + 1e-9);
                prev = last;
            }
            if (!(last < kSuperexpThreshold) || !decreasing_at_end) report.preserves = false;
        }
    }
    return report;
}

PreservationReport preservation_report(const Nonlinearity& nl, std::span<const GrowthMap> witnesses,
                                       std::span<const double> epsilons,
                                       std::span<const double> x_ladder) {
    for (const auto& g : witnesses) {
        if (!test_superexponential(g, epsilons, x_ladder)) {
            throw ConfigError(fmt::format("witness {} is not superexponential on the ladder", g.name));
        }
    }
    const auto grid = structural_grid(nl);
    if (grid.size() >= 8) {
        std::string condition;
        if (ratio_eventually_increasing(nl, grid)) {
            condition = "f(x)/x eventually increasing";
        } else if (increasing_and_convex(nl, grid)) {
            condition = "increasing and convex";
        } else if (regularly_varying(nl, grid)) {
            condition = "regularly varying with positive index";
        }
        if (!condition.empty()) {
            PreservationReport report;
            report.preserves = true;
            report.structural = true;
            report.condition = condition;
            return report;
        }
    }
    return sampled_preservation(nl, witnesses, epsilons, x_ladder);
}

bool test_preserves_superexponential(const Nonlinearity& nl, std::span<const GrowthMap> witnesses,
                                     std::span<const double> epsilons,
                                     std::span<const double> x_ladder) {
    return preservation_report(nl, witnesses, epsilons, x_ladder).preserves;
}

}  // namespace vide
