#include "vide/nonlinearity.hpp"

#include "nonlinearity_cache.hpp"
#include "vide/errors.hpp"
#include "vide/quadrature.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vide {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this argument the LogLinear closed-form primitive loses digits to cancellation.
constexpr double kLogLinearSeriesCut = 0.5;
// log-argument floor: e^s underflows below ~ -745.
constexpr double kMinLog = -740.0;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

double log_linear_f(double x) {
    const double u = x + kE;
    return u * std::log(u);
}

double log_linear_primitive_small(double x) {
    return quad::gauss_legendre(log_linear_f, 0.0, x);
}

double custom_primitive(const CustomNonlinearity& c, double x) {
    if (c.primitive) return c.primitive(x);
    if (x == 0.0) return 0.0;
    return quad::integrate(c.f, 0.0, x, 1e-13).value;
}

void require_nonnegative(double x, const char* what) {
    if (!(x >= 0.0)) throw DomainError(fmt::format("{}: argument {} is negative", what, x));
}

}  // namespace

Nonlinearity::Nonlinearity(NonlinearityKind kind)
    : kind_(std::move(kind)), cache_(std::make_shared<detail::NonlinearityCache>()) {
    std::visit(Overloaded{
                   [](const PowerPlusOne& k) {
                       if (!(k.beta > 0.0)) throw ConfigError("power_plus_one: beta must be > 0");
                   },
                   [](const LogLinear&) {},
                   [](const PurePower& k) {
                       if (!(k.p > 0.0)) throw ConfigError("pure_power: p must be > 0");
                   },
                   [](const CustomNonlinearity& k) {
                       if (!k.f) throw ConfigError("custom nonlinearity needs an evaluator");
                   },
               },
               kind_);
}

Nonlinearity Nonlinearity::power_plus_one(double beta) { return Nonlinearity(PowerPlusOne{beta}); }
Nonlinearity Nonlinearity::log_linear() { return Nonlinearity(LogLinear{}); }
Nonlinearity Nonlinearity::pure_power(double p) { return Nonlinearity(PurePower{p}); }
Nonlinearity Nonlinearity::custom(CustomNonlinearity custom) {
    return Nonlinearity(std::move(custom));
}

std::string Nonlinearity::id() const {
    return std::visit(Overloaded{
                          [](const PowerPlusOne& k) { return fmt::format("power_plus_one:beta={}", k.beta); },
                          [](const LogLinear&) { return std::string("log_linear"); },
                          [](const PurePower& k) { return fmt::format("pure_power:p={}", k.p); },
                          [](const CustomNonlinearity& k) { return k.name; },
                      },
                      kind_);
}

bool Nonlinearity::is_increasing() const noexcept {
    if (const auto* c = std::get_if<CustomNonlinearity>(&kind_)) return c->increasing;
    return true;
}

bool Nonlinearity::is_superlinear() const noexcept {
    return std::visit(Overloaded{
                          [](const PowerPlusOne& k) { return k.beta > 1.0; },
                          [](const LogLinear&) { return true; },
                          [](const PurePower& k) { return k.p > 1.0; },
                          [](const CustomNonlinearity& k) { return k.superlinear; },
                      },
                      kind_);
}

double Nonlinearity::monotone_from() const noexcept {
    if (const auto* c = std::get_if<CustomNonlinearity>(&kind_)) return c->monotone_from;
    return 0.0;
}

double Nonlinearity::operator()(double x) const {
    return std::visit(Overloaded{
                          [x](const PowerPlusOne& k) { return std::pow(1.0 + x, k.beta); },
                          [x](const LogLinear&) { return log_linear_f(x); },
                          [x](const PurePower& k) { return std::pow(x, k.p); },
                          [x](const CustomNonlinearity& k) { return k.f(x); },
                      },
                      kind_);
}

double Nonlinearity::log_of_log(double s) const {
    return std::visit(Overloaded{
                          [s](const PowerPlusOne& k) { return k.beta * detail::softplus(s); },
                          [s](const LogLinear&) {
                              const double L = detail::log_add_exp(s, 1.0);
                              return L + std::log(L);
                          },
                          [s](const PurePower& k) { return k.p * s; },
                          [s](const CustomNonlinearity& k) {
                              return k.log_f_of_log ? k.log_f_of_log(s) : std::log(k.f(std::exp(s)));
                          },
                      },
                      kind_);
}

double Nonlinearity::primitive(double x) const {
    return std::visit(Overloaded{
                          [x](const PowerPlusOne& k) {
                              return std::expm1((k.beta + 1.0) * std::log1p(x)) / (k.beta + 1.0);
                          },
                          [x](const LogLinear&) {
                              if (x < kLogLinearSeriesCut) return log_linear_primitive_small(x);
                              const double u = x + kE;
                              return (u * u * (2.0 * std::log(u) - 1.0) - kE * kE) / 4.0;
                          },
                          [x](const PurePower& k) { return std::pow(x, k.p + 1.0) / (k.p + 1.0); },
                          [x](const CustomNonlinearity& k) { return custom_primitive(k, x); },
                      },
                      kind_);
}

double Nonlinearity::log_primitive_of_log(double s) const {
    return std::visit(
        Overloaded{
            [s](const PowerPlusOne& k) {
                const double L = (k.beta + 1.0) * detail::softplus(s);
                return detail::log_expm1(L) - std::log(k.beta + 1.0);
            },
            [s](const LogLinear&) {
                if (s < std::log(kLogLinearSeriesCut)) {
                    return std::log(log_linear_primitive_small(std::exp(s)));
                }
                const double L = detail::log_add_exp(s, 1.0);
                const double q = 2.0 * L - 1.0;
                return 2.0 * L + std::log(q) + std::log1p(-std::exp(2.0 - 2.0 * L) / q) -
                       std::log(4.0);
            },
            [s](const PurePower& k) { return (k.p + 1.0) * s - std::log(k.p + 1.0); },
            [s](const CustomNonlinearity& k) {
                if (k.log_primitive_of_log) return k.log_primitive_of_log(s);
                return std::log(custom_primitive(k, std::exp(s)));
            },
        },
        kind_);
}

double eval_f(const Nonlinearity& nl, double x) {
    require_nonnegative(x, "eval_f");
    return nl(x);
}

double eval_fbar(const Nonlinearity& nl, double x) {
    require_nonnegative(x, "eval_fbar");
    if (x == 0.0) return 0.0;
    return nl.primitive(x);
}

double functional_integrand_log(const Nonlinearity& nl, double s) {
    if (std::holds_alternative<LogLinear>(nl.kind()) && s >= std::log(kLogLinearSeriesCut)) {
        // s - log(Fbar)/2 with s - log(e^s + e) taken analytically; the direct form
        // loses s * eps in the exponent, which is visible once s ~ 1e5.
        const double L = detail::log_add_exp(s, 1.0);
        const double q = 2.0 * L - 1.0;
        return std::exp(-std::log1p(std::exp(1.0 - s)) - 0.5 * std::log(q) -
                        0.5 * std::log1p(-std::exp(2.0 - 2.0 * L) / q) + std::numbers::ln2);
    }
    return std::exp(s - 0.5 * nl.log_primitive_of_log(s));
}

double eval_fb_log(const Nonlinearity& nl, double log_x, double tol) {
    if (nl.osgood_class() == OsgoodClass::Infinite) {
        throw OsgoodClassError(
            fmt::format("F_B undefined: {} violates the Osgood blow-up condition", nl.id()));
    }
    // Decade panels in s = log u; the remainder after the last panel is the
    // geometric (Aitken) extrapolation of the panel sequence.
    constexpr int kMaxDecades = 400;
    const double decade = std::numbers::ln10;
    const auto g = [&nl](double s) { return functional_integrand_log(nl, s); };

    double sum = 0.0;
    double prev = 0.0;
    for (int k = 0; k < kMaxDecades; ++k) {
        const double a = log_x + k * decade;
        const double d = quad::integrate(g, a, a + decade, 0.1 * tol).value;
        sum += d;
        if (d <= std::numeric_limits<double>::min() || d <= 1e-17 * sum) return sum;
        if (k >= 2) {
            const double r = d / prev;
            if (r < 1.0) {
                const double tail = d * r / (1.0 - r);
                if (tail <= tol * sum) return sum + tail;
            }
        }
        prev = d;
    }
    throw UndecidedError(fmt::format("F_B tail for {} did not settle after {} decades",
                                     nl.id(), kMaxDecades));
}

double eval_fb(const Nonlinearity& nl, double x, double tol) {
    require_nonnegative(x, "eval_fb");
    if (x == 0.0) return eval_fb(nl, std::numeric_limits<double>::denorm_min(), tol);
    return eval_fb_log(nl, std::log(x), tol);
}

double eval_fu_log(const Nonlinearity& nl, double log_x, double tol) {
    const auto g = [&nl](double s) { return functional_integrand_log(nl, s); };
    if (log_x == -kInf) {
        // F_U(0): finite only if 1/sqrt(Fbar) is integrable at 0, i.e. f(0) > 0.
        if (!(nl(0.0) > 0.0)) return -kInf;
        return -quad::integrate_dyadic(g, kMinLog, 0.0, tol);
    }
    return quad::integrate_dyadic(g, 0.0, log_x, tol);
}

double eval_fu(const Nonlinearity& nl, double x, double tol) {
    require_nonnegative(x, "eval_fu");
    return eval_fu_log(nl, x == 0.0 ? -kInf : std::log(x), tol);
}

double invert_fu_log(const Nonlinearity& nl, double target, double tol) {
    if (!(target >= 0.0)) throw DomainError(fmt::format("invert_fu: target {} < 0", target));
    if (target == 0.0) return 0.0;
    if (nl.osgood_class() == OsgoodClass::Finite) {
        const double limit = eval_fb(nl, 1.0);
        if (target >= limit) {
            throw DomainError(fmt::format(
                "invert_fu: target {} outside the range [0, F_B(1) = {}) of F_U", target, limit));
        }
    }
    const auto g = [&nl](double s) { return functional_integrand_log(nl, s); };
    // Below ~1e-13 the log-space integrand is at its rounding floor and GK cannot certify.
    const double qtol = std::clamp(0.01 * tol, 1e-13, 1e-12);
    const double accept = tol * std::max(1.0, target);

    // Doubling log x (squaring x) until the target is bracketed.
    double s_lo = 0.0, f_lo = 0.0;
    double s_hi = std::numbers::ln2;
    double f_hi = quad::integrate_dyadic(g, s_lo, s_hi, qtol);
    while (f_hi < target) {
        if (s_hi > 1e15) throw UndecidedError("invert_fu: F_U did not reach the target");
        s_lo = s_hi;
        f_lo = f_hi;
        s_hi *= 2.0;
        f_hi = f_lo + quad::integrate_dyadic(g, s_lo, s_hi, qtol);
    }
    if (std::abs(f_hi - target) <= accept) return s_hi;

    // Monotone bisection; F_U is accumulated from the lower bracket end.
    double s_mid = s_lo;
    for (int it = 0; it < 200; ++it) {
        s_mid = 0.5 * (s_lo + s_hi);
        const double f_mid = f_lo + quad::integrate_dyadic(g, s_lo, s_mid, qtol);
        if (std::abs(f_mid - target) <= accept) return s_mid;
        if (f_mid < target) {
            s_lo = s_mid;
            f_lo = f_mid;
        } else {
            s_hi = s_mid;
        }
        if (s_hi - s_lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, s_hi)) {
            break;
        }
    }
    return s_mid;
}

double invert_fu(const Nonlinearity& nl, double target, double tol) {
    const double s = invert_fu_log(nl, target, tol);
    if (s > std::log(std::numeric_limits<double>::max())) {
        throw DomainError(fmt::format(
            "invert_fu: preimage e^{} of target {} overflows; use invert_fu_log", s, target));
    }
    return std::exp(s);
}

std::vector<std::string> validate(const Nonlinearity& nl) {
    std::vector<std::string> issues;
    for (int k = -3; k <= 12; ++k) {
        const double x = std::pow(10.0, k);
        const double v = nl(x);
        if (!(v > 0.0) || !std::isfinite(v)) {
            issues.push_back(fmt::format("f({:g}) = {} is not a positive finite value", x, v));
        }
    }
    if (nl.is_increasing()) {
        const double start = std::max(nl.monotone_from(), 1e-3);
        double prev = nl(start);
        for (double x = start * 1.1; x <= 1e12; x *= 1.1) {
            const double v = nl(x);
            if (v < prev) {
                issues.push_back(fmt::format("claimed increasing but f decreases near x = {:g}", x));
                break;
            }
            prev = v;
        }
    }
    if (nl.is_superlinear()) {
        // f(x)/x must keep growing along 10^k, k = 1..12 (sampled, not a proof).
        std::vector<double> ratio;
        for (int k = 1; k <= 12; ++k) {
            const double s = k * std::numbers::ln10;
            ratio.push_back(std::exp(nl.log_of_log(s) - s));
        }
        bool growing = ratio.back() > 2.0 * ratio.front();
        for (std::size_t i = ratio.size() / 2; i + 1 < ratio.size(); ++i) {
            growing = growing && ratio[i + 1] >= ratio[i];
        }
        if (!growing) issues.emplace_back("claimed superlinear but f(x)/x is bounded on 10^1..10^12");
    }
    return issues;
}

}  // namespace vide
