#include "vide/forcing.hpp"

#include "nonlinearity_cache.hpp"
#include "vide/errors.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>

namespace vide {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

// F_U is tabulated on log x in [0, 700]: the whole range where x itself is a double.
constexpr double kRateTableLogMax = 700.0;
constexpr std::size_t kRateTableNodes = 2801;
constexpr double kRateInversionTol = 1e-13;

double rate_scale_log_y(const RateScale& r, double t) {
    return r.table->invert_fu_log(r.K * t, kRateInversionTol);
}

}  // namespace

Forcing::Forcing(ForcingKind kind) : kind_(std::move(kind)) {
    std::visit(Overloaded{
                   [](const ZeroForcing&) {},
                   [](const PowerGrowth& k) {
                       if (!(k.alpha > 0.0)) throw ConfigError("power_growth: alpha must be > 0");
                   },
                   [](const RateScale& k) {
                       if (!(k.K > 0.0)) throw ConfigError("rate_scale: K must be > 0");
                       if (!k.table) throw ConfigError("rate_scale: missing F_U table");
                   },
                   [](const CustomForcing& k) {
                       if (!k.h || !k.H) throw ConfigError("custom forcing needs both h and H");
                   },
               },
               kind_);
}

Forcing Forcing::zero() { return Forcing(ZeroForcing{}); }
Forcing Forcing::power_growth(double alpha) { return Forcing(PowerGrowth{alpha}); }

Forcing Forcing::rate_scale(double K, const Nonlinearity& nl) {
    if (nl.osgood_class() != OsgoodClass::Infinite) {
        throw OsgoodClassError(fmt::format(
            "rate_scale forcing needs F_U to be unbounded; {} is not Osgood-infinite", nl.id()));
    }
    auto table = std::make_shared<const FunctionalTable>(
        FunctionalTable::build(nl, 0.0, kRateTableLogMax, kRateTableNodes));
    return Forcing(RateScale{K, nl, std::move(table)});
}

Forcing Forcing::custom(CustomForcing custom) { return Forcing(std::move(custom)); }

std::string Forcing::id() const {
    return std::visit(Overloaded{
                          [](const ZeroForcing&) { return std::string("zero"); },
                          [](const PowerGrowth& k) { return fmt::format("power_growth:alpha={}", k.alpha); },
                          [](const RateScale& k) { return fmt::format("rate_scale:K={}", k.K); },
                          [](const CustomForcing& k) { return k.name; },
                      },
                      kind_);
}

bool Forcing::is_zero() const noexcept { return std::holds_alternative<ZeroForcing>(kind_); }

double Forcing::h(double t) const {
    if (!(t >= 0.0)) throw DomainError(fmt::format("forcing evaluated at t = {} < 0", t));
    return std::visit(Overloaded{
                          [](const ZeroForcing&) { return 0.0; },
                          [t](const PowerGrowth& k) {
                              return k.alpha == 1.0 ? 1.0 : k.alpha * std::pow(t, k.alpha - 1.0);
                          },
                          [t](const RateScale& k) {
                              // d/dt F_U^{-1}(K t) = K sqrt(Fbar(y)).
                              const double s = rate_scale_log_y(k, t);
                              return k.K * std::exp(0.5 * k.nonlinearity.log_primitive_of_log(s));
                          },
                          [t](const CustomForcing& k) { return k.h(t); },
                      },
                      kind_);
}

double Forcing::H(double t) const {
    if (!(t >= 0.0)) throw DomainError(fmt::format("forcing evaluated at t = {} < 0", t));
    return std::visit(Overloaded{
                          [](const ZeroForcing&) { return 0.0; },
                          [t](const PowerGrowth& k) { return std::pow(t, k.alpha); },
                          [t](const RateScale& k) {
                              return t == 0.0 ? 0.0 : std::expm1(rate_scale_log_y(k, t));
                          },
                          [t](const CustomForcing& k) { return k.H(t); },
                      },
                      kind_);
}

double Forcing::log_H(double t) const {
    if (!(t >= 0.0)) throw DomainError(fmt::format("forcing evaluated at t = {} < 0", t));
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    return std::visit(Overloaded{
                          [](const ZeroForcing&) { return kNegInf; },
                          [t](const PowerGrowth& k) { return k.alpha * std::log(t); },
                          [t](const RateScale& k) {
                              if (t == 0.0) return kNegInf;
                              return detail::log_expm1(rate_scale_log_y(k, t));
                          },
                          [t](const CustomForcing& k) { return std::log(k.H(t)); },
                      },
                      kind_);
}

double eval_h(const Forcing& forcing, double t) { return forcing.h(t); }
double eval_H(const Forcing& forcing, double t) { return forcing.H(t); }

std::vector<std::string> validate(const Forcing& forcing, double t_max) {
    std::vector<std::string> issues;
    if (std::abs(forcing.H(0.0)) > 1e-14) {
        issues.push_back(fmt::format("H(0) = {} != 0", forcing.H(0.0)));
    }
    double prev_H = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double t = t_max * i / 200.0;
        const double H = forcing.H(t);
        const double h = forcing.h(t);
        if (!(H >= 0.0)) {
            issues.push_back(fmt::format("H({}) = {} < 0", t, H));
            break;
        }
        const double dt = 1e-5 * std::max(1.0, t);
        const double fd = (forcing.H(t + dt) - forcing.H(t - dt)) / (2.0 * dt);
        if (std::abs(fd - h) > 1e-4 * std::max(1.0, std::abs(h))) {
            issues.push_back(fmt::format("H' = {} but h = {} at t = {}", fd, h, t));
            break;
        }
        if (h >= 0.0 && H < prev_H) {
            issues.push_back(fmt::format("H decreases at t = {} although h >= 0", t));
            break;
        }
        prev_H = H;
    }
    return issues;
}

}  // namespace vide
