#include "vide/kernel.hpp"

#include "vide/errors.hpp"
#include "vide/quadrature.hpp"

#include <fmt/core.h>

#include <cmath>

namespace vide {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

// min_{t >= 0} Gamma(t + 1), attained at t = 0.4616321449683623.
constexpr double kGammaMin = 0.8856031944108887;

// 1 / Gamma(t + 1); glibc tgamma is accurate to a few ulp, lgamma covers the
// range where Gamma overflows.
double inverse_gamma_shifted(double t) {
    if (t < 170.0) return 1.0 / std::tgamma(t + 1.0);
    return std::exp(-std::lgamma(t + 1.0));
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be > 0 (got {})", what, v));
}

}  // namespace

Kernel::Kernel(KernelKind kind) : kind_(std::move(kind)) {
    std::visit(Overloaded{
                   [this](const PowerDecay& k) {
                       require_positive(k.omega, "power_decay: omega");
                       if (!(k.alpha >= 0.0)) throw ConfigError("power_decay: alpha must be >= 0");
                       sup_bound_ = k.omega;
                   },
                   [this](const StretchedExp& k) {
                       require_positive(k.omega, "stretched_exp: omega");
                       require_positive(k.gamma, "stretched_exp: gamma");
                       sup_bound_ = k.omega;
                   },
                   [this](const InverseGamma& k) {
                       require_positive(k.omega, "inverse_gamma: omega");
                       sup_bound_ = k.omega / kGammaMin;
                   },
                   [this](const TExpDecay& k) {
                       require_positive(k.omega, "t_exp_decay: omega");
                       sup_bound_ = k.omega / std::exp(1.0);
                   },
                   [this](const CustomKernel& k) {
                       if (!k.w) throw ConfigError("custom kernel needs an evaluator");
                       require_positive(k.support, "custom kernel: support");
                       support_ = k.support;
                       sup_bound_ = k.sup_bound;
                   },
               },
               kind_);
    at_zero_ = (*this)(0.0);
}

Kernel Kernel::power_decay(double omega, double alpha) { return Kernel(PowerDecay{omega, alpha}); }
Kernel Kernel::stretched_exp(double omega, double gamma) {
    return Kernel(StretchedExp{omega, gamma});
}
Kernel Kernel::inverse_gamma(double omega) { return Kernel(InverseGamma{omega}); }
Kernel Kernel::t_exp_decay(double omega) { return Kernel(TExpDecay{omega}); }
Kernel Kernel::custom(CustomKernel custom) { return Kernel(std::move(custom)); }

Kernel Kernel::box(double omega, double support) {
    CustomKernel k;
    k.name = fmt::format("box:omega={},support={}", omega, support);
    k.w = [omega, support](double t) { return t <= support ? omega : 0.0; };
    k.support = support;
    k.sup_bound = omega;
    return Kernel(std::move(k));
}

std::string Kernel::id() const {
    return std::visit(
        Overloaded{
            [](const PowerDecay& k) { return fmt::format("power_decay:omega={},alpha={}", k.omega, k.alpha); },
            [](const StretchedExp& k) { return fmt::format("stretched_exp:omega={},gamma={}", k.omega, k.gamma); },
            [](const InverseGamma& k) { return fmt::format("inverse_gamma:omega={}", k.omega); },
            [](const TExpDecay& k) {
                return k.omega == 1.0 ? std::string("t_exp_decay")
                                      : fmt::format("t_exp_decay:omega={}", k.omega);
            },
            [](const CustomKernel& k) { return k.name; },
        },
        kind_);
}

double Kernel::operator()(double t) const {
    if (!(t >= 0.0)) throw DomainError(fmt::format("kernel evaluated at t = {} < 0", t));
    return std::visit(Overloaded{
                          [t](const PowerDecay& k) {
                              return k.alpha == 0.0 ? k.omega : k.omega * std::pow(1.0 + t, -k.alpha);
                          },
                          [t](const StretchedExp& k) { return k.omega * std::exp(-std::pow(t, k.gamma)); },
                          [t](const InverseGamma& k) { return k.omega * inverse_gamma_shifted(t); },
                          [t](const TExpDecay& k) { return k.omega * t * std::exp(-t); },
                          [t](const CustomKernel& k) { return t > k.support ? 0.0 : k.w(t); },
                      },
                      kind_);
}

Kernel Kernel::scaled(double lambda) const {
    require_positive(lambda, "kernel scale");
    return std::visit(
        Overloaded{
            [lambda](PowerDecay k) { k.omega *= lambda; return Kernel(k); },
            [lambda](StretchedExp k) { k.omega *= lambda; return Kernel(k); },
            [lambda](InverseGamma k) { k.omega *= lambda; return Kernel(k); },
            [lambda](TExpDecay k) { k.omega *= lambda; return Kernel(k); },
            [lambda](CustomKernel k) {
                auto inner = k.w;
                k.w = [inner, lambda](double t) { return lambda * inner(t); };
                if (k.sup_bound) k.sup_bound = *k.sup_bound * lambda;
                k.name = fmt::format("{}*{}", k.name, lambda);
                return Kernel(std::move(k));
            },
        },
        kind_);
}

double eval_w(const Kernel& w, double t) { return w(t); }

L1Norm l1_norm(const Kernel& w, double tol) {
    const auto f = [&w](double t) { return w(t); };
    std::vector<double> increments;
    double lo = 0.0;
    for (int k = 0; k <= 12; ++k) {
        const double hi = std::pow(10.0, k);
        const double a = std::min(lo, w.support());
        const double b = std::min(hi, w.support());
        increments.push_back(a < b ? quad::integrate(f, a, b, tol).value : 0.0);
        lo = hi;
    }
    const auto ladder = quad::classify_increments(increments, 0.0, 1e-2);
    L1Norm norm;
    switch (ladder.classification) {
        case quad::LadderVerdict::Class::Summable:
            norm.kind = L1Norm::Kind::Finite;
            norm.value = ladder.partial_sum + ladder.tail;
            break;
        case quad::LadderVerdict::Class::NonSummable:
            norm.kind = L1Norm::Kind::Infinite;
            norm.value = std::numeric_limits<double>::infinity();
            break;
        case quad::LadderVerdict::Class::Undecided:
            norm.kind = L1Norm::Kind::Unknown;
            break;
    }
    return norm;
}

std::vector<std::string> validate(const Kernel& w, double t_max) {
    std::vector<std::string> issues;
    constexpr double cell = 1e-2;
    for (double t = 0.0; t < t_max; t += cell) {
        const double a = w(t);
        const double b = w(t + cell);
        if (!(a >= 0.0) || !std::isfinite(a)) {
            issues.push_back(fmt::format("w({}) = {} is not a nonnegative finite value", t, a));
            break;
        }
        // Chase the largest sub-jump down to width ~1e-8: a continuous kernel's
        // jump shrinks with the width, a discontinuity keeps it.
        const double jump = std::abs(b - a);
        if (jump <= 1e-12) continue;
        double lo = t, hi = t + cell;
        for (int i = 0; i < 20; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (std::abs(w(mid) - w(lo)) >= std::abs(w(hi) - w(mid))) hi = mid; else lo = mid;
        }
        if (std::abs(w(hi) - w(lo)) > 0.5 * jump) {
            issues.push_back(fmt::format("w jumps by {:.3g} near t = {:.8g}", jump, lo));
            break;
        }
    }
    return issues;
}

}  // namespace vide
