#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vide {

/// w(t) = omega (1 + t)^{-alpha}.
struct PowerDecay {
    double omega = 1.0;
    double alpha = 0.0;
};

/// w(t) = omega exp(-t^gamma).
struct StretchedExp {
    double omega = 1.0;
    double gamma = 1.0;
};

/// w(t) = omega / Gamma(t + 1).
struct InverseGamma {
    double omega = 1.0;
};

/// w(t) = omega t e^{-t}; the w(0) = 0 member of the catalog.
struct TExpDecay {
    double omega = 1.0;
};

struct CustomKernel {
    std::string name = "custom";
    std::function<double(double)> w;
    /// w vanishes on (support, inf).  Convolutions then only see a sliding window.
    double support = std::numeric_limits<double>::infinity();
    /// Upper bound for |w| on [0, support]; enables negligible-history truncation.
    std::optional<double> sup_bound;
};

using KernelKind = std::variant<PowerDecay, StretchedExp, InverseGamma, TExpDecay, CustomKernel>;

/// Immutable nonnegative memory kernel.
class Kernel {
public:
    explicit Kernel(KernelKind kind);

    static Kernel power_decay(double omega, double alpha);
    static Kernel stretched_exp(double omega, double gamma);
    static Kernel inverse_gamma(double omega);
    static Kernel t_exp_decay(double omega = 1.0);
    static Kernel custom(CustomKernel custom);
    /// omega on [0, support], zero beyond.
    static Kernel box(double omega, double support);

    [[nodiscard]] const KernelKind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string id() const;

    /// w(t).  Throws DomainError for t < 0.
    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double at_zero() const noexcept { return at_zero_; }
    [[nodiscard]] double support() const noexcept { return support_; }
    [[nodiscard]] std::optional<double> sup_bound() const noexcept { return sup_bound_; }

    /// Multiplies the kernel by lambda > 0.
    [[nodiscard]] Kernel scaled(double lambda) const;

private:
    KernelKind kind_;
    double at_zero_ = 0.0;
    double support_ = std::numeric_limits<double>::infinity();
    std::optional<double> sup_bound_;
};

double eval_w(const Kernel& w, double t);

/// ||w||_{L1}, with +inf and "unknown" as first-class outcomes.
struct L1Norm {
    enum class Kind { Finite, Infinite, Unknown };
    Kind kind = Kind::Unknown;
    double value = std::numeric_limits<double>::quiet_NaN();  ///< set when Finite

    [[nodiscard]] bool is_finite() const noexcept { return kind == Kind::Finite; }
};

/// Decade-ladder quadrature ([0,1], [1,10], ..., [1e11,1e12]) with the same
/// increment test as the Osgood classifier.
L1Norm l1_norm(const Kernel& w, double tol = 1e-10);

/// Sampled kernel invariants: continuity and nonnegativity on [0, t_max].
std::vector<std::string> validate(const Kernel& w, double t_max = 100.0);

}  // namespace vide
