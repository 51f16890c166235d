#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace vide {

/// f(x) = (1 + x)^beta.
struct PowerPlusOne {
    double beta = 2.0;
};

/// f(x) = (x + e) log(x + e).
struct LogLinear {};

/// f(x) = x^p.
struct PurePower {
    double p = 2.0;
};

/// User-supplied nonlinearity.  Only `f` is required; the optional evaluators
/// avoid nested quadrature and overflow.  Without `log_f_of_log` and
/// `log_primitive_of_log` results near 1e300 degrade to Undecided.
struct CustomNonlinearity {
    std::string name = "custom";
    std::function<double(double)> f;
    std::function<double(double)> log_f_of_log;          ///< s -> log f(e^s)
    std::function<double(double)> primitive;             ///< x -> int_0^x f
    std::function<double(double)> log_primitive_of_log;  ///< s -> log int_0^{e^s} f
    bool increasing = false;
    bool superlinear = false;
    double monotone_from = 0.0;  ///< claimed monotone on [monotone_from, inf)
};

using NonlinearityKind = std::variant<PowerPlusOne, LogLinear, PurePower, CustomNonlinearity>;

enum class OsgoodClass { Finite, Infinite, Undecided };

namespace detail {
struct NonlinearityCache;
}

/// Immutable superlinear nonlinearity with the integral functionals the growth
/// laws are phrased in: the primitive Fbar(x) = int_0^x f, and
///
///   F_B(x) = int_x^inf du / sqrt(Fbar(u)),    F_U(x) = int_1^x du / sqrt(Fbar(u)).
///
/// Every evaluator has a log-argument form (s = log x) so that solutions far
/// beyond 1e300 can still be measured.  Copies share a lazily computed Osgood
/// class; all members are safe for concurrent use.
class Nonlinearity {
public:
    explicit Nonlinearity(NonlinearityKind kind);

    static Nonlinearity power_plus_one(double beta);
    static Nonlinearity log_linear();
    static Nonlinearity pure_power(double p);
    static Nonlinearity custom(CustomNonlinearity custom);

    [[nodiscard]] const NonlinearityKind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string id() const;

    [[nodiscard]] bool is_increasing() const noexcept;
    [[nodiscard]] bool is_superlinear() const noexcept;
    [[nodiscard]] double monotone_from() const noexcept;

    /// f(x); x = 0 is allowed when f(0) is finite.
    [[nodiscard]] double operator()(double x) const;
    /// log f(e^s).
    [[nodiscard]] double log_of_log(double s) const;
    /// Fbar(x) = int_0^x f(u) du.
    [[nodiscard]] double primitive(double x) const;
    /// log Fbar(e^s).
    [[nodiscard]] double log_primitive_of_log(double s) const;

    /// Osgood class from the default ladder test, computed once and shared by copies.
    [[nodiscard]] OsgoodClass osgood_class() const;

private:
    NonlinearityKind kind_;
    std::shared_ptr<detail::NonlinearityCache> cache_;
};

inline constexpr double kDefaultFunctionalTol = 1e-10;

/// f(x).  Throws DomainError for x < 0.
double eval_f(const Nonlinearity& nl, double x);

/// Fbar(x) = int_0^x f.  Closed form for catalog kinds, adaptive quadrature for Custom.
double eval_fbar(const Nonlinearity& nl, double x);

/// F_B(x).  Rejects Osgood-infinite nonlinearities; throws UndecidedError when
/// the tail does not settle into geometric decay.
double eval_fb(const Nonlinearity& nl, double x, double tol = kDefaultFunctionalTol);
double eval_fb_log(const Nonlinearity& nl, double log_x, double tol = kDefaultFunctionalTol);

/// F_U(x), negative for x < 1.  F_U(0) is -inf when the integral diverges at 0.
double eval_fu(const Nonlinearity& nl, double x, double tol = kDefaultFunctionalTol);
double eval_fu_log(const Nonlinearity& nl, double log_x, double tol = kDefaultFunctionalTol);

/// Integrand of F_U and F_B after u = e^s:  e^s / sqrt(Fbar(e^s)).
double functional_integrand_log(const Nonlinearity& nl, double s);

/// x >= 1 with |F_U(x) - target| <= tol * max(1, target).  For Osgood-finite f
/// the target must be below F_B(1).
double invert_fu(const Nonlinearity& nl, double target, double tol = kDefaultFunctionalTol);
/// As invert_fu but returns log x, so targets whose preimage overflows are fine.
double invert_fu_log(const Nonlinearity& nl, double target, double tol = kDefaultFunctionalTol);

/// Sampled check of the nonlinearity invariants (positivity, claimed
/// monotonicity, claimed superlinearity).  Returns one message per violation.
std::vector<std::string> validate(const Nonlinearity& nl);

}  // namespace vide
