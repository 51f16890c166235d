#pragma once

#include "vide/functional_table.hpp"
#include "vide/nonlinearity.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace vide {

struct ZeroForcing {};

/// H(t) = t^alpha, h(t) = alpha t^{alpha - 1}.
struct PowerGrowth {
    double alpha = 1.0;
};

/// H(t) = F_U^{-1}(K t) - 1, so that H(0) = 0 and F_U(H(t)) / t -> K.
struct RateScale {
    double K = 1.0;
    Nonlinearity nonlinearity;
    std::shared_ptr<const FunctionalTable> table;
};

/// h may be negative; only its running integral H has to stay nonnegative.
struct CustomForcing {
    std::string name = "custom";
    std::function<double(double)> h;
    std::function<double(double)> H;
};

using ForcingKind = std::variant<ZeroForcing, PowerGrowth, RateScale, CustomForcing>;

class Forcing {
public:
    explicit Forcing(ForcingKind kind);

    static Forcing zero();
    static Forcing power_growth(double alpha);
    /// Builds the F_U table RateScale inverts against; requires an Osgood-infinite f.
    static Forcing rate_scale(double K, const Nonlinearity& nl);
    static Forcing custom(CustomForcing custom);

    [[nodiscard]] const ForcingKind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string id() const;
    [[nodiscard]] bool is_zero() const noexcept;

    /// h(t), the forcing in x' = h + w * f(x).
    [[nodiscard]] double h(double t) const;
    /// H(t) = int_0^t h.
    [[nodiscard]] double H(double t) const;
    /// log H(t); finite far beyond the range where H itself overflows.
    [[nodiscard]] double log_H(double t) const;

private:
    ForcingKind kind_;
};

double eval_h(const Forcing& forcing, double t);
double eval_H(const Forcing& forcing, double t);

/// Sampled forcing invariants: H(0) = 0, H >= 0, H' = h by central differences,
/// H nondecreasing wherever h >= 0.
std::vector<std::string> validate(const Forcing& forcing, double t_max = 20.0);

}  // namespace vide
