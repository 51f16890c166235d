#pragma once

#include "vide/nonlinearity.hpp"

#include <optional>
#include <span>
#include <vector>

namespace vide {

/// Tabulated Fbar, F_U and (for Osgood-finite f) F_B on a grid uniform in
/// log x.  Interpolation is cubic Hermite with the exact derivative
/// e^s / sqrt(Fbar(e^s)) at the nodes, passed through the Fritsch-Carlson
/// limiter so the interpolant stays monotone.  Read-only after build().
class FunctionalTable {
public:
    static FunctionalTable build(const Nonlinearity& nl, double log_x_min, double log_x_max,
                                 std::size_t nodes, double tol = 1e-12);

    [[nodiscard]] std::span<const double> log_grid() const noexcept { return log_x_; }
    /// Node abscissae x = e^s (inf where e^s overflows).
    [[nodiscard]] std::vector<double> grid() const;
    [[nodiscard]] std::span<const double> log_fbar_values() const noexcept { return log_fbar_; }
    [[nodiscard]] std::span<const double> fu_values() const noexcept { return fu_; }
    [[nodiscard]] const std::optional<std::vector<double>>& fb_values() const noexcept { return fb_; }

    [[nodiscard]] double log_x_min() const noexcept { return log_x_.front(); }
    [[nodiscard]] double log_x_max() const noexcept { return log_x_.back(); }

    /// Interpolated F_U at x = e^s; s must lie inside the table.
    [[nodiscard]] double fu_at_log(double s) const;
    /// Interpolated F_B at x = e^s.  Throws OsgoodClassError when no F_B column exists.
    [[nodiscard]] double fb_at_log(double s) const;

    /// log x with F_U(x) = target: table bracket, then Newton steps on the exact
    /// F_U (node value plus one short quadrature) inside the bracket.
    [[nodiscard]] double invert_fu_log(double target, double tol = 1e-12) const;

    /// F_U at the exact integral (node value + quadrature from the nearest node).
    [[nodiscard]] double fu_exact_at_log(double s) const;

private:
    FunctionalTable(Nonlinearity nl) : nl_(std::move(nl)) {}

    [[nodiscard]] std::size_t bracket(double s) const;
    [[nodiscard]] double hermite(std::span<const double> values, std::span<const double> slopes,
                                 double s) const;

    Nonlinearity nl_;
    std::vector<double> log_x_;
    std::vector<double> log_fbar_;
    std::vector<double> fu_;
    std::vector<double> fu_slope_;  // dF_U/ds after limiting
    std::optional<std::vector<double>> fb_;
    std::vector<double> fb_slope_;
};

}  // namespace vide
