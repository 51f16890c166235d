#include "vide/errors.hpp"
#include "vide/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace vide;

TEST_CASE("integrate: polynomials and smooth functions") {
    CHECK(quad::integrate([](double x) { return x * x; }, 0.0, 3.0, 1e-12).value == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    // reversed limits flip the sign
    CHECK(quad::integrate([](double x) { return std::exp(x); }, 1.0, 0.0, 1e-12).value ==
          doctest::Approx(1.0 - std::numbers::e).epsilon(1e-13));
    CHECK(quad::integrate([](double) { return 1.0; }, 2.0, 2.0, 1e-12).value == 0.0);
}

TEST_CASE("integrate: narrow peak needs subdivision") {
    // Lorentzian of width 1e-3 centred off the panel midpoint
    const double w = 1e-3;
    auto f = [w](double x) { return w / ((x - 0.3) * (x - 0.3) + w * w); };
    const double exact = std::atan(0.7 / w) + std::atan(0.3 / w);
    CHECK(quad::integrate(f, 0.0, 1.0, 1e-10).value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("integrate: a jump is resolved to the requested tolerance or reported") {
    auto step = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
    try {
        const double v = quad::integrate(step, 0.0, 1.0, 1e-6).value;
        CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
    } catch (const QuadratureError&) {
        CHECK(true);
    }
}

TEST_CASE("integrate: a non-integrable singularity throws") {
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / (x * x); }, 0.0, 1.0, 1e-10), QuadratureError);
}

TEST_CASE("integrate_dyadic: long log-variable range") {
    // int_0^S e^{-s/1e4} ds over a range far beyond one panel
    const double S = 1e6;
    const double v = quad::integrate_dyadic([](double s) { return std::exp(-s / 1e4); }, 0.0, S, 1e-12);
    CHECK(v == doctest::Approx(1e4 * -std::expm1(-S / 1e4)).epsilon(1e-11));
    const double neg = quad::integrate_dyadic([](double s) { return 1.0 / (1.0 + s * s); }, -50.0, 70.0, 1e-12);
    CHECK(neg == doctest::Approx(std::atan(70.0) + std::atan(50.0)).epsilon(1e-12));
}

TEST_CASE("gauss_legendre is exact on degree 39") {
    auto p = [](double x) { return std::pow(x, 39) + 1.0; };
    CHECK(quad::gauss_legendre(p, 0.0, 1.0) == doctest::Approx(1.0 + 1.0 / 40.0).epsilon(1e-14));
}

TEST_CASE("classify_increments") {
    std::vector<double> geometric, harmonic, flat;
    for (int k = 0; k < 10; ++k) {
        geometric.push_back(std::pow(0.3, k));
        harmonic.push_back(1.0 / (k + 1.0));
        flat.push_back(2.0);
    }
    const auto g = quad::classify_increments(geometric, 0.0, 1e-2);
    CHECK(g.classification == quad::LadderVerdict::Class::Summable);
    CHECK(g.ratio == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(g.partial_sum + g.tail == doctest::Approx(1.0 / 0.7).epsilon(1e-8));
    CHECK(quad::classify_increments(flat, 0.0, 1e-2).classification == quad::LadderVerdict::Class::NonSummable);
    CHECK(quad::classify_increments(harmonic, 0.0, 1e-2).classification == quad::LadderVerdict::Class::NonSummable);
}
