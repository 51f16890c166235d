#include "vide/errors.hpp"
#include "vide/osgood.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace vide;

namespace {

Nonlinearity linear() {
    CustomNonlinearity c;
    c.name = "x";
    c.f = [](double x) { return x; };
    c.primitive = [](double x) { return 0.5 * x * x; };
    c.increasing = true;
    return Nonlinearity::custom(c);
}

GrowthMap map_of(std::string name, std::function<double(double)> log_g) {
    GrowthMap g;
    g.name = std::move(name);
    g.log_value = log_g;
    g.value = [log_g](double x) { return std::exp(log_g(x)); };
    return g;
}

}  // namespace

TEST_CASE("classifier on the catalog") {
    for (double beta : {1.5, 2.0, 3.0}) {
        const auto start = std::chrono::steady_clock::now();
        CHECK(classify_osgood(Nonlinearity::power_plus_one(beta)).classification == OsgoodClass::Finite);
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
    }
    CHECK(classify_osgood(Nonlinearity::log_linear()).classification == OsgoodClass::Infinite);
    CHECK(classify_osgood(linear()).classification == OsgoodClass::Infinite);
    CHECK(classify_osgood(Nonlinearity::pure_power(1.0)).classification == OsgoodClass::Infinite);
    CHECK(classify_osgood(Nonlinearity::pure_power(0.5)).classification == OsgoodClass::Infinite);
    CHECK(classify_osgood(Nonlinearity::pure_power(2.0)).classification == OsgoodClass::Finite);
    CHECK(classify_osgood(Nonlinearity::pure_power(4.0)).classification == OsgoodClass::Finite);
}

TEST_CASE("ladder partial integrals: nondecreasing and independently reproduced") {
    const auto pp = Nonlinearity::power_plus_one(2);
    const auto v = classify_osgood(pp);
    REQUIRE(v.partial_integral_at_cutoffs.size() == default_cutoff_ladder().size());
    for (std::size_t i = 1; i < v.partial_integral_at_cutoffs.size(); ++i) {
        CHECK(v.partial_integral_at_cutoffs[i].second >= v.partial_integral_at_cutoffs[i - 1].second);
    }
    REQUIRE(v.extrapolated_tail.has_value());
    // I(K) = int_1^K sqrt(3) / sqrt((1+u)^3 - 1) du, reference by tanh-sinh in log u
    boost::math::quadrature::tanh_sinh<double> ts;
    const auto [K, IK] = v.partial_integral_at_cutoffs[3];
    const double ref = ts.integrate(
        [](double s) {
            const double u = std::exp(s);
            return u * std::sqrt(3.0) / std::sqrt(std::pow(1 + u, 3) - 1);
        },
        0.0, std::log(K));
    CHECK(IK == doctest::Approx(ref).epsilon(1e-9));
    // F_B(1) = I(1e12) + tail
    CHECK(v.partial_integral_at_cutoffs.back().second + *v.extrapolated_tail ==
          doctest::Approx(eval_fb(pp, 1.0)).epsilon(1e-6));
}

TEST_CASE("linear f: I(K) = sqrt(2) log K") {
    const auto v = classify_osgood(linear());
    for (const auto& [K, I] : v.partial_integral_at_cutoffs) CHECK(I == doctest::Approx(std::sqrt(2.0) * std::log(K)).epsilon(1e-9));
}

TEST_CASE("equivalence of the two integral criteria") {
    const auto ladder = default_cutoff_ladder();
    const auto start = std::chrono::steady_clock::now();
    for (const Nonlinearity& nl : {Nonlinearity::power_plus_one(1.5), Nonlinearity::power_plus_one(2),
                                   Nonlinearity::power_plus_one(3), Nonlinearity::log_linear(), linear(),
                                   Nonlinearity::pure_power(2)}) {
        CHECK(check_osgood_equivalence(nl, ladder));
        const auto a = classify_osgood(nl, 1.0, ladder).classification;
        const auto b = classify_osgood_alternative(nl, ladder).classification;
        CHECK(a == b);
    }
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}

TEST_CASE("superexponential test") {
    const auto eps = default_epsilons();
    const auto ladder = default_growth_ladder();
    CHECK(test_superexponential(exp_square_map(), eps, ladder));
    CHECK_FALSE(test_superexponential(map_of("exp", [](double x) { return x; }), eps, ladder));
    CHECK_FALSE(test_superexponential(map_of("square", [](double x) { return 2 * std::log(x); }), eps, ladder));
    CHECK(test_superexponential(map_of("exp_exp", [](double x) { return std::exp(0.1 * x); }), eps, ladder));
}

TEST_CASE("preservation of superexponential growth") {
    const std::vector<GrowthMap> witnesses{exp_square_map()};
    const auto eps = default_epsilons();
    const auto ladder = default_growth_ladder();
    CHECK(test_preserves_superexponential(Nonlinearity::power_plus_one(2), witnesses, eps, ladder));
    CHECK(test_preserves_superexponential(Nonlinearity::log_linear(), witnesses, eps, ladder));
    const auto structural = preservation_report(Nonlinearity::power_plus_one(2), witnesses, eps, ladder);
    CHECK(structural.structural);
    CHECK_FALSE(structural.condition.empty());

    // The sampled path must agree with the shortcut on the catalog.
    CHECK(sampled_preservation(Nonlinearity::power_plus_one(2), witnesses, eps, ladder).preserves);
    CHECK(sampled_preservation(Nonlinearity::log_linear(), witnesses, eps, ladder).preserves);

    // f(x) = x (2 + sin log x): only a record of the sampled ratios, no ground truth
    CustomNonlinearity wavy;
    wavy.name = "x(2+sin log x)";
    wavy.f = [](double x) { return x * (2.0 + std::sin(std::log(x))); };
    wavy.log_f_of_log = [](double s) { return s + std::log(2.0 + std::sin(s)); };
    const auto report = sampled_preservation(Nonlinearity::custom(wavy), witnesses, eps, ladder);
    CHECK(report.samples.size() == eps.size() * ladder.size());
    for (const RatioSample& r : report.samples) CHECK((r.ratio >= 0.0 && r.ratio <= 1.0));
    MESSAGE("x(2+sin log x) sampled preservation: " << report.preserves);

    // a witness that is not superexponential is rejected
    const std::vector<GrowthMap> bad{map_of("exp", [](double x) { return x; })};
    CHECK_THROWS_AS(preservation_report(Nonlinearity::log_linear(), bad, eps, ladder), ConfigError);
}
