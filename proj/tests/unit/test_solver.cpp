#include "vide/errors.hpp"
#include "vide/solver.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <doctest.h>

#include <array>
#include <cmath>

using namespace vide;

namespace {

const Kernel one = Kernel::power_decay(1, 0);

Nonlinearity linear() { return Nonlinearity::pure_power(1.0); }

SolverConfig config(double rel_tol, double t_end) {
    SolverConfig c;
    c.rel_tol = rel_tol;
    c.t_end = t_end;
    return c;
}

// Blow-up time of x'' = (1 + x)^beta, x(0) = 1, x'(0) = 0 (the VIDE with w = 1) from the
// energy identity T = int_1^inf dx / sqrt(2 (Fbar(x) - Fbar(1))).  With x = 1 + u^2 the
// endpoint singularity disappears; Fbar(1 + v) - Fbar(1) is formed without cancellation.
double energy_blowup_time(double beta) {
    auto integrand = [beta](double u) {
        const double v = u * u;
        const double dF = std::pow(2.0, beta + 1) * std::expm1((beta + 1) * std::log1p(0.5 * v)) / (beta + 1);
        // near u = 0, dF = 2^beta v (1 + O(v))
        return v < 1e-16 ? 2.0 / std::sqrt(2.0 * std::pow(2.0, beta)) : 2.0 * u / std::sqrt(2.0 * dF);
    };
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

// x' = y, y' = f(x) - y: the VIDE with w(t) = e^{-t}.
std::array<double, 2> exp_kernel_oracle(const Nonlinearity& nl, double t_end) {
    using namespace boost::numeric::odeint;
    std::array<double, 2> state{1.0, 0.0};
    auto rhs = [&](const std::array<double, 2>& z, std::array<double, 2>& dz, double) {
        dz[0] = z[1];
        dz[1] = eval_f(nl, z[0]) - z[1];
    };
    integrate_adaptive(make_controlled<runge_kutta_dopri5<std::array<double, 2>>>(1e-12, 1e-12), rhs, state, 0.0,
                       t_end, 1e-3);
    return state;
}

Trajectory sampled(const std::function<double(double)>& x, const std::function<double(double)>& dx, double t_last,
                   int n) {
    Trajectory tr;
    for (int i = 0; i <= n; ++i) {
        // graded towards t_last so the crossings are resolved
        const double t = t_last * (1.0 - std::pow(1.0 - static_cast<double>(i) / n, 3.0));
        tr.times.push_back(t);
        tr.values.push_back(x(t));
        tr.derivs.push_back(dx(t));
    }
    tr.x0 = x(0.0);
    tr.ratio = 2.0;
    recompute_crossings(tr);
    tr.status = BlowUpDetected{};
    return tr;
}

}  // namespace

TEST_CASE("config validation") {
    SolverConfig c;
    CHECK_NOTHROW(validate(c));
    c.min_step = 1.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = SolverConfig{};
    c.rel_tol = 0.1;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = SolverConfig{};
    c.geometric_ratio = 1.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    CHECK_THROWS(solve(one, linear(), Forcing::zero(), 0.0, SolverConfig{}));
}

TEST_CASE("cosh: closed form at t = 2") {
    const Trajectory tr = solve(one, linear(), Forcing::zero(), 1.0, config(1e-6, 2.0));
    REQUIRE(tr.reached_horizon());
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.values.front() == 1.0);
    CHECK(tr.times.back() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(tr.values.back() - std::cosh(2.0)) / std::cosh(2.0) <= 1e-4);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        worst = std::max(worst, std::abs(tr.values[i] - std::cosh(tr.times[i])) / std::cosh(tr.times[i]));
        CHECK(std::abs(tr.derivs[i] - std::sinh(tr.times[i])) <= 1e-4 * std::cosh(tr.times[i]));
    }
    CHECK(worst <= 1e-4);
    CHECK(residual_check(tr, one, linear(), Forcing::zero(), 1.0) <= 10 * 1e-6 * tr.values.back());
}

TEST_CASE("fixed steps converge with order 2") {
    std::vector<double> errors;
    for (double h : {0.04, 0.02, 0.01}) {
        SolverConfig c = config(1e-6, 2.0);
        c.fixed_step = h;
        const Trajectory tr = solve(one, linear(), Forcing::zero(), 1.0, c);
        REQUIRE(tr.reached_horizon());
        double e = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i) e = std::max(e, std::abs(tr.values[i] - std::cosh(tr.times[i])));
        errors.push_back(e);
    }
    for (std::size_t i = 1; i < errors.size(); ++i) CHECK(std::log2(errors[i - 1] / errors[i]) >= 1.8);
}

TEST_CASE("convolution_term") {
    Trajectory empty;
    CHECK(convolution_term(empty, one, linear(), 0.0) == 0.0);

    Trajectory flat;
    flat.times = {0.0, 0.3, 1.1, 2.0};
    flat.values = {5.0, 5.0, 5.0, 5.0};
    flat.derivs = {0.0, 0.0, 0.0, 0.0};
    CHECK(convolution_term(flat, one, linear(), 2.0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(convolution_term(flat, one, linear(), 2.5) == doctest::Approx(12.5).epsilon(1e-12));

    // f(x(s)) = 1 + 3 s: trapezoid is exact
    Trajectory lin;
    lin.times = {0.0, 0.2, 0.9, 1.5};
    for (double t : lin.times) {
        lin.values.push_back(1.0 + 3.0 * t);
        lin.derivs.push_back(3.0);
    }
    CHECK(convolution_term(lin, one, linear(), 1.5) == doctest::Approx(1.5 + 1.5 * 1.5 * 1.5).epsilon(1e-12));
}

TEST_CASE("blow-up time from synthetic crossings") {
    const Trajectory a = sampled([](double t) { return 1.0 / (1.0 - t); },
                                 [](double t) { return 1.0 / ((1.0 - t) * (1.0 - t)); }, 1.0 - 1e-9, 4000);
    REQUIRE(a.crossings.size() >= 6);
    // exact crossing times 1 - 2^{-n}
    for (const Crossing& c : a.crossings) CHECK(c.time == doctest::Approx(1.0 - std::pow(2.0, -c.index)).epsilon(1e-9));
    const auto [T, err] = estimate_blowup_time(a, SolverConfig{});
    CHECK(T == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(err < 1e-6);

    const Trajectory b = sampled([](double t) { return std::pow(1.0 - t, -2.0); },
                                 [](double t) { return 2.0 * std::pow(1.0 - t, -3.0); }, 1.0 - 1e-6, 4000);
    CHECK(estimate_blowup_time(b, SolverConfig{}).first == doctest::Approx(1.0).epsilon(1e-6));

    Trajectory few = a;
    few.crossings.resize(5);
    try {
        (void)estimate_blowup_time(few, SolverConfig{});
        CHECK(false);
    } catch (const AccelerationError& e) {
        CHECK(e.kind() == AccelerationError::Kind::InsufficientCrossings);
    }
}

TEST_CASE("beta-power example blows up at the energy-integral time") {
    const auto pp = Nonlinearity::power_plus_one(2);
    const double T_exact = energy_blowup_time(2.0);
    // 40-digit value of the same integral
    CHECK(T_exact == doctest::Approx(2.103273157988181).epsilon(1e-12));
    const Trajectory t6 = solve(one, pp, Forcing::zero(), 1.0, config(1e-6, 10.0));
    const Trajectory t5 = solve(one, pp, Forcing::zero(), 1.0, config(1e-5, 10.0));
    REQUIRE(t6.blew_up());
    REQUIRE(t5.blew_up());
    const auto b6 = std::get<BlowUpDetected>(t6.status);
    const auto b5 = std::get<BlowUpDetected>(t5.status);
    CHECK(b6.T_est > t6.times.back());
    CHECK(t6.values.back() >= SolverConfig{}.blowup_threshold);
    CHECK(std::abs(b6.T_est - b5.T_est) <= 1e-3);
    CHECK(std::abs(b6.T_est - T_exact) <= 1e-4 * T_exact);
    for (double beta : {1.5, 3.0}) {
        const auto nl = Nonlinearity::power_plus_one(beta);
        const Trajectory tr = solve(one, nl, Forcing::zero(), 1.0, config(1e-6, 20.0));
        REQUIRE(tr.blew_up());
        CHECK(std::get<BlowUpDetected>(tr.status).T_est == doctest::Approx(energy_blowup_time(beta)).epsilon(1e-4));
    }
}

TEST_CASE("log-linear example is global and matches the ODE reduction") {
    const auto ll = Nonlinearity::log_linear();
    const Kernel w = Kernel::stretched_exp(1, 1);
    SolverConfig c = config(1e-6, 12.0);
    c.blowup_threshold = 1e300;
    const Trajectory tr = solve(w, ll, Forcing::zero(), 1.0, c);
    REQUIRE(tr.reached_horizon());
    for (std::size_t i = 1; i < tr.size(); ++i) {
        CHECK(std::isfinite(tr.values[i]));
        CHECK(tr.values[i] >= tr.values[i - 1]);
        CHECK(tr.derivs[i] >= 0.0);
    }
    // Error control is per step, so the global error is a multiple of rel_tol that grows
    // with the step count (about 3000 steps here); it must shrink with rel_tol.
    for (double t : {3.0, 6.0, 12.0}) {
        const auto ref = exp_kernel_oracle(ll, t);
        CHECK(tr.value_at(t) == doctest::Approx(ref[0]).epsilon(2.5e-3));
    }
    SolverConfig fine = c;
    fine.rel_tol = 1e-7;
    const Trajectory tf = solve(w, ll, Forcing::zero(), 1.0, fine);
    const double ref12 = exp_kernel_oracle(ll, 12.0)[0];
    const double e6 = std::abs(tr.values.back() / ref12 - 1.0);
    const double e7 = std::abs(tf.values.back() / ref12 - 1.0);
    CHECK(e7 < e6 / 3.0);
    CHECK(e7 < 5e-4);
    SolverConfig c10 = c;
    c10.t_end = 10.0;
    const Trajectory t10 = solve(w, ll, Forcing::zero(), 1.0, c10);
    CHECK(residual_check(t10, w, ll, Forcing::zero(), 1.0) <= 10 * 1e-6 * t10.values.back());
}

TEST_CASE("residual of a zero-length run") {
    const Trajectory tr = solve(one, linear(), Forcing::zero(), 1.0, config(1e-6, 0.0));
    REQUIRE(tr.reached_horizon());
    CHECK(tr.size() == 1);
    CHECK(residual_check(tr, one, linear(), Forcing::zero(), 1.0) == 0.0);
    const Trajectory blown = solve(one, Nonlinearity::power_plus_one(2), Forcing::zero(), 1.0, config(1e-5, 5.0));
    CHECK_THROWS_AS(residual_check(blown, one, Nonlinearity::power_plus_one(2), Forcing::zero(), 1.0), DomainError);
}

TEST_CASE("forcing enters through H") {
    // w = 0 up to round-off: x = x0 + H exactly
    const Kernel tiny = Kernel::power_decay(1e-300, 0);
    const Trajectory tr = solve(tiny, linear(), Forcing::power_growth(2), 1.0, config(1e-6, 3.0));
    REQUIRE(tr.reached_horizon());
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.values[i] == doctest::Approx(1.0 + tr.times[i] * tr.times[i]));
    CHECK(residual_check(tr, tiny, linear(), Forcing::power_growth(2), 1.0) < 1e-10);
}

TEST_CASE("comparison in the kernel and determinism") {
    const auto ll = Nonlinearity::log_linear();
    const Kernel w = Kernel::stretched_exp(1, 1);
    const SolverConfig c = config(1e-6, 6.0);
    const Trajectory a = solve(w, ll, Forcing::zero(), 1.0, c);
    const Trajectory b = solve(w.scaled(2.0), ll, Forcing::zero(), 1.0, c);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.value_at(a.times[i]) >= a.values[i]);
    const Trajectory again = solve(w, ll, Forcing::zero(), 1.0, c);
    CHECK(again.times == a.times);
    CHECK(again.values == a.values);
    CHECK(again.derivs == a.derivs);
}

TEST_CASE("aborts") {
    SolverConfig c = config(1e-6, 5.0);
    c.max_steps = 10;
    const Trajectory limited = solve(one, linear(), Forcing::zero(), 1.0, c);
    REQUIRE(limited.aborted());
    CHECK(std::get<Aborted>(limited.status).reason == AbortReason::StepLimit);

    CustomForcing drain;
    drain.name = "drain";
    drain.h = [](double) { return -1.0; };
    drain.H = [](double t) { return -t; };
    const Trajectory neg = solve(Kernel::power_decay(1e-3, 0), linear(), Forcing::custom(drain), 1.0, config(1e-6, 5.0));
    REQUIRE(neg.aborted());
    CHECK(std::get<Aborted>(neg.status).reason == AbortReason::PositivityLoss);
    CHECK(std::get<Aborted>(neg.status).t == doctest::Approx(1.0).epsilon(0.01));
}
