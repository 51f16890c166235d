#include "vide/asymptotics.hpp"

#include "vide/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vide {

namespace {

constexpr double kMaxRelativeTimeError = 0.01;
constexpr double kInconclusiveTimeError = 0.1;
constexpr double kDegenerateFraction = 0.2;

// Least-squares fit of v(t) = L + (a log t + b) / t; returns L.
double fit_log_over_t(std::span<const RateSample> s) {
    std::array<std::array<double, 4>, 3> m{};
    for (const RateSample& p : s) {
        const std::array<double, 3> row{1.0, std::log(p.t) / p.t, 1.0 / p.t};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
            m[i][3] += row[i] * p.value;
        }
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        }
        std::swap(m[c], m[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double q = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= q * m[c][k];
        }
    }
    return m[0][3] / m[0][0];
}

}  // namespace

Extrapolation aitken_extrapolate(std::span<const double> s) {
    if (s.size() < 3) {
        throw AccelerationError(AccelerationError::Kind::InsufficientSamples,
                                fmt::format("Aitken needs 3 samples, got {}", s.size()));
    }
    std::vector<double> acc;
    acc.reserve(s.size() - 2);
    for (std::size_t k = 2; k < s.size(); ++k) {
        const double d1 = s[k] - s[k - 1];
        const double d0 = s[k - 1] - s[k - 2];
        const double den = d1 - d0;
        // Accelerate only while the increments contract; at the noise floor they do not.
        const bool contracting = std::abs(d1) < std::abs(d0) && den != 0.0;
        acc.push_back(contracting ? s[k] - d1 * d1 / den : s[k]);
    }
    const std::size_t m = acc.size();
    if (m >= 4) {
        const double i1 = std::abs(acc[m - 1] - acc[m - 2]);
        const double i2 = std::abs(acc[m - 2] - acc[m - 3]);
        const double i3 = std::abs(acc[m - 3] - acc[m - 4]);
        if (i1 > i2 && i2 > i3 && i1 > std::abs(s.back() - s[s.size() - 2])) {
            throw AccelerationError(AccelerationError::Kind::DivergentAcceleration,
                                    "Aitken increments grow");
        }
    }
    Extrapolation e;
    e.limit = acc.back();
    e.err = m >= 2 ? std::abs(acc[m - 1] - acc[m - 2]) : std::abs(acc.back() - s.back());
    return e;
}

Verdict judge(double limit, double err, double target, double rel_band) {
    if (!std::isfinite(limit) || !std::isfinite(err)) return Verdict::Inconclusive;
    const double band = rel_band * std::abs(target);
    if (err > band) return Verdict::Inconclusive;
    return std::abs(limit - target) <= band ? Verdict::Consistent : Verdict::Inconsistent;
}

RateDiagnostic blowup_profile_diagnostic(const Trajectory& traj,
                                         const std::function<double(double)>& g, double target,
                                         double rel_band) {
    const auto* b = std::get_if<BlowUpDetected>(&traj.status);
    if (!b) throw DomainError("blow-up diagnostic needs a trajectory in blow-up mode");
    RateDiagnostic d;
    d.functional = RateFunctional::BlowUpRate;
    d.target = target;
    d.rel_band = rel_band;

    const double T = b->T_est;
    for (const Crossing& c : traj.crossings) {
        const double gap = T - c.time;
        if (gap > 0.0 && b->T_err <= kMaxRelativeTimeError * gap) {
            d.samples.push_back({c.time, g(c.level) / gap});
        }
    }
    if (d.samples.size() < 3) {
        d.extrapolated_limit = d.samples.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                 : d.samples.back().value;
        d.limit_err = std::numeric_limits<double>::infinity();
        d.note = fmt::format("{} crossings resolved against T_err", d.samples.size());
        d.verdict = Verdict::Inconclusive;
        return d;
    }

    // Extrapolate over the prefix where the T_err-induced noise in a sample is still
    // below its increment; later crossings only add noise.
    const auto sensitivity = [&](const RateSample& s) {
        return std::abs(s.value) * b->T_err / (T - s.t);
    };
    std::size_t used = 1;
    while (used < d.samples.size() &&
           sensitivity(d.samples[used]) < std::abs(d.samples[used].value - d.samples[used - 1].value)) {
        ++used;
    }
    used = std::max<std::size_t>(used, 3);
    std::vector<double> values;
    for (std::size_t i = 0; i < used; ++i) values.push_back(d.samples[i].value);
    try {
        const Extrapolation e = aitken_extrapolate(values);
        d.extrapolated_limit = e.limit;
        d.limit_err = std::max(e.err, sensitivity(d.samples[used - 1]));
        d.verdict = judge(d.extrapolated_limit, d.limit_err, target, rel_band);
        d.note = fmt::format("extrapolated over {} of {} crossings", used, d.samples.size());
    } catch (const AccelerationError& ex) {
        d.extrapolated_limit = values.back();
        d.limit_err = std::numeric_limits<double>::infinity();
        d.note = ex.what();
        d.verdict = Verdict::Inconclusive;
    }
    if (b->T_err > kInconclusiveTimeError * (T - traj.times.back())) {
        d.note = "blow-up time not resolved near the last sample";
        d.verdict = Verdict::Inconclusive;
    }
    return d;
}

RateDiagnostic blowup_rate_diagnostic(const Trajectory& traj, const Nonlinearity& nl, double w0,
                                      double rel_band) {
    if (nl.osgood_class() != OsgoodClass::Finite) {
        throw OsgoodClassError("blow-up rate diagnostic needs an Osgood-finite nonlinearity");
    }
    if (!(w0 > 0.0)) throw DomainError("blow-up rate diagnostic needs w(0) > 0");
    const auto fb = [&nl](double x) { return eval_fb_log(nl, std::log(x)); };
    return blowup_profile_diagnostic(traj, fb, std::sqrt(2.0 * w0), rel_band);
}

RateDiagnostic growth_rate_diagnostic(const Trajectory& traj, const Nonlinearity& nl, double w0,
                                      double rel_band, int levels) {
    if (!traj.reached_horizon()) throw DomainError("growth diagnostic needs a run that reached its horizon");
    if (nl.osgood_class() != OsgoodClass::Infinite) {
        throw OsgoodClassError("growth rate diagnostic needs an Osgood-infinite nonlinearity");
    }
    if (levels < 4) throw DomainError("growth diagnostic needs at least 4 dyadic levels");
    RateDiagnostic d;
    d.functional = RateFunctional::GrowthRate;
    d.target = std::sqrt(2.0 * w0);
    d.rel_band = rel_band;

    const double t_end = traj.times.back();
    for (int k = levels - 1; k >= 0; --k) {
        const double t = std::ldexp(t_end, -k);
        d.samples.push_back({t, eval_fu_log(nl, traj.log_value_at(t)) / t});
    }

    if (w0 == 0.0) {
        // Samples covering the last decade [t_end / 10, t_end].
        std::size_t first = 0;
        while (d.samples[first].t < 0.1 * t_end) ++first;
        bool decreasing = true;
        for (std::size_t i = first + 1; i < d.samples.size(); ++i) {
            decreasing = decreasing && d.samples[i].value < d.samples[i - 1].value;
        }
        const double final_value = d.samples.back().value;
        d.extrapolated_limit = final_value;
        d.limit_err = std::abs(final_value - d.samples[d.samples.size() - 2].value);
        const double bound = kDegenerateFraction * std::sqrt(2.0);
        d.verdict = decreasing && final_value <= bound ? Verdict::Consistent : Verdict::Inconclusive;
        d.note = fmt::format("decreasing={} final={} bound={}", decreasing, final_value, bound);
        return d;
    }

    double up = 0.0;
    double down = 0.0;
    double scale = 0.0;
    for (std::size_t i = 1; i < d.samples.size(); ++i) {
        const double diff = d.samples[i].value - d.samples[i - 1].value;
        up = std::max(up, diff);
        down = std::max(down, -diff);
        scale = std::max(scale, std::abs(d.samples[i].value));
    }
    const double all = fit_log_over_t(d.samples);
    const double tail = fit_log_over_t(std::span<const RateSample>(d.samples).subspan(1));
    d.extrapolated_limit = all;
    d.limit_err = std::abs(all - tail);
    d.verdict = judge(all, d.limit_err, d.target, rel_band);
    const double noise = 1e-3 * scale;
    if (up > noise && down > noise) {
        d.note = "samples not monotone";
        d.verdict = Verdict::Inconclusive;
    }
    return d;
}

std::vector<double> default_perturbation_ladder() {
    std::vector<double> ts;
    for (int k = 0; k <= 16; ++k) ts.push_back(std::ldexp(1.0, k));
    return ts;
}

PerturbationReport perturbation_criterion(const Forcing& forcing, const Nonlinearity& nl, double w0,
                                          std::span<const double> t_ladder, double rel_band) {
    if (nl.osgood_class() != OsgoodClass::Infinite) {
        throw OsgoodClassError("perturbation criterion needs an Osgood-infinite nonlinearity");
    }
    PerturbationReport r;
    r.threshold = std::sqrt(2.0 * w0);
    const std::vector<double> fallback = default_perturbation_ladder();
    if (t_ladder.empty()) t_ladder = fallback;
    for (double t : t_ladder) {
        if (!(t > 0.0)) throw DomainError("perturbation ladder times must be positive");
        r.samples.push_back({t, eval_fu_log(nl, forcing.log_H(t)) / t});
    }
    // limsup: extrapolate the running maximum of the tail.
    std::vector<double> suffix_max(r.samples.size());
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = r.samples.size(); i-- > 0;) {
        m = std::max(m, r.samples[i].value);
        suffix_max[i] = m;
    }
    try {
        r.limit = aitken_extrapolate(suffix_max).limit;
    } catch (const AccelerationError&) {
        r.limit = suffix_max.back();
        r.verdict = Perturbation::Inconclusive;
        return r;
    }
    if (r.limit <= r.threshold * (1.0 + rel_band)) r.verdict = Perturbation::Preserving;
    else if (r.limit >= r.threshold * (1.0 + 3.0 * rel_band)) r.verdict = Perturbation::NonPreserving;
    else r.verdict = Perturbation::Inconclusive;
    return r;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return "CONSISTENT";
        case Verdict::Inconsistent: return "INCONSISTENT";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

std::string to_string(RateFunctional f) {
    switch (f) {
        case RateFunctional::BlowUpRate: return "BlowUpRate";
        case RateFunctional::GrowthRate: return "GrowthRate";
        case RateFunctional::PerturbationRate: return "PerturbationRate";
    }
    return "?";
}

std::string to_string(Perturbation p) {
    switch (p) {
        case Perturbation::Preserving: return "PRESERVING";
        case Perturbation::NonPreserving: return "NON_PRESERVING";
        case Perturbation::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

}  // namespace vide
