#include "vide/export.hpp"

#include <fmt/format.h>

#include <variant>

namespace vide {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string status_summary(const TrajectoryStatus& status) {
    return std::visit(
        overloaded{
            [](const ReachedHorizon& s) { return fmt::format("status=horizon t_end={}", s.t_end); },
            [](const BlowUpDetected& s) {
                return fmt::format("status=blowup T_est={:.12g} T_err={:.3g}", s.T_est, s.T_err);
            },
            [](const Aborted& s) {
                return fmt::format("status=aborted reason={} t={:.12g}", to_string(s.reason), s.t);
            },
        },
        status);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x,dx,step\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double step = i == 0 ? 0.0 : traj.times[i] - traj.times[i - 1];
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.6g}\n", traj.times[i], traj.values[i], traj.derivs[i], step);
    }
    out << fmt::format("# problem={}\n# {}\n", traj.problem, status_summary(traj.status));
}

void write_crossings_csv(std::ostream& out, const Trajectory& traj) {
    out << "index,level,t\n";
    for (const Crossing& c : traj.crossings) out << fmt::format("{},{:.17g},{:.17g}\n", c.index, c.level, c.time);
}

void write_diagnostic_csv(std::ostream& out, const RateDiagnostic& d) {
    out << "t,value\n";
    for (const RateSample& s : d.samples) out << fmt::format("{:.17g},{:.17g}\n", s.t, s.value);
    out << fmt::format("# functional={} limit={:.10g} err={:.3g} target={:.10g} band={} verdict={}\n",
                       to_string(d.functional), d.extrapolated_limit, d.limit_err, d.target, d.rel_band,
                       to_string(d.verdict));
    if (!d.note.empty()) out << "# note=" << d.note << '\n';
}

void write_perturbation_csv(std::ostream& out, const PerturbationReport& r) {
    out << "t,value\n";
    for (const RateSample& s : r.samples) out << fmt::format("{:.17g},{:.17g}\n", s.t, s.value);
    out << fmt::format("# functional=PerturbationRate limit={:.10g} threshold={:.10g} verdict={}\n", r.limit,
                       r.threshold, to_string(r.verdict));
}

void write_plot_script(std::ostream& out, const std::string& title, const std::string& trajectory_csv,
                       const std::string& crossings_csv) {
    out << "# gnuplot script\n"
        << "set datafile separator ','\n"
        << "set datafile commentschars '#'\n"
        << "set key autotitle columnhead\n"
        << fmt::format("set title '{}' noenhanced\n", title) << "set xlabel 't'\nset ylabel 'x(t)'\n"
        << "set logscale y\nset grid\n";
    if (crossings_csv.empty()) {
        out << fmt::format("plot '{}' using 1:2 with lines title 'x(t)'\n", trajectory_csv);
    } else {
        out << fmt::format("plot '{}' using 1:2 with lines title 'x(t)', \\\n     '{}' using 3:2 with points pt 7 "
                           "title 'crossings'\n",
                           trajectory_csv, crossings_csv);
    }
    out << "pause mouse close\n";
}

}  // namespace vide
