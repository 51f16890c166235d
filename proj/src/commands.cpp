#include "vide/commands.hpp"

#include "vide/catalog.hpp"
#include "vide/errors.hpp"
#include "vide/export.hpp"
#include "vide/osgood.hpp"
#include "vide/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

namespace vide {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

std::string file_stem(const Scenario& s) {
    std::string stem = s.name;
    for (char& c : stem) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        if (!ok) c = '_';
    }
    return stem.empty() ? "scenario" : stem;
}

RateDiagnostic failed_diagnostic(RateFunctional functional, double target, double band, std::string note) {
    RateDiagnostic d;
    d.functional = functional;
    d.target = target;
    d.rel_band = band;
    d.verdict = Verdict::Inconclusive;
    d.note = std::move(note);
    return d;
}

std::string describe(const RateDiagnostic& d) {
    if (d.samples.empty()) {
        return fmt::format("{} target={:.6g} {} ({})", to_string(d.functional), d.target, to_string(d.verdict), d.note);
    }
    return fmt::format("{} limit≈{:.6g} err={:.2g} target={:.6g} {}", to_string(d.functional),
                       d.extrapolated_limit, d.limit_err, d.target, to_string(d.verdict));
}

}  // namespace

std::set<Diagnostic> applicable_diagnostics(const Scenario& s, OsgoodClass osgood) {
    if (!s.diagnostics.empty()) return s.diagnostics;
    std::set<Diagnostic> out;
    if (osgood == OsgoodClass::Finite) out.insert(Diagnostic::BlowUpRate);
    if (osgood == OsgoodClass::Infinite) {
        if (l1_norm(make_kernel(s.kernel_id)).is_finite()) out.insert(Diagnostic::GrowthRate);
        if (s.forcing_id != "zero") out.insert(Diagnostic::Perturbation);
    }
    return out;
}

ScenarioRun run_scenario(const Scenario& s) {
    const Nonlinearity nl = make_nonlinearity(s.nonlinearity_id);
    const Kernel w = make_kernel(s.kernel_id);
    const Forcing forcing = make_forcing(s.forcing_id, nl);
    ScenarioRun run;
    run.osgood = nl.osgood_class();
    const SolverConfig config = solver_config(s, run.osgood == OsgoodClass::Infinite);
    run.trajectory = solve(w, nl, forcing, s.x0, config);
    const double w0 = w.at_zero();
    const double target = std::sqrt(2.0 * w0);

    for (Diagnostic d : applicable_diagnostics(s, run.osgood)) {
        try {
            switch (d) {
                case Diagnostic::BlowUpRate:
                    if (!run.trajectory.blew_up()) {
                        run.diagnostics.push_back(failed_diagnostic(RateFunctional::BlowUpRate, target, s.rel_band,
                                                                    "run did not blow up"));
                    } else {
                        run.diagnostics.push_back(blowup_rate_diagnostic(run.trajectory, nl, w0, s.rel_band));
                    }
                    break;
                case Diagnostic::GrowthRate:
                    if (!run.trajectory.reached_horizon()) {
                        run.diagnostics.push_back(failed_diagnostic(RateFunctional::GrowthRate, target, s.rel_band,
                                                                    "run did not reach its horizon"));
                    } else {
                        run.diagnostics.push_back(growth_rate_diagnostic(run.trajectory, nl, w0, s.rel_band));
                    }
                    break;
                case Diagnostic::Perturbation:
                    if (forcing.is_zero()) {
                        run.notes.push_back("perturbation: zero forcing is trivially preserving");
                        PerturbationReport r;
                        r.verdict = Perturbation::Preserving;
                        r.threshold = target;
                        run.perturbation = r;
                    } else {
                        run.perturbation = perturbation_criterion(forcing, nl, w0, {}, s.rel_band);
                    }
                    break;
            }
        } catch (const std::exception& e) {
            const RateFunctional f = d == Diagnostic::BlowUpRate   ? RateFunctional::BlowUpRate
                                     : d == Diagnostic::GrowthRate ? RateFunctional::GrowthRate
                                                                   : RateFunctional::PerturbationRate;
            if (d == Diagnostic::Perturbation) {
                run.perturbation = PerturbationReport{};
                run.perturbation->threshold = target;
                run.notes.push_back(fmt::format("perturbation: {}", e.what()));
            } else {
                run.diagnostics.push_back(failed_diagnostic(f, target, s.rel_band, e.what()));
            }
        }
    }
    return run;
}

int exit_code(const ScenarioRun& run) {
    if (run.trajectory.aborted()) return kExitAborted;
    for (const RateDiagnostic& d : run.diagnostics) {
        if (d.verdict != Verdict::Consistent) return kExitUndecided;
    }
    if (run.perturbation && run.perturbation->verdict == Perturbation::Inconclusive) return kExitUndecided;
    return kExitOk;
}

int cmd_classify(const Scenario& s, std::ostream& out) {
    const Nonlinearity nl = make_nonlinearity(s.nonlinearity_id);
    const std::vector<double> ladder = default_cutoff_ladder();
    const OsgoodVerdict v = classify_osgood(nl, 1.0, ladder);
    out << fmt::format("nonlinearity {}\n", nl.id());
    out << fmt::format("{:>10}  {:>22}\n", "K", "int_1^K du/sqrt(Fbar)");
    for (const auto& [K, I] : v.partial_integral_at_cutoffs) out << fmt::format("{:>10.3g}  {:>22.15g}\n", K, I);
    if (v.extrapolated_tail) out << fmt::format("extrapolated tail {:.6g}\n", *v.extrapolated_tail);
    out << fmt::format("decade ratio {:.6g}, fitted power {:.6g}\n", v.fitted_ratio, v.fitted_power);
    switch (v.classification) {
        case OsgoodClass::Finite: out << "FINITE → blow-up predicted\n"; break;
        case OsgoodClass::Infinite: out << "INFINITE → global solution predicted\n"; break;
        case OsgoodClass::Undecided: out << "UNDECIDED → ladder test inconclusive\n"; break;
    }
    if (nl.is_increasing()) {
        const bool agree = check_osgood_equivalence(nl, ladder);
        const OsgoodVerdict alt = classify_osgood_alternative(nl, ladder);
        out << fmt::format("equivalence: int dx/sqrt(x f(x)) is {}; criteria {}\n", to_string(alt.classification),
                           agree ? "agree" : "DISAGREE");
        if (!agree) return kExitUndecided;
    } else {
        out << "equivalence: skipped (f not increasing)\n";
    }
    return v.classification == OsgoodClass::Undecided ? kExitUndecided : kExitOk;
}

int cmd_solve(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& out) {
    const Nonlinearity nl = make_nonlinearity(s.nonlinearity_id);
    const Kernel w = make_kernel(s.kernel_id);
    const Forcing forcing = make_forcing(s.forcing_id, nl);
    const SolverConfig config = solver_config(s, nl.osgood_class() == OsgoodClass::Infinite);
    const Trajectory traj = solve(w, nl, forcing, s.x0, config);

    const std::string stem = file_stem(s);
    const std::string csv = stem + "_trajectory.csv";
    std::string crossings;
    {
        std::ofstream f = open_output(out_dir / csv);
        write_trajectory_csv(f, traj);
    }
    if (traj.blew_up()) {
        crossings = stem + "_crossings.csv";
        std::ofstream f = open_output(out_dir / crossings);
        write_crossings_csv(f, traj);
    }
    {
        std::ofstream f = open_output(out_dir / (stem + ".gp"));
        write_plot_script(f, traj.problem, csv, crossings);
    }
    out << fmt::format("{}: {} nodes, {}\n", s.name, traj.size(), status_summary(traj.status));
    if (traj.size() > 0) out << fmt::format("final t={:.12g} x={:.12g}\n", traj.times.back(), traj.values.back());
    out << fmt::format("wrote {}\n", (out_dir / csv).string());
    return traj.aborted() ? kExitAborted : kExitOk;
}

int cmd_rates(const Scenario& s, const std::optional<std::filesystem::path>& out_dir, std::ostream& out) {
    const ScenarioRun run = run_scenario(s);
    out << fmt::format("{}: {}\n", s.name, status_summary(run.trajectory.status));
    if (run.diagnostics.empty() && !run.perturbation) out << "no applicable diagnostic\n";
    for (const RateDiagnostic& d : run.diagnostics) {
        out << describe(d) << '\n';
        if (!d.note.empty() && !d.samples.empty()) out << "  note: " << d.note << '\n';
        if (out_dir) {
            std::ofstream f = open_output(*out_dir / fmt::format("{}_{}.csv", file_stem(s), to_string(d.functional)));
            write_diagnostic_csv(f, d);
        }
    }
    if (run.perturbation) {
        const PerturbationReport& r = *run.perturbation;
        out << fmt::format("Perturbation limsup≈{:.6g} threshold={:.6g} {}\n", r.limit, r.threshold,
                           to_string(r.verdict));
        if (out_dir) {
            std::ofstream f = open_output(*out_dir / fmt::format("{}_PerturbationRate.csv", file_stem(s)));
            write_perturbation_csv(f, r);
        }
    }
    for (const std::string& n : run.notes) out << "note: " << n << '\n';
    return exit_code(run);
}

GridAxis parse_grid_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("grid '{}' is not key=v1,v2,..", text));
    GridAxis axis{text.substr(0, eq), {}};
    std::string_view rest = std::string_view(text).substr(eq + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ConfigError(fmt::format("grid value '{}' is not a number", item));
        }
        axis.values.push_back(v);
    }
    (void)canonical_grid_key(axis.key);
    return axis;
}

std::vector<Scenario> sweep_cells(const Scenario& s, const std::vector<GridAxis>& axes) {
    if (axes.empty()) return {};
    Scenario base = s;
    base.grid.clear();
    std::vector<Scenario> cells{base};
    for (const GridAxis& axis : axes) {
        std::vector<Scenario> next;
        for (const Scenario& c : cells) {
            for (double v : axis.values) {
                Scenario cell = with_parameter(c, axis.key, v);
                cell.name = fmt::format("{}_{}={}", c.name, axis.key, v);
                next.push_back(std::move(cell));
            }
        }
        cells = std::move(next);
    }
    return cells;
}

int cmd_sweep(const Scenario& s, const SweepOptions& options, std::ostream& out) {
    std::vector<GridAxis> axes = s.grid;
    axes.insert(axes.end(), options.extra_grid.begin(), options.extra_grid.end());
    const std::vector<Scenario> cells = sweep_cells(s, axes);

    std::vector<std::string> rows(cells.size());
    std::vector<char> failed(cells.size(), 0);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Scenario& cell = cells[i];
            std::string params;
            for (const GridAxis& a : axes) {
                const std::string key = canonical_grid_key(a.key);
                const auto dot = key.find('.');
                const std::string group = key.substr(0, dot);
                const std::string& id = group == "kernel"         ? cell.kernel_id
                                        : group == "nonlinearity" ? cell.nonlinearity_id
                                                                  : cell.forcing_id;
                params += fmt::format(",{}", parse_id(id).params.at(key.substr(dot + 1)));
            }
            try {
                const ScenarioRun run = run_scenario(cell);
                std::string blowup = ",";
                if (const auto* b = std::get_if<BlowUpDetected>(&run.trajectory.status)) {
                    blowup = fmt::format("{:.12g},{:.3g}", b->T_est, b->T_err);
                }
                std::string diag = ",,,,";
                if (!run.diagnostics.empty()) {
                    const RateDiagnostic& d = run.diagnostics.front();
                    diag = fmt::format("{},{:.10g},{:.3g},{:.10g},{}", to_string(d.functional), d.extrapolated_limit,
                                       d.limit_err, d.target, to_string(d.verdict));
                }
                const std::string pert = run.perturbation ? to_string(run.perturbation->verdict) : "";
                rows[i] = fmt::format("{}{},{},{},{},{},", i, params, status_name(run.trajectory.status), blowup,
                                      diag, pert);
            } catch (const std::exception& e) {
                failed[i] = 1;
                std::string what = e.what();
                for (char& c : what) {
                    if (c == ',' || c == '\n') c = ';';
                }
                rows[i] = fmt::format("{}{},error,,,,,,,,,{}", i, params, what);
            }
            std::lock_guard lock(log_mutex);
            out << fmt::format("cell {}: {}\n", i, cells[i].name);
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(cells.size())));
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
    pool.clear();

    const std::filesystem::path summary = options.out_dir / (file_stem(s) + "_sweep.csv");
    std::ofstream f = open_output(summary);
    f << "cell";
    for (const GridAxis& a : axes) f << ',' << canonical_grid_key(a.key);
    f << ",status,T_est,T_err,diagnostic,limit,err,target,verdict,perturbation,error\n";
    for (const std::string& row : rows) f << row << '\n';

    if (options.emit_configs) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            save_scenario(cells[i], options.out_dir / fmt::format("{}_cell{}.ini", file_stem(s), i));
        }
    }
    out << fmt::format("wrote {} ({} cells)\n", summary.string(), cells.size());
    const bool all_failed = !cells.empty() && std::all_of(failed.begin(), failed.end(), [](char c) { return c; });
    return all_failed ? kExitAborted : kExitOk;
}

}  // namespace vide
