#include "vide/scenario.hpp"

#include "vide/catalog.hpp"
#include "vide/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vide {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_number(const std::string& raw, const std::string& key) {
    const std::string text = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    }
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

using OverrideField = std::optional<double> SolverOverrides::*;
const std::map<std::string, OverrideField>& solver_fields() {
    static const std::map<std::string, OverrideField> fields{
        {"initial_step", &SolverOverrides::initial_step},
        {"min_step", &SolverOverrides::min_step},
        {"max_step", &SolverOverrides::max_step},
        {"rel_tol", &SolverOverrides::rel_tol},
        {"blowup_threshold", &SolverOverrides::blowup_threshold},
        {"geometric_ratio", &SolverOverrides::geometric_ratio},
        {"t_end", &SolverOverrides::t_end},
        {"max_steps", &SolverOverrides::max_steps},
    };
    return fields;
}

void check_keys(const pt::ptree& section, const std::string& name, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : section) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(fmt::format("[{}]: unknown key '{}'", name, key));
    }
}

void check_resolves(const Scenario& s) {
    if (!(s.x0 > 0.0)) throw ConfigError(fmt::format("x0 = {} must be positive", s.x0));
    if (!(s.rel_band > 0.0)) throw ConfigError("rel_band must be positive");
    const Nonlinearity nl = make_nonlinearity(s.nonlinearity_id);
    const Kernel w = make_kernel(s.kernel_id);
    try {
        (void)make_forcing(s.forcing_id, nl);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(fmt::format("forcing '{}': {}", s.forcing_id, e.what()));
    }
    if (s.diagnostics.contains(Diagnostic::GrowthRate) && !l1_norm(w).is_finite()) {
        throw ConfigError(fmt::format("growth_rate diagnostic needs an integrable kernel; {} is not", w.id()));
    }
    for (const GridAxis& axis : s.grid) (void)canonical_grid_key(axis.key);
    (void)solver_config(s, false);
}

// The INI reader silently drops sections without keys; check the headers directly.
void check_section_names(const std::string& text) {
    static const std::set<std::string> known{"scenario", "kernel", "nonlinearity", "forcing", "solver", "sweep"};
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (line.size() < 2 || line.front() != '[' || line.back() != ']') continue;
        const std::string name = trim(line.substr(1, line.size() - 2));
        if (!known.contains(name)) throw ConfigError(fmt::format("unknown section [{}]", name));
    }
}

}  // namespace

std::string to_string(Diagnostic d) {
    switch (d) {
        case Diagnostic::BlowUpRate: return "blowup_rate";
        case Diagnostic::GrowthRate: return "growth_rate";
        case Diagnostic::Perturbation: return "perturbation";
    }
    return "?";
}

Diagnostic parse_diagnostic(std::string_view name) {
    if (name == "blowup_rate") return Diagnostic::BlowUpRate;
    if (name == "growth_rate") return Diagnostic::GrowthRate;
    if (name == "perturbation") return Diagnostic::Perturbation;
    throw ConfigError(fmt::format("unknown diagnostic '{}'", name));
}

Scenario parse_scenario(const std::string& text) {
    check_section_names(text);
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("scenario syntax: {}", e.what()));
    }
    Scenario s;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(fmt::format("key '{}' outside a section", section));
        }
        if (section == "scenario") {
            check_keys(body, section, {"name", "x0", "rel_band", "diagnostics"});
            s.name = trim(body.get<std::string>("name", s.name));
            if (auto v = body.get_optional<std::string>("x0")) s.x0 = to_number(*v, "x0");
            if (auto v = body.get_optional<std::string>("rel_band")) s.rel_band = to_number(*v, "rel_band");
            if (auto v = body.get_optional<std::string>("diagnostics")) {
                for (const std::string& d : split_list(*v)) s.diagnostics.insert(parse_diagnostic(d));
            }
        } else if (section == "kernel" || section == "nonlinearity" || section == "forcing") {
            check_keys(body, section, {"id"});
            const std::string id = trim(body.get<std::string>("id", ""));
            if (id.empty()) throw ConfigError(fmt::format("[{}]: missing id", section));
            (section == "kernel" ? s.kernel_id : section == "nonlinearity" ? s.nonlinearity_id : s.forcing_id) = id;
        } else if (section == "solver") {
            for (const auto& [key, value] : body) {
                const auto it = solver_fields().find(key);
                if (it == solver_fields().end()) throw ConfigError(fmt::format("[solver]: unknown key '{}'", key));
                s.solver.*(it->second) = to_number(value.data(), key);
            }
        } else if (section == "sweep") {
            for (const auto& [key, value] : body) {
                GridAxis axis{key, {}};
                for (const std::string& item : split_list(value.data())) axis.values.push_back(to_number(item, key));
                s.grid.push_back(std::move(axis));
            }
        } else {
            throw ConfigError(fmt::format("unknown section [{}]", section));
        }
    }
    check_resolves(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read scenario '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string format_scenario(const Scenario& s) {
    std::string out = fmt::format("[scenario]\nname = {}\nx0 = {}\nrel_band = {}\n", s.name, s.x0, s.rel_band);
    if (!s.diagnostics.empty()) {
        std::string list;
        for (Diagnostic d : s.diagnostics) list += (list.empty() ? "" : ", ") + to_string(d);
        out += fmt::format("diagnostics = {}\n", list);
    }
    out += fmt::format("\n[kernel]\nid = {}\n\n[nonlinearity]\nid = {}\n\n[forcing]\nid = {}\n", s.kernel_id,
                       s.nonlinearity_id, s.forcing_id);
    std::string solver;
    for (const auto& [key, field] : solver_fields()) {
        if (const auto& v = s.solver.*field) solver += fmt::format("{} = {}\n", key, *v);
    }
    if (!solver.empty()) out += "\n[solver]\n" + solver;
    if (!s.grid.empty()) {
        out += "\n[sweep]\n";
        for (const GridAxis& axis : s.grid) {
            std::string values;
            for (double v : axis.values) values += fmt::format("{}{}", values.empty() ? "" : ", ", v);
            out += fmt::format("{} = {}\n", axis.key, values);
        }
    }
    return out;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write scenario '{}'", path.string()));
    out << format_scenario(s);
}

std::string canonical_grid_key(const std::string& key) {
    static const std::map<std::string, std::string> aliases{
        {"beta", "nonlinearity.beta"}, {"omega", "kernel.omega"}, {"gamma", "kernel.gamma"},
        {"K", "forcing.K"},
    };
    if (const auto it = aliases.find(key); it != aliases.end()) return it->second;
    const auto dot = key.find('.');
    const std::string group = key.substr(0, dot);
    if (dot == std::string::npos || dot + 1 == key.size() ||
        (group != "nonlinearity" && group != "kernel" && group != "forcing")) {
        throw ConfigError(fmt::format("grid key '{}' is not <nonlinearity|kernel|forcing>.<param>", key));
    }
    return key;
}

Scenario with_parameter(const Scenario& s, const std::string& key, double value) {
    const std::string full = canonical_grid_key(key);
    const auto dot = full.find('.');
    const std::string group = full.substr(0, dot);
    const std::string param = full.substr(dot + 1);
    Scenario out = s;
    std::string& id = group == "kernel" ? out.kernel_id : group == "nonlinearity" ? out.nonlinearity_id : out.forcing_id;
    CatalogId parsed = parse_id(id);
    parsed.params[param] = value;
    id = format_id(parsed);
    return out;
}

SolverConfig solver_config(const Scenario& s, bool osgood_infinite) {
    SolverConfig c;
    if (osgood_infinite) c.blowup_threshold = kGlobalRunThreshold;
    const SolverOverrides& o = s.solver;
    if (o.initial_step) c.initial_step = *o.initial_step;
    if (o.min_step) c.min_step = *o.min_step;
    if (o.max_step) c.max_step = *o.max_step;
    if (o.rel_tol) c.rel_tol = *o.rel_tol;
    if (o.blowup_threshold) c.blowup_threshold = *o.blowup_threshold;
    if (o.geometric_ratio) c.geometric_ratio = *o.geometric_ratio;
    if (o.t_end) c.t_end = *o.t_end;
    if (o.max_steps) c.max_steps = static_cast<std::size_t>(*o.max_steps);
    validate(c);
    return c;
}

}  // namespace vide
