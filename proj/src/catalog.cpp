#include "vide/catalog.hpp"

#include "vide/errors.hpp"

#include <fmt/core.h>

#include <charconv>
#include <cmath>
#include <set>

namespace vide {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view context) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", context, text));
    }
    return value;
}

// Reads the allowed keys with defaults; rejects unknown keys.
class Params {
public:
    explicit Params(const CatalogId& id) : id_(id) {}

    double get(const std::string& key, double fallback) {
        seen_.insert(key);
        const auto it = id_.params.find(key);
        return it == id_.params.end() ? fallback : it->second;
    }

    void finish() const {
        for (const auto& [key, value] : id_.params) {
            if (!seen_.contains(key)) {
                throw ConfigError(fmt::format("{}: unknown parameter '{}'", id_.name, key));
            }
        }
    }

private:
    const CatalogId& id_;
    std::set<std::string> seen_;
};

}  // namespace

CatalogId parse_id(std::string_view text) {
    text = trim(text);
    CatalogId id;
    const auto colon = text.find(':');
    id.name = std::string(trim(text.substr(0, colon)));
    if (id.name.empty()) throw ConfigError(fmt::format("empty catalog id '{}'", text));
    if (colon == std::string_view::npos) return id;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("{}: parameter '{}' lacks '='", id.name, item));
        }
        const std::string key(trim(item.substr(0, eq)));
        if (!id.params.emplace(key, parse_number(item.substr(eq + 1), id.name)).second) {
            throw ConfigError(fmt::format("{}: parameter '{}' given twice", id.name, key));
        }
    }
    return id;
}

std::string format_id(const CatalogId& id) {
    std::string out = id.name;
    char sep = ':';
    for (const auto& [key, value] : id.params) {
        out += fmt::format("{}{}={}", sep, key, value);
        sep = ',';
    }
    return out;
}

Nonlinearity make_nonlinearity(std::string_view text) {
    const CatalogId id = parse_id(text);
    Params p(id);
    if (id.name == "power_plus_one") {
        const double beta = p.get("beta", 2.0);
        p.finish();
        return Nonlinearity::power_plus_one(beta);
    }
    if (id.name == "log_linear") {
        p.finish();
        return Nonlinearity::log_linear();
    }
    if (id.name == "pure_power") {
        const double exponent = p.get("p", 2.0);
        p.finish();
        return Nonlinearity::pure_power(exponent);
    }
    if (id.name == "linear") {
        const double c = p.get("c", 1.0);
        p.finish();
        if (!(c > 0.0)) throw ConfigError("linear: c must be > 0");
        CustomNonlinearity lin;
        lin.name = format_id(id);
        lin.f = [c](double x) { return c * x; };
        lin.log_f_of_log = [c](double s) { return std::log(c) + s; };
        lin.primitive = [c](double x) { return 0.5 * c * x * x; };
        lin.log_primitive_of_log = [c](double s) { return std::log(0.5 * c) + 2.0 * s; };
        lin.increasing = true;
        lin.superlinear = false;
        return Nonlinearity::custom(std::move(lin));
    }
    throw ConfigError(fmt::format("unknown nonlinearity '{}'", id.name));
}

Kernel make_kernel(std::string_view text) {
    const CatalogId id = parse_id(text);
    Params p(id);
    Kernel k = [&]() {
        if (id.name == "power_decay") {
            const double omega = p.get("omega", 1.0);
            return Kernel::power_decay(omega, p.get("alpha", 0.0));
        }
        if (id.name == "stretched_exp") {
            const double omega = p.get("omega", 1.0);
            return Kernel::stretched_exp(omega, p.get("gamma", 1.0));
        }
        if (id.name == "inverse_gamma") return Kernel::inverse_gamma(p.get("omega", 1.0));
        if (id.name == "t_exp_decay") return Kernel::t_exp_decay(p.get("omega", 1.0));
        if (id.name == "box") {
            const double omega = p.get("omega", 1.0);
            return Kernel::box(omega, p.get("support", 1.0));
        }
        throw ConfigError(fmt::format("unknown kernel '{}'", id.name));
    }();
    p.finish();
    return k;
}

Forcing make_forcing(std::string_view text, const Nonlinearity& nl) {
    const CatalogId id = parse_id(text);
    Params p(id);
    if (id.name == "zero") {
        p.finish();
        return Forcing::zero();
    }
    if (id.name == "power_growth") {
        const double alpha = p.get("alpha", 1.0);
        p.finish();
        return Forcing::power_growth(alpha);
    }
    if (id.name == "rate_scale") {
        const double K = p.get("K", 1.0);
        p.finish();
        return Forcing::rate_scale(K, nl);
    }
    throw ConfigError(fmt::format("unknown forcing '{}'", id.name));
}

}  // namespace vide
