#pragma once

#include "vide/forcing.hpp"
#include "vide/kernel.hpp"
#include "vide/nonlinearity.hpp"

#include <map>
#include <string>
#include <string_view>

namespace vide {

/// "name:key=value,key=value".  Values are numbers; key order is not significant.
struct CatalogId {
    std::string name;
    std::map<std::string, double> params;

    bool operator==(const CatalogId&) const = default;
};

CatalogId parse_id(std::string_view text);
/// Canonical text form; numbers use the shortest round-trip representation.
std::string format_id(const CatalogId& id);

/// power_plus_one:beta=B | log_linear | pure_power:p=P | linear:c=C
Nonlinearity make_nonlinearity(std::string_view id);
/// power_decay:omega=W,alpha=A | stretched_exp:omega=W,gamma=G | inverse_gamma:omega=W |
/// t_exp_decay:omega=W | box:omega=W,support=S
Kernel make_kernel(std::string_view id);
/// zero | power_growth:alpha=A | rate_scale:K=K (needs the nonlinearity it rescales)
Forcing make_forcing(std::string_view id, const Nonlinearity& nl);

}  // namespace vide
