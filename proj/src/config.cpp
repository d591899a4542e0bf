#include "hgl/config.hpp"

#include "hgl/certificates.hpp"
#include "hgl/equilibria.hpp"

#include <fstream>
#include <string>

namespace hgl {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(where + ": missing key \"" + key + "\"");
    }
    return obj.at(key);
}

double number(const json& value, const std::string& where) {
    if (!value.is_number()) {
        throw ConfigError(where + ": expected a number");
    }
    return value.get<double>();
}

Vec number_array(const json& value, Index size, const std::string& where) {
    if (!value.is_array()) {
        throw ConfigError(where + ": expected an array of " + std::to_string(size) + " numbers");
    }
    if (static_cast<Index>(value.size()) != size) {
        throw ConfigError(where + ": expected " + std::to_string(size) + " entries, got " +
                          std::to_string(value.size()));
    }
    Vec out(size);
    for (Index k = 0; k < size; ++k) {
        out[k] = number(value[static_cast<std::size_t>(k)], where + "[" + std::to_string(k) + "]");
    }
    return out;
}

Index count(const json& doc, const std::string& key, Index min) {
    const json& v = require(doc, key, "config");
    if (!v.is_number_integer() || v.get<Index>() < min) {
        throw ConfigError("config: \"" + key + "\" must be an integer >= " + std::to_string(min));
    }
    return v.get<Index>();
}

const json& object_array(const json& doc, const std::string& key, Index size) {
    const json& arr = require(doc, key, "config");
    if (!arr.is_array() || static_cast<Index>(arr.size()) != size) {
        throw ConfigError("config: \"" + key + "\" must be an array of " + std::to_string(size) +
                          " objects");
    }
    return arr;
}

// Reads one field from each object of an array into a vector.
struct Collector {
    const json& arr;
    std::string section;

    Vec field(const std::string& key, bool positive, bool optional = false, double fallback = 0.0) const {
        Vec out(static_cast<Index>(arr.size()));
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string where = section + "[" + std::to_string(k) + "]." + key;
            if (optional && !arr[k].contains(key)) {
                out[static_cast<Index>(k)] = fallback;
                continue;
            }
            const double v = number(require(arr[k], key, section + "[" + std::to_string(k) + "]"), where);
            if (positive && !(v > 0.0)) {
                throw ConfigError(where + ": must be strictly positive");
            }
            out[static_cast<Index>(k)] = v;
        }
        return out;
    }
};

}  // namespace

GridConfig parse_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    GridConfig cfg;
    GridParameters& p = cfg.params;
    p.n = count(doc, "n", 1);
    p.m = count(doc, "m", 0);
    const Index n = p.n;
    const Index m = p.m;

    const json& inc = require(doc, "incidence", "config");
    if (!inc.is_array() || static_cast<Index>(inc.size()) != m) {
        throw ConfigError("config: \"incidence\" must list " + std::to_string(m) + " [from, to] pairs");
    }
    std::vector<std::pair<Index, Index>> pairs;
    for (std::size_t k = 0; k < inc.size(); ++k) {
        const std::string where = "incidence[" + std::to_string(k) + "]";
        const json& e = inc[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw ConfigError(where + ": expected [from, to] node indices");
        }
        const auto from = e[0].get<Index>();
        const auto to = e[1].get<Index>();
        if (from < 0 || from >= n || to < 0 || to >= n) {
            throw ConfigError(where + ": node index out of range [0, " + std::to_string(n) + ")");
        }
        if (from == to) {
            throw ConfigError(where + ": self-loop, a dc line needs two distinct nodes");
        }
        pairs.emplace_back(from, to);
    }
    p.B = incidence_from_pairs(n, pairs);

    const Collector ac{object_array(doc, "ac_grids", n), "ac_grids"};
    p.J = ac.field("J", true);
    p.D_f = ac.field("D_f", true);
    p.D_d = ac.field("D_d", true);
    p.tau_g = ac.field("tau_g", true);
    p.kappa_g = ac.field("kappa_g", true);
    p.L_g = ac.field("L_g", true);
    p.R_g = ac.field("R_g", true);

    const Collector ilc{object_array(doc, "ilcs", n), "ilcs"};
    p.mu = ilc.field("mu", false);
    for (Index j = 0; j < n; ++j) {
        if (!(p.mu[j] > 0.0) || p.mu[j] > 0.5) {
            throw ConfigError("ilcs[" + std::to_string(j) + "].mu: mu must lie in (0, 0.5]");
        }
    }
    p.L = ilc.field("L", true);
    p.R = ilc.field("R", true);
    p.C = ilc.field("C", true);
    p.G = ilc.field("G", true);
    p.C_dc = ilc.field("C_dc", true);
    p.G_dc = ilc.field("G_dc", true);
    p.tau_dc = ilc.field("tau_dc", true);
    p.kappa_dc = ilc.field("kappa_dc", true);
    p.i_dc_inj = ilc.field("i_dc_inj", false, /*optional=*/true);

    const Collector lines{object_array(doc, "dc_lines", m), "dc_lines"};
    p.L_dc = lines.field("L_dc", true);
    p.R_dc = lines.field("R_dc", true);

    const json& refs = require(doc, "references", "config");
    p.omega_r = number_array(require(refs, "omega_r", "references"), n, "references.omega_r");
    for (Index j = 0; j < n; ++j) {
        if (!(p.omega_r[j] > 0.0)) {
            throw ConfigError("references.omega_r[" + std::to_string(j) + "]: must be strictly positive");
        }
    }
    p.v_dc_r = number_array(require(refs, "v_dc_r", "references"), n, "references.v_dc_r");
    const std::string mode = refs.value("mode", std::string("synthesize"));
    if (mode == "synthesize") {
        cfg.mode = ReferenceMode::Synthesize;
    } else if (mode == "strict") {
        cfg.mode = ReferenceMode::Strict;
    } else {
        throw ConfigError("references.mode: must be \"synthesize\" or \"strict\"");
    }

    // COI voltage constant, given directly or as a magnitude at the nominal frequency
    p.b.resize(n);
    for (Index j = 0; j < n; ++j) {
        const json& g = ac.arr[static_cast<std::size_t>(j)];
        const std::string where = "ac_grids[" + std::to_string(j) + "]";
        if (g.contains("b")) {
            p.b[j] = number(g.at("b"), where + ".b");
        } else if (g.contains("v_r")) {
            p.b[j] = number(g.at("v_r"), where + ".v_r") / p.omega_r[j];
        } else {
            throw ConfigError(where + ": missing key \"b\" (or \"v_r\")");
        }
        if (p.b[j] < 0.0) {
            throw ConfigError(where + ".b: must be non-negative");
        }
    }

    const json& ctl = require(doc, "control", "config");
    p.eta = number_array(require(ctl, "eta", "control"), n, "control.eta");
    for (Index j = 0; j < n; ++j) {
        if (!(p.eta[j] > 0.0)) {
            throw ConfigError("control.eta[" + std::to_string(j) + "]: must be strictly positive");
        }
    }
    p.delta_r = number_array(require(ctl, "delta_r", "control"), n, "control.delta_r");
    for (Index j = 0; j < n; ++j) {
        if (p.delta_r[j] < -kTwoPi || p.delta_r[j] >= kTwoPi) {
            throw ConfigError("control.delta_r[" + std::to_string(j) + "]: must lie in [-2pi, 2pi)");
        }
    }
    const json& gamma = require(ctl, "gamma", "control");
    double certified_factor = 0.0;
    if (gamma.is_object()) {
        certified_factor = number(require(gamma, "certified_factor", "control.gamma"),
                                  "control.gamma.certified_factor");
        if (!(certified_factor > 0.0)) {
            throw ConfigError("control.gamma.certified_factor: must be strictly positive");
        }
        p.gamma = Vec::Zero(n);
    } else {
        p.gamma = number_array(gamma, n, "control.gamma");
        for (Index j = 0; j < n; ++j) {
            if (p.gamma[j] < 0.0) {
                throw ConfigError("control.gamma[" + std::to_string(j) + "]: must be non-negative");
            }
        }
    }
    const std::string variant = ctl.value("variant", std::string("hac-angle"));
    if (variant == "hac-angle") {
        cfg.control = ControllerKind::angle();
    } else if (variant == "hac-power") {
        cfg.control = ControllerKind::power(
            number_array(require(ctl, "p_r", "control"), n, "control.p_r"));
    } else {
        throw ConfigError("control.variant: must be \"hac-angle\" or \"hac-power\"");
    }

    if (cfg.mode == ReferenceMode::Strict) {
        p.T_r = number_array(require(refs, "T_r", "references"), n, "references.T_r");
        p.i_dc_r = number_array(require(refs, "i_dc_r", "references"), n, "references.i_dc_r");
    } else {
        p.T_r = Vec::Zero(n);
        p.i_dc_r = Vec::Zero(n);
    }

    try {
        p.validate();
        if (cfg.mode == ReferenceMode::Synthesize) {
            p = synthesize_references(p);
        }
        if (certified_factor > 0.0) {
            p = with_certified_gamma(p, certified_factor);
        }
        cfg.reference_residual = equilibrium_residual(solve_stationary(p), p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const SolverError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.mode == ReferenceMode::Strict && !(cfg.reference_residual <= kEquilibriumTolerance)) {
        throw ConfigError("references: T_r/i_dc_r leave a stationary residual of " +
                          std::to_string(cfg.reference_residual) + " (limit 1e-9)");
    }
    return cfg;
}

GridConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": invalid JSON: " + e.what());
    }
    return parse_config(doc);
}

namespace {

json to_array(const Vec& v) {
    json arr = json::array();
    for (Index k = 0; k < v.size(); ++k) {
        arr.push_back(v[k]);
    }
    return arr;
}

}  // namespace

json emit_config(const GridConfig& cfg) {
    const GridParameters& p = cfg.params;
    json doc;
    doc["n"] = p.n;
    doc["m"] = p.m;
    json inc = json::array();
    for (Index k = 0; k < p.m; ++k) {
        Index from = -1, to = -1;
        for (Index j = 0; j < p.n; ++j) {
            if (p.B(j, k) < 0.0) from = j;
            if (p.B(j, k) > 0.0) to = j;
        }
        inc.push_back({from, to});
    }
    doc["incidence"] = inc;

    json ac = json::array();
    json ilcs = json::array();
    for (Index j = 0; j < p.n; ++j) {
        ac.push_back({{"J", p.J[j]},         {"D_f", p.D_f[j]},         {"D_d", p.D_d[j]},
                      {"tau_g", p.tau_g[j]}, {"kappa_g", p.kappa_g[j]}, {"L_g", p.L_g[j]},
                      {"R_g", p.R_g[j]},     {"b", p.b[j]}});
        ilcs.push_back({{"mu", p.mu[j]},
                        {"L", p.L[j]},
                        {"R", p.R[j]},
                        {"C", p.C[j]},
                        {"G", p.G[j]},
                        {"C_dc", p.C_dc[j]},
                        {"G_dc", p.G_dc[j]},
                        {"tau_dc", p.tau_dc[j]},
                        {"kappa_dc", p.kappa_dc[j]},
                        {"i_dc_inj", p.i_dc_inj[j]}});
    }
    doc["ac_grids"] = ac;
    doc["ilcs"] = ilcs;
    json lines = json::array();
    for (Index k = 0; k < p.m; ++k) {
        lines.push_back({{"L_dc", p.L_dc[k]}, {"R_dc", p.R_dc[k]}});
    }
    doc["dc_lines"] = lines;

    json ctl = {{"eta", to_array(p.eta)}, {"gamma", to_array(p.gamma)}, {"delta_r", to_array(p.delta_r)}};
    if (cfg.control.variant == ControllerKind::Variant::HacPower) {
        ctl["variant"] = "hac-power";
        ctl["p_r"] = to_array(cfg.control.p_r);
    } else {
        ctl["variant"] = "hac-angle";
    }
    doc["control"] = ctl;
    doc["references"] = {{"omega_r", to_array(p.omega_r)},
                         {"v_dc_r", to_array(p.v_dc_r)},
                         {"mode", "strict"},
                         {"T_r", to_array(p.T_r)},
                         {"i_dc_r", to_array(p.i_dc_r)}};
    return doc;
}

}  // namespace hgl
