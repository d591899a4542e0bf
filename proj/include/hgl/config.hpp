#pragma once

// JSON grid configuration files.
//
//   {
//     "n": 2, "m": 1,
//     "incidence": [[0, 1]],                       // (from, to) per dc line
//     "ac_grids": [{"J", "D_f", "D_d", "tau_g", "kappa_g", "L_g", "R_g", "b" | "v_r"}],
//     "ilcs":     [{"mu", "L", "R", "C", "G", "C_dc", "G_dc", "tau_dc", "kappa_dc", "i_dc_inj"?}],
//     "dc_lines": [{"L_dc", "R_dc"}],
//     "control":  {"eta": [..], "gamma": [..] | {"certified_factor": f},
//                  "delta_r": [..], "variant": "hac-angle" | "hac-power", "p_r"?: [..]},
//     "references": {"omega_r": [..], "v_dc_r": [..], "mode": "synthesize" | "strict",
//                    "T_r"?: [..], "i_dc_r"?: [..]}
//   }

#include "hgl/controller.hpp"
#include "hgl/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>

namespace hgl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ReferenceMode { Synthesize, Strict };

struct GridConfig {
    GridParameters params;
    ControllerKind control;
    ReferenceMode mode = ReferenceMode::Synthesize;
    /// ||f(x*_s)||_inf under the final references.
    double reference_residual = 0.0;
};

/// Parse and validate. "synthesize" derives T_r and i_dc_r; "strict" requires them
/// and rejects references whose stationary residual exceeds kEquilibriumTolerance.
/// Throws ConfigError naming the offending key.
GridConfig parse_config(const nlohmann::json& doc);
GridConfig parse_config(const std::filesystem::path& path);

/// Effective configuration with explicit references, in strict mode. Parsing the
/// result reproduces the same parameters.
nlohmann::json emit_config(const GridConfig& cfg);

}  // namespace hgl
