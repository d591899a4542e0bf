#pragma once

// Hybrid angle control (HAC): converter frequency from dc-voltage error and the
// half-angle sine of the relative ILC-COI angle, plus its power-based variant.

#include "hgl/grid.hpp"

#include <vector>

namespace hgl {

struct ControllerKind {
    enum class Variant { HacAngle, HacPower };

    Variant variant = Variant::HacAngle;
    /// Active-power references, only used by HacPower.
    Vec p_r;

    static ControllerKind angle() { return {}; }
    static ControllerKind power(Vec p_r) { return {Variant::HacPower, std::move(p_r)}; }

    /// Throws std::invalid_argument if p_r is missing or non-finite for HacPower.
    void validate(Index n) const;
};

/// omega_c = omega_r + eta (v_dc - v_dc_r) - gamma sin((delta - delta_r) / 2),
/// with delta - delta_r taken on the wrapped interval.
Vec hac_frequency(const Vec& delta, const Vec& v_dc, const GridParameters& p);

struct PowerFrequency {
    Vec omega_c;
    /// Units with |p_j - p_r,j| > 2pi; the sine is still evaluated.
    std::vector<Index> out_of_domain;
};

/// omega_c = omega_r + eta (v_dc - v_dc_r) - gamma sin((p - p_r) / 2). No wrapping.
PowerFrequency hac_power_frequency(const Vec& pflow, const Vec& v_dc, const GridParameters& p,
                                   const Vec& p_r);

/// Per-converter active power v_j^T i_g,j at the filter-capacitor node.
Vec active_power(const Vec& v, const Vec& i_g);

}  // namespace hgl
