#include "hgl/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace hgl {

void ControllerKind::validate(Index n) const {
    if (variant != Variant::HacPower) {
        return;
    }
    if (p_r.size() != n) {
        throw std::invalid_argument("ControllerKind: p_r must have one entry per converter");
    }
    if (!p_r.allFinite()) {
        throw std::invalid_argument("ControllerKind: p_r must be finite");
    }
}

Vec hac_frequency(const Vec& delta, const Vec& v_dc, const GridParameters& p) {
    Vec omega_c(p.n);
    for (Index j = 0; j < p.n; ++j) {
        const double half = 0.5 * angle_difference(delta[j], p.delta_r[j]);
        omega_c[j] = p.omega_r[j] + p.eta[j] * (v_dc[j] - p.v_dc_r[j]) - p.gamma[j] * std::sin(half);
    }
    return omega_c;
}

PowerFrequency hac_power_frequency(const Vec& pflow, const Vec& v_dc, const GridParameters& p,
                                   const Vec& p_r) {
    PowerFrequency out;
    out.omega_c.resize(p.n);
    for (Index j = 0; j < p.n; ++j) {
        const double err = pflow[j] - p_r[j];
        if (std::abs(err) > kTwoPi) {
            out.out_of_domain.push_back(j);
        }
        out.omega_c[j] =
            p.omega_r[j] + p.eta[j] * (v_dc[j] - p.v_dc_r[j]) - p.gamma[j] * std::sin(0.5 * err);
    }
    return out;
}

Vec active_power(const Vec& v, const Vec& i_g) {
    const Index n = v.size() / 2;
    Vec out(n);
    for (Index j = 0; j < n; ++j) {
        out[j] = v[2 * j] * i_g[2 * j] + v[2 * j + 1] * i_g[2 * j + 1];
    }
    return out;
}

}  // namespace hgl
