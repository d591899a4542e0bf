#pragma once

// Random valid grids for property tests.

#include "hgl/certificates.hpp"
#include "hgl/equilibria.hpp"
#include "hgl/grid.hpp"

#include <random>

namespace hgl::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec uniform_vec(std::mt19937_64& rng, Index n, double lo, double hi) {
    Vec v(n);
    for (Index k = 0; k < n; ++k) v[k] = uniform(rng, lo, hi);
    return v;
}

/// Positive parameters in per-unit ranges around the defaults. References are
/// left unsynthesized and gamma is random.
inline GridParameters random_grid(std::mt19937_64& rng, Index n, Index m) {
    GridParameters p;
    p.n = n;
    p.m = m;
    p.J = uniform_vec(rng, n, 1.0, 8.0);
    p.D_f = uniform_vec(rng, n, 0.5, 2.0);
    p.D_d = uniform_vec(rng, n, 5.0, 40.0);
    p.tau_g = uniform_vec(rng, n, 0.5, 4.0);
    p.kappa_g = uniform_vec(rng, n, 5.0, 40.0);
    p.T_r = Vec::Zero(n);
    p.omega_r = uniform_vec(rng, n, 0.95, 1.05);
    p.L_g = uniform_vec(rng, n, 0.05, 0.4);
    p.R_g = uniform_vec(rng, n, 0.02, 0.2);
    p.mu = uniform_vec(rng, n, 0.2, 0.5);
    p.L = uniform_vec(rng, n, 0.03, 0.15);
    p.R = uniform_vec(rng, n, 0.01, 0.08);
    p.C = uniform_vec(rng, n, 0.05, 0.2);
    p.G = uniform_vec(rng, n, 0.02, 0.1);
    p.C_dc = uniform_vec(rng, n, 0.1, 0.4);
    p.G_dc = uniform_vec(rng, n, 0.05, 0.2);
    p.tau_dc = uniform_vec(rng, n, 0.05, 0.3);
    p.kappa_dc = uniform_vec(rng, n, 5.0, 20.0);
    p.i_dc_r = Vec::Zero(n);
    p.v_dc_r = uniform_vec(rng, n, 0.9, 1.1);
    p.eta = uniform_vec(rng, n, 0.5, 2.0);
    p.gamma = uniform_vec(rng, n, 1.0, 50.0);
    p.delta_r = uniform_vec(rng, n, -0.4, 0.4);
    p.b = uniform_vec(rng, n, 0.4, 0.55).cwiseQuotient(p.omega_r);
    p.i_dc_inj = uniform_vec(rng, n, -0.05, 0.05);

    std::vector<std::pair<Index, Index>> pairs;
    std::uniform_int_distribution<Index> node(0, n - 1);
    for (Index k = 0; k < m; ++k) {
        Index a = node(rng), b = node(rng);
        while (b == a) b = node(rng);
        pairs.emplace_back(a, b);
    }
    p.B = incidence_from_pairs(n, pairs);
    p.L_dc = uniform_vec(rng, m, 0.05, 0.2);
    p.R_dc = uniform_vec(rng, m, 0.02, 0.1);
    return p;
}

/// Random (n, m) pair at desk scale, n in [1, 4], m in [0, 4], m = 0 when n = 1.
inline std::pair<Index, Index> random_size(std::mt19937_64& rng) {
    const Index n = std::uniform_int_distribution<Index>(1, 4)(rng);
    const Index m = n == 1 ? 0 : std::uniform_int_distribution<Index>(0, 4)(rng);
    return {n, m};
}

/// Random grid with synthesized references and gamma = factor * critical gain.
inline GridParameters random_certified_grid(std::mt19937_64& rng, Index n, Index m, double factor = 2.0) {
    return with_certified_gamma(synthesize_references(random_grid(rng, n, m)), factor);
}

}  // namespace hgl::test
