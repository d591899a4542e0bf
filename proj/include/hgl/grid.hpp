#pragma once

// Parameters, state layout and angle arithmetic for the hybrid ac/dc grid model.
//
// All quantities are per-unit. Two-axis (dq) quantities are stored per converter
// contiguously: entries (2j, 2j+1) hold the (d, q) components of unit j.

#include <Eigen/Dense>

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace hgl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// Map an angle onto the representative interval [-2pi, 2pi) of the period-4pi
/// angle manifold. Values already inside the interval are returned unchanged.
/// Throws std::invalid_argument for non-finite input.
double wrap_angle(double theta);

/// Signed distance between two angles on the manifold, in [-2pi, 2pi).
inline double angle_difference(double a, double b) { return wrap_angle(a - b); }

/// Offsets of each block inside the flat state vector
/// x = (delta, i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m).
struct StateLayout {
    Index n = 0;
    Index m = 0;

    Index delta() const { return 0; }
    Index i_dc_n() const { return n; }
    Index i_dc_g() const { return n + m; }
    Index v_dc() const { return 2 * n + m; }
    Index i() const { return 3 * n + m; }
    Index v() const { return 5 * n + m; }
    Index i_g() const { return 7 * n + m; }
    Index omega_g() const { return 9 * n + m; }
    Index T_m() const { return 10 * n + m; }

    /// Length of the non-angle part y.
    Index y_dim() const { return 10 * n + m; }
    /// Length of the full flat state (angles plus y).
    Index dim() const { return 11 * n + m; }

    /// Column names in canonical order, used by CSV output.
    std::vector<std::string> names() const;
};

/// Physical and control constants of an n-converter, m-line network.
struct GridParameters {
    Index n = 0;
    Index m = 0;

    // ac grids (center-of-inertia models)
    Vec J, D_f, D_d, tau_g, kappa_g, T_r, omega_r;
    // ac lines
    Vec L_g, R_g;
    // interlinking converters
    Vec mu, L, R, C, G;
    Vec C_dc, G_dc, tau_dc, kappa_dc, i_dc_r, v_dc_r;
    // dc network
    Mat B;  // n x m signed incidence
    Vec L_dc, R_dc;
    // hybrid angle control
    Vec eta, gamma, delta_r;
    // COI voltage constants b_j = v_r,j / omega_r,j
    Vec b;
    // constant nodal dc injections (distributed dc sources)
    Vec i_dc_inj;

    StateLayout layout() const { return {n, m}; }

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    /// Damping D = D_f + D_d.
    Vec damping() const { return D_f + D_d; }
};

/// Build an incidence matrix from (from, to) node pairs. Positive edge current
/// flows from `from` to `to`: column k holds -1 at `from` and +1 at `to`.
Mat incidence_from_pairs(Index n, const std::vector<std::pair<Index, Index>>& pairs);

/// Desk-scale defaults used throughout the tests. The line graph is a path
/// 0-1-...-n-1 (with m extra chords wrapping around if m >= n). gamma is left at
/// zero; callers pick it from the certificate (see `default_certified_grid`).
GridParameters default_grid(Index n, Index m);

/// Structured view of a flat state vector.
struct SystemState {
    Vec delta, i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m;

    static SystemState zeros(Index n, Index m);
    static SystemState from_flat(const Vec& x, Index n, Index m);
    Vec flat() const;
    /// Apply wrap_angle to every delta component.
    void wrap();
};

/// Block-diagonal mass matrix K = diag(I_n, L_dc, tau_dc, C_dc, L, C, L_g, J, tau_g),
/// stored as per-block diagonals.
struct MassMatrix {
    Vec delta, i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m;

    static MassMatrix from(const GridParameters& p);
    /// The full (11n + m) diagonal.
    Vec diagonal() const;
};

/// m(delta) in R^{2n x n}: column j holds mu_j (cos delta_j, sin delta_j) at rows (2j, 2j+1).
Mat modulation_matrix(const Vec& delta, const Vec& mu);

/// psi in R^{2n x n}: column j holds b_j at row 2j.
Mat build_psi(const Vec& b);

/// Apply wrap_angle to the first n entries of a flat state.
void wrap_angles(Vec& x, Index n);

}  // namespace hgl
