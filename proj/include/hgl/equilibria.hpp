#pragma once

// Stationary points of the closed loop. Frequencies and dc voltages are pinned to
// their references; the remaining electrical states follow from one linear solve
// and the 2^n equilibria differ only in their angles.

#include "hgl/grid.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgl {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Residual bound for a point to count as an equilibrium (infinity norm, per-unit).
inline constexpr double kEquilibriumTolerance = 1e-9;

/// Largest n for which the 2^n equilibria are enumerated.
inline constexpr Index kMaxEnumeratedUnits = 20;

enum class EquilibriumKind { StableCandidate, Saddle };

std::string to_string(EquilibriumKind kind);

struct EquilibriumPoint {
    Vec x;  ///< full flat state
    EquilibriumKind kind = EquilibriumKind::StableCandidate;
    /// Bit j set when delta_j sits at wrap(delta_r,j + 2pi).
    std::uint32_t pattern = 0;
};

struct EquilibriumSet {
    Index n = 0;
    Index m = 0;
    /// Shared non-angle part (i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m).
    Vec y_star;
    /// References that make the stationary point exact.
    Vec T_r;
    Vec i_dc_r;
    /// points[0] is the stable candidate; the rest form the saddle set.
    std::vector<EquilibriumPoint> points;

    const EquilibriumPoint& stable() const { return points.front(); }
    /// Structured view of the stable candidate x*_s.
    SystemState stable_state() const { return SystemState::from_flat(stable().x, n, m); }
};

struct FSystem {
    Mat F;  ///< 6n x 6n
    Vec h;  ///< 6n
};

/// Assemble F ybar = h for ybar = (i, v, i_g) at the given angles and setpoints.
FSystem build_F_h(const Vec& delta_star, const Vec& omega_star, const Vec& v_dc_star,
                  const GridParameters& p);

/// Solve for y* under omega* = omega_r and v_dc* = v_dc_r using the parameter set's
/// current references (T_m* = T_r, i_dc_g* = i_dc_r), and attach all 2^n angle
/// patterns. Throws SolverError if F is numerically singular.
EquilibriumSet solve_stationary(const GridParameters& p);

/// Return a copy of `p` whose T_r and i_dc_r make the frequency, torque,
/// dc-source and dc-node rows vanish at the stationary point.
GridParameters synthesize_references(const GridParameters& p);

/// Expand a solved set (only points[0] needs to be present) to all 2^n angle
/// patterns. Throws std::invalid_argument for n > kMaxEnumeratedUnits.
EquilibriumSet enumerate_equilibria(const EquilibriumSet& base);

/// Largest ||f(x*)||_inf over the points of the set.
double equilibrium_residual(const EquilibriumSet& set, const GridParameters& p);

}  // namespace hgl
