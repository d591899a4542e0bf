#pragma once

// LaSalle function about x*_s,
//   V(xhat) = 2 sum_j lambda_j (1 - cos(dhat_j / 2)) + 1/2 yhat^T P yhat,
// with lambda_j = 2/eta_j and P = diag(L_dc, tau_dc/kappa_dc, C_dc, L, C, L_g, J, tau_g/kappa_g),
// its time derivative along the error dynamics and the quadratic upper bound.

#include "hgl/certificates.hpp"
#include "hgl/equilibria.hpp"
#include "hgl/grid.hpp"

namespace hgl {

struct LyapunovEvaluation {
    double V = 0.0;
    double S_part = 0.0;
    double H_part = 0.0;
    double Vdot_analytic = 0.0;
    double Vdot_bound = 0.0;  ///< -xbar^T Q xbar
    Vec xbar;                 ///< (xbar_1, xbar_2)
};

/// Error coordinates about x*_s: dhat = wrap(delta - delta_r), yhat = y - y*.
Vec error_state(const Vec& x, const EquilibriumSet& eq);

/// Diagonal of P in yhat order.
Vec lyapunov_weights(const GridParameters& p);

/// V, S and H only.
LyapunovEvaluation evaluate_V(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq);

/// Closed-form dV/dt along the error dynamics: the half-angle row, the
/// dissipation terms, the rotation cross terms and the modulation-error cross
/// terms. All lossless couplings have been cancelled.
double vdot_closed_form(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq);

/// grad V(xhat)^T K^{-1} fhat(xhat), the independent chain-rule path.
double vdot_chain_rule(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq);

/// Closed form, cross-checked against the chain rule. A mismatch beyond 1e-10
/// relative (to 1 + the sum of absolute chain-rule terms) throws ConsistencyError.
double evaluate_Vdot_analytic(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq);

/// xbar_1 = per unit (sin(dhat_j/2), vhat_dc,j, what_j); xbar_2 = (i_dc_n, i_dc_g, i, v, i_g, T_m).
Vec reduced_coordinates(const Vec& xhat, const GridParameters& p);

/// -xbar^T Q xbar.
double quadratic_bound(const Vec& xhat, const GridParameters& p, const QBlocks& q);

/// (-xbar^T Q xbar) - Vdot. Nonnegative up to rounding for any parameters, since
/// each cross-term bound holds unconditionally.
double quadratic_bound_gap(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq,
                           const BoundParameters& bp);

/// Everything at once; the chain-rule cross-check is skipped.
LyapunovEvaluation evaluate_lyapunov(const Vec& xhat, const GridParameters& p,
                                     const EquilibriumSet& eq, const QBlocks& q);

}  // namespace hgl
