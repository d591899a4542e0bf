#pragma once

// Decentralized stability certificates for the desired equilibrium x*_s:
// critical COI damping D_min, critical ILC angle gain gamma_min, the per-unit
// Q11 blocks and Q22 diagonal of the quadratic Lyapunov bound, and Jacobian
// spectra at every equilibrium.

#include "hgl/equilibria.hpp"
#include "hgl/grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace hgl {

class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Threshold on the smallest eigenvalue for a block to count as positive definite.
inline constexpr double kPdThreshold = 1e-12;

/// Euclidean norms of each unit's equilibrium quantities at x*_s.
struct UnitNorms {
    Vec i, v, i_g, v_dc;
};
UnitNorms unit_norms(const EquilibriumSet& eq);

/// Free parameters of the cross-term bounds and the resulting diagonal weights.
/// phi_k are stored per unit; the dq-valued ones (phi3, phi5, phi7, phi9) act on
/// both components of that unit.
struct BoundParameters {
    Vec lambda;
    Vec eps1, eps2, eps3, eps4, eps5;
    Vec phi1, phi2, phi3, phi4, phi5, phi6, phi7, phi8, phi9, phi10;
    /// Units with zero filter current at equilibrium; their modulation cross
    /// term vanishes identically so phi1 = phi2 = 0 and eps1 is left at +inf.
    std::vector<bool> no_load;
};

/// lambda = 2/eta, eps1 = sqrt(G_dc)/(sqrt2 mu |i*|), eps2 = sqrt(R/2),
/// eps3 = sqrt(R)/2, eps4 = sqrt(G)/2, eps5 = sqrt(R_g)/2.
BoundParameters assign_bound_parameters(const GridParameters& p, const EquilibriumSet& eq);

/// D_min,j = (L|i*|)^2/R + (C|v*|)^2/G + (L_g|i_g*|)^2/R_g.
Vec critical_damping(const GridParameters& p, const EquilibriumSet& eq);

struct CriticalGain {
    /// eta(1 + (mu|i*|)^2)/G_dc + eta(mu v_dc*)^2/R + 1/(2(D - D_min)), the
    /// published closed form.
    Vec closed_form;
    /// Threshold at which Q11,j turns positive definite (Schur complement with
    /// the assigned bound parameters). Authoritative for the verdict.
    Vec schur;
    /// D_j <= D_min,j: both gains are +inf.
    std::vector<bool> unsatisfiable;
};
CriticalGain critical_gain(const GridParameters& p, const EquilibriumSet& eq, const Vec& D_min);

struct QBlocks {
    std::vector<Eigen::Matrix3d> q11;  ///< one per unit, on (sin(dhat/2), vhat_dc, what)
    /// Diagonal on (i_dc_n, i_dc_g, i, v, i_g, T_m), length 8n + m.
    Vec q22;
};
QBlocks build_Q(const GridParameters& p, const EquilibriumSet& eq, const BoundParameters& bp);

struct CertificateReport {
    Vec D_min;
    Vec gamma_min;        ///< closed form as printed
    Vec gamma_min_schur;  ///< from Q11 positive definiteness
    Vec D_margin;
    Vec gamma_margin;        ///< gamma - gamma_min_schur
    Vec gamma_margin_printed;  ///< gamma - gamma_min
    std::vector<bool> gamma_infinite;

    QBlocks q;
    Vec q11_min_eig;
    double q22_min = 0.0;

    bool closed_form_pass = false;  ///< D > D_min and gamma > gamma_min_schur, every unit
    bool printed_form_pass = false;  ///< same with the printed gamma_min
    bool direct_pd_pass = false;     ///< Q11 blocks PD and Q22 entries positive
    bool agreement = false;          ///< closed_form_pass == direct_pd_pass
    bool pass = false;               ///< D margins positive and direct PD test passed

    /// Eigenvalues of K^{-1} df/dx at each equilibrium, in set order.
    std::vector<Eigen::VectorXcd> spectra;
    /// Largest real part per equilibrium.
    Vec max_real_part;
};

/// Evaluate every certificate quantity. Failures are verdicts, never errors.
/// Spectra are computed when `with_spectra` is set.
CertificateReport certify(const GridParameters& p, const EquilibriumSet& eq,
                          bool with_spectra = true);

/// Eigenvalues of K^{-1} df/dx at `x`. The analytic Jacobian is cross-checked
/// against central differences; a normwise relative mismatch above 1e-5 throws
/// ConsistencyError.
Eigen::VectorXcd jacobian_spectrum(const Vec& x, const GridParameters& p);

/// Normwise relative difference max|Ja - Jfd| / max(1, max|Ja|).
double jacobian_mismatch(const Vec& x, const GridParameters& p, double step = 1e-6);

/// default_grid with synthesized references and gamma = factor * gamma_min_schur.
GridParameters default_certified_grid(Index n, Index m, double factor = 2.0);

/// Apply gamma = factor * gamma_min_schur to an already-synthesized grid.
GridParameters with_certified_gamma(const GridParameters& p, double factor = 2.0);

}  // namespace hgl
