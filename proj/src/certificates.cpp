#include "hgl/certificates.hpp"

#include "hgl/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace hgl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pair_norm(const Vec& z, Index j) { return std::hypot(z[2 * j], z[2 * j + 1]); }

}  // namespace

UnitNorms unit_norms(const EquilibriumSet& eq) {
    const SystemState s = eq.stable_state();
    const Index n = eq.n;
    UnitNorms u{Vec(n), Vec(n), Vec(n), Vec(n)};
    for (Index j = 0; j < n; ++j) {
        u.i[j] = pair_norm(s.i, j);
        u.v[j] = pair_norm(s.v, j);
        u.i_g[j] = pair_norm(s.i_g, j);
        u.v_dc[j] = std::abs(s.v_dc[j]);
    }
    return u;
}

BoundParameters assign_bound_parameters(const GridParameters& p, const EquilibriumSet& eq) {
    const Index n = p.n;
    const UnitNorms u = unit_norms(eq);
    BoundParameters bp;
    bp.lambda = (2.0 / p.eta.array()).matrix();
    bp.eps1.resize(n);
    bp.eps2 = (p.R.array() / 2.0).sqrt().matrix();
    bp.eps3 = (p.R.array().sqrt() / 2.0).matrix();
    bp.eps4 = (p.G.array().sqrt() / 2.0).matrix();
    bp.eps5 = (p.R_g.array().sqrt() / 2.0).matrix();
    bp.no_load.assign(static_cast<std::size_t>(n), false);

    bp.phi1.resize(n);
    bp.phi2.resize(n);
    bp.phi3.resize(n);
    bp.phi4.resize(n);
    bp.phi5.resize(n);
    bp.phi6.resize(n);
    bp.phi7.resize(n);
    bp.phi8.resize(n);
    bp.phi9.resize(n);
    bp.phi10.resize(n);
    for (Index j = 0; j < n; ++j) {
        const double load = p.mu[j] * u.i[j];
        if (load > 0.0) {
            bp.eps1[j] = std::sqrt(p.G_dc[j]) / (std::sqrt(2.0) * load);
            bp.phi1[j] = std::pow(bp.eps1[j] * load, 2);
            bp.phi2[j] = 1.0 / (bp.eps1[j] * bp.eps1[j]);
        } else {
            bp.no_load[static_cast<std::size_t>(j)] = true;
            bp.eps1[j] = kInf;
            bp.phi1[j] = 0.0;
            bp.phi2[j] = 0.0;
        }
        bp.phi3[j] = bp.eps2[j] * bp.eps2[j];
        bp.phi4[j] = std::pow(p.mu[j] * u.v_dc[j] / bp.eps2[j], 2);
        bp.phi5[j] = bp.eps3[j] * bp.eps3[j];
        bp.phi6[j] = std::pow(p.L[j] * u.i[j] / (2.0 * bp.eps3[j]), 2);
        bp.phi7[j] = bp.eps4[j] * bp.eps4[j];
        bp.phi8[j] = std::pow(p.C[j] * u.v[j] / (2.0 * bp.eps4[j]), 2);
        bp.phi9[j] = bp.eps5[j] * bp.eps5[j];
        bp.phi10[j] = std::pow(p.L_g[j] * u.i_g[j] / (2.0 * bp.eps5[j]), 2);
    }
    return bp;
}

Vec critical_damping(const GridParameters& p, const EquilibriumSet& eq) {
    const UnitNorms u = unit_norms(eq);
    Vec out(p.n);
    for (Index j = 0; j < p.n; ++j) {
        out[j] = std::pow(p.L[j] * u.i[j], 2) / p.R[j] + std::pow(p.C[j] * u.v[j], 2) / p.G[j] +
                 std::pow(p.L_g[j] * u.i_g[j], 2) / p.R_g[j];
    }
    return out;
}

CriticalGain critical_gain(const GridParameters& p, const EquilibriumSet& eq, const Vec& D_min) {
    const Index n = p.n;
    const UnitNorms u = unit_norms(eq);
    const BoundParameters bp = assign_bound_parameters(p, eq);
    const Vec D = p.damping();

    CriticalGain g{Vec(n), Vec(n), std::vector<bool>(static_cast<std::size_t>(n), false)};
    for (Index j = 0; j < n; ++j) {
        const double slack = D[j] - D_min[j];
        if (!(slack > 0.0)) {
            g.unsatisfiable[static_cast<std::size_t>(j)] = true;
            g.closed_form[j] = kInf;
            g.schur[j] = kInf;
            continue;
        }
        const double eta = p.eta[j];
        g.closed_form[j] = eta * (1.0 + std::pow(p.mu[j] * u.i[j], 2)) / p.G_dc[j] +
                           eta * std::pow(p.mu[j] * u.v_dc[j], 2) / p.R[j] + 1.0 / (2.0 * slack);

        // Q11 = [a, -l eta/2, l/2; -l eta/2, b, 0; l/2, 0, c] is PD iff b, c > 0 and
        // a > (l eta/2)^2/b + (l/2)^2/c, with a = l gamma - phi2 - phi4.
        const double lam = bp.lambda[j];
        const double b = p.G_dc[j] - bp.phi1[j];
        const double c = D[j] - bp.phi6[j] - bp.phi8[j] - bp.phi10[j];
        if (!(b > 0.0) || !(c > 0.0)) {
            g.unsatisfiable[static_cast<std::size_t>(j)] = true;
            g.schur[j] = kInf;
            continue;
        }
        const double off_v = lam * eta / 2.0;
        const double off_w = lam / 2.0;
        g.schur[j] = (bp.phi2[j] + bp.phi4[j] + off_v * off_v / b + off_w * off_w / c) / lam;
    }
    return g;
}

QBlocks build_Q(const GridParameters& p, const EquilibriumSet& eq, const BoundParameters& bp) {
    (void)eq;
    const Index n = p.n;
    const Index m = p.m;
    const Vec D = p.damping();
    QBlocks q;
    q.q11.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        const double lam = bp.lambda[j];
        Eigen::Matrix3d b;
        b(0, 0) = lam * p.gamma[j] - bp.phi2[j] - bp.phi4[j];
        b(1, 1) = p.G_dc[j] - bp.phi1[j];
        b(2, 2) = D[j] - bp.phi6[j] - bp.phi8[j] - bp.phi10[j];
        b(0, 1) = b(1, 0) = -lam * p.eta[j] / 2.0;
        b(0, 2) = b(2, 0) = lam / 2.0;
        b(1, 2) = b(2, 1) = 0.0;
        q.q11.push_back(b);
    }

    q.q22.resize(8 * n + m);
    Index k = 0;
    for (Index e = 0; e < m; ++e) {
        q.q22[k++] = p.R_dc[e];
    }
    for (Index j = 0; j < n; ++j) {
        q.q22[k++] = 1.0 / p.kappa_dc[j];
    }
    auto dq = [&](auto&& value) {
        for (Index j = 0; j < n; ++j) {
            q.q22[k++] = value(j);
            q.q22[k++] = value(j);
        }
    };
    dq([&](Index j) { return p.R[j] - bp.phi3[j] - bp.phi5[j]; });
    dq([&](Index j) { return p.G[j] - bp.phi7[j]; });
    dq([&](Index j) { return p.R_g[j] - bp.phi9[j]; });
    for (Index j = 0; j < n; ++j) {
        q.q22[k++] = 1.0 / p.kappa_g[j];
    }
    return q;
}

double jacobian_mismatch(const Vec& x, const GridParameters& p, double step) {
    const Mat Ja = jacobian(x, p);
    const Mat Jf = jacobian_fd(x, p, step);
    return (Ja - Jf).cwiseAbs().maxCoeff() / std::max(1.0, Ja.cwiseAbs().maxCoeff());
}

Eigen::VectorXcd jacobian_spectrum(const Vec& x, const GridParameters& p) {
    const Mat Ja = jacobian(x, p);
    const Mat Jf = jacobian_fd(x, p);
    const double mismatch =
        (Ja - Jf).cwiseAbs().maxCoeff() / std::max(1.0, Ja.cwiseAbs().maxCoeff());
    if (mismatch > 1e-5) {
        throw ConsistencyError("jacobian_spectrum: analytic and finite-difference Jacobians differ by " +
                               std::to_string(mismatch));
    }
    const Vec inv_mass = MassMatrix::from(p).diagonal().cwiseInverse();
    const Mat A = inv_mass.asDiagonal() * Ja;
    Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw ConsistencyError("jacobian_spectrum: eigenvalue iteration did not converge");
    }
    return es.eigenvalues();
}

CertificateReport certify(const GridParameters& p, const EquilibriumSet& eq, bool with_spectra) {
    const Index n = p.n;
    CertificateReport r;
    r.D_min = critical_damping(p, eq);
    const CriticalGain g = critical_gain(p, eq, r.D_min);
    r.gamma_min = g.closed_form;
    r.gamma_min_schur = g.schur;
    r.gamma_infinite = g.unsatisfiable;
    r.D_margin = p.damping() - r.D_min;
    r.gamma_margin = p.gamma - r.gamma_min_schur;
    r.gamma_margin_printed = p.gamma - r.gamma_min;

    const BoundParameters bp = assign_bound_parameters(p, eq);
    r.q = build_Q(p, eq, bp);
    r.q11_min_eig.resize(n);
    for (Index j = 0; j < n; ++j) {
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(r.q.q11[static_cast<std::size_t>(j)],
                                                                Eigen::EigenvaluesOnly);
        r.q11_min_eig[j] = es.eigenvalues().minCoeff();
    }
    r.q22_min = r.q.q22.minCoeff();

    bool d_ok = true, g_ok = true, g_printed_ok = true;
    for (Index j = 0; j < n; ++j) {
        d_ok = d_ok && r.D_margin[j] > 0.0;
        g_ok = g_ok && r.gamma_margin[j] > 0.0;
        g_printed_ok = g_printed_ok && r.gamma_margin_printed[j] > 0.0;
    }
    r.closed_form_pass = d_ok && g_ok;
    r.printed_form_pass = d_ok && g_printed_ok;
    r.direct_pd_pass = r.q11_min_eig.minCoeff() > kPdThreshold && r.q22_min > 0.0;
    r.agreement = r.closed_form_pass == r.direct_pd_pass;
    r.pass = d_ok && r.direct_pd_pass;

    if (with_spectra) {
        r.max_real_part.resize(static_cast<Index>(eq.points.size()));
        for (std::size_t k = 0; k < eq.points.size(); ++k) {
            r.spectra.push_back(jacobian_spectrum(eq.points[k].x, p));
            r.max_real_part[static_cast<Index>(k)] = r.spectra.back().real().maxCoeff();
        }
    }
    return r;
}

GridParameters with_certified_gamma(const GridParameters& p, double factor) {
    const EquilibriumSet eq = solve_stationary(p);
    const Vec D_min = critical_damping(p, eq);
    const CriticalGain g = critical_gain(p, eq, D_min);
    GridParameters out = p;
    out.gamma = factor * g.schur;
    if (!out.gamma.allFinite()) {
        throw std::invalid_argument("with_certified_gamma: damping below D_min, no finite gain certifies");
    }
    return out;
}

GridParameters default_certified_grid(Index n, Index m, double factor) {
    return with_certified_gamma(synthesize_references(default_grid(n, m)), factor);
}

}  // namespace hgl
