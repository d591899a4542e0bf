#include "hgl/lyapunov.hpp"

#include "hgl/model.hpp"

#include <cmath>

namespace hgl {

Vec error_state(const Vec& x, const EquilibriumSet& eq) {
    const Vec& xs = eq.stable().x;
    Vec xhat = x - xs;
    for (Index j = 0; j < eq.n; ++j) {
        xhat[j] = angle_difference(x[j], xs[j]);
    }
    return xhat;
}

Vec lyapunov_weights(const GridParameters& p) {
    const MassMatrix k = MassMatrix::from(p);
    Vec w(p.layout().y_dim());
    w << k.i_dc_n, p.tau_dc.cwiseQuotient(p.kappa_dc), k.v_dc, k.i, k.v, k.i_g, k.omega_g,
        p.tau_g.cwiseQuotient(p.kappa_g);
    return w;
}

LyapunovEvaluation evaluate_V(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq) {
    (void)eq;
    LyapunovEvaluation e;
    for (Index j = 0; j < p.n; ++j) {
        const double lambda = 2.0 / p.eta[j];
        e.S_part += 2.0 * lambda * (1.0 - std::cos(0.5 * xhat[j]));
    }
    const Vec yhat = xhat.tail(p.layout().y_dim());
    e.H_part = 0.5 * yhat.dot(lyapunov_weights(p).cwiseProduct(yhat));
    e.V = e.S_part + e.H_part;
    return e;
}

double vdot_closed_form(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq) {
    const Index n = p.n;
    const Index m = p.m;
    const SystemState e = SystemState::from_flat(xhat, n, m);
    const SystemState s = eq.stable_state();
    const Vec D = p.damping();

    // J2 z = (-z_q, z_d); a^T J2 b = a_q b_d - a_d b_q
    auto cross = [](const Vec& a, const Vec& b, Index j) {
        return a[2 * j + 1] * b[2 * j] - a[2 * j] * b[2 * j + 1];
    };

    double vdot = 0.0;
    for (Index k = 0; k < m; ++k) {
        vdot -= p.R_dc[k] * e.i_dc_n[k] * e.i_dc_n[k];
    }
    for (Index j = 0; j < n; ++j) {
        const double lambda = 2.0 / p.eta[j];
        const double sh = std::sin(0.5 * e.delta[j]);
        vdot += sh * lambda * (p.eta[j] * e.v_dc[j] - p.gamma[j] * sh - e.omega_g[j]);

        vdot -= e.i_dc_g[j] * e.i_dc_g[j] / p.kappa_dc[j];
        vdot -= p.G_dc[j] * e.v_dc[j] * e.v_dc[j];
        vdot -= p.R[j] * (e.i[2 * j] * e.i[2 * j] + e.i[2 * j + 1] * e.i[2 * j + 1]);
        vdot -= p.G[j] * (e.v[2 * j] * e.v[2 * j] + e.v[2 * j + 1] * e.v[2 * j + 1]);
        vdot -= p.R_g[j] * (e.i_g[2 * j] * e.i_g[2 * j] + e.i_g[2 * j + 1] * e.i_g[2 * j + 1]);
        vdot -= D[j] * e.omega_g[j] * e.omega_g[j];
        vdot -= e.T_m[j] * e.T_m[j] / p.kappa_g[j];

        // frame-rotation cross terms
        vdot += p.L[j] * e.omega_g[j] * cross(e.i, s.i, j);
        vdot += p.C[j] * e.omega_g[j] * cross(e.v, s.v, j);
        vdot += p.L_g[j] * e.omega_g[j] * cross(e.i_g, s.i_g, j);

        // modulation-error cross terms, E_j = mu_j (r(delta_j) - r(delta*_j))
        const double delta = e.delta[j] + s.delta[j];
        const double Ed = p.mu[j] * (std::cos(delta) - std::cos(s.delta[j]));
        const double Eq = p.mu[j] * (std::sin(delta) - std::sin(s.delta[j]));
        vdot -= e.v_dc[j] * (Ed * s.i[2 * j] + Eq * s.i[2 * j + 1]);
        vdot += (e.i[2 * j] * Ed + e.i[2 * j + 1] * Eq) * s.v_dc[j];
    }
    return vdot;
}

namespace {

struct ChainRule {
    double value;
    double scale;
};

ChainRule chain_rule_terms(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq) {
    const Index n = p.n;
    const StateLayout lay = p.layout();
    const Vec fhat = error_vector_field(xhat, eq.stable().x, p);
    const Vec inv_mass = MassMatrix::from(p).diagonal().cwiseInverse();
    const Vec rate = fhat.cwiseProduct(inv_mass);

    Vec grad(lay.dim());
    for (Index j = 0; j < n; ++j) {
        grad[j] = (2.0 / p.eta[j]) * std::sin(0.5 * xhat[j]);
    }
    grad.tail(lay.y_dim()) = lyapunov_weights(p).cwiseProduct(xhat.tail(lay.y_dim()));
    const Vec terms = grad.cwiseProduct(rate);
    return {terms.sum(), 1.0 + terms.cwiseAbs().sum()};
}

}  // namespace

double vdot_chain_rule(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq) {
    return chain_rule_terms(xhat, p, eq).value;
}

double evaluate_Vdot_analytic(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq) {
    const double closed = vdot_closed_form(xhat, p, eq);
    const ChainRule chain = chain_rule_terms(xhat, p, eq);
    if (std::abs(closed - chain.value) > 1e-10 * chain.scale) {
        throw ConsistencyError("evaluate_Vdot_analytic: closed form " + std::to_string(closed) +
                               " disagrees with chain rule " + std::to_string(chain.value));
    }
    return closed;
}

Vec reduced_coordinates(const Vec& xhat, const GridParameters& p) {
    const Index n = p.n;
    const Index m = p.m;
    const StateLayout lay = p.layout();
    Vec xbar(3 * n + 8 * n + m);
    for (Index j = 0; j < n; ++j) {
        xbar[3 * j] = std::sin(0.5 * xhat[j]);
        xbar[3 * j + 1] = xhat[lay.v_dc() + j];
        xbar[3 * j + 2] = xhat[lay.omega_g() + j];
    }
    Vec x2(8 * n + m);
    x2 << xhat.segment(lay.i_dc_n(), m), xhat.segment(lay.i_dc_g(), n),
        xhat.segment(lay.i(), 6 * n), xhat.segment(lay.T_m(), n);
    xbar.tail(8 * n + m) = x2;
    return xbar;
}

double quadratic_bound(const Vec& xhat, const GridParameters& p, const QBlocks& q) {
    const Index n = p.n;
    const Vec xbar = reduced_coordinates(xhat, p);
    double form = 0.0;
    for (Index j = 0; j < n; ++j) {
        const Eigen::Vector3d z = xbar.segment<3>(3 * j);
        form += z.dot(q.q11[static_cast<std::size_t>(j)] * z);
    }
    const Vec x2 = xbar.tail(q.q22.size());
    form += x2.dot(q.q22.cwiseProduct(x2));
    return -form;
}

double quadratic_bound_gap(const Vec& xhat, const GridParameters& p, const EquilibriumSet& eq,
                           const BoundParameters& bp) {
    const QBlocks q = build_Q(p, eq, bp);
    return quadratic_bound(xhat, p, q) - vdot_closed_form(xhat, p, eq);
}

LyapunovEvaluation evaluate_lyapunov(const Vec& xhat, const GridParameters& p,
                                     const EquilibriumSet& eq, const QBlocks& q) {
    LyapunovEvaluation e = evaluate_V(xhat, p, eq);
    e.Vdot_analytic = vdot_closed_form(xhat, p, eq);
    e.Vdot_bound = quadratic_bound(xhat, p, q);
    e.xbar = reduced_coordinates(xhat, p);
    return e;
}

}  // namespace hgl
