#include "hgl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hgl {

double wrap_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    if (theta >= -kTwoPi && theta < kTwoPi) {
        return theta;
    }
    double r = std::fmod(theta + kTwoPi, kFourPi);
    if (r < 0.0) {
        r += kFourPi;
    }
    r -= kTwoPi;
    // fmod rounding can land exactly on the open end
    if (r >= kTwoPi) {
        r = -kTwoPi;
    }
    return r;
}

void wrap_angles(Vec& x, Index n) {
    for (Index j = 0; j < n; ++j) {
        x[j] = wrap_angle(x[j]);
    }
}

std::vector<std::string> StateLayout::names() const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(dim()));
    auto scalar = [&](const char* base, Index count) {
        for (Index j = 0; j < count; ++j) {
            out.push_back(std::string(base) + "_" + std::to_string(j));
        }
    };
    auto dq = [&](const char* base) {
        for (Index j = 0; j < n; ++j) {
            out.push_back(std::string(base) + "_d_" + std::to_string(j));
            out.push_back(std::string(base) + "_q_" + std::to_string(j));
        }
    };
    scalar("delta", n);
    scalar("i_dc_n", m);
    scalar("i_dc_g", n);
    scalar("v_dc", n);
    dq("i");
    dq("v");
    dq("i_g");
    scalar("omega_g", n);
    scalar("T_m", n);
    return out;
}

namespace {

void require_size(const Vec& v, Index size, const char* name) {
    if (v.size() != size) {
        throw std::invalid_argument(std::string("GridParameters: ") + name + " has length " +
                                    std::to_string(v.size()) + ", expected " + std::to_string(size));
    }
}

void require_positive(const Vec& v, const char* name) {
    for (Index k = 0; k < v.size(); ++k) {
        if (!(v[k] > 0.0) || !std::isfinite(v[k])) {
            throw std::invalid_argument(std::string("GridParameters: ") + name + "[" +
                                        std::to_string(k) + "] must be strictly positive");
        }
    }
}

void require_finite(const Vec& v, const char* name) {
    if (!v.allFinite()) {
        throw std::invalid_argument(std::string("GridParameters: ") + name + " must be finite");
    }
}

}  // namespace

void GridParameters::validate() const {
    if (n <= 0) {
        throw std::invalid_argument("GridParameters: n must be positive");
    }
    if (m < 0) {
        throw std::invalid_argument("GridParameters: m must be non-negative");
    }
    struct Entry {
        const Vec* v;
        const char* name;
        Index size;
        bool positive;
    };
    const Entry entries[] = {
        {&J, "J", n, true},           {&D_f, "D_f", n, true},
        {&D_d, "D_d", n, true},       {&tau_g, "tau_g", n, true},
        {&kappa_g, "kappa_g", n, true}, {&T_r, "T_r", n, false},
        {&omega_r, "omega_r", n, true}, {&L_g, "L_g", n, true},
        {&R_g, "R_g", n, true},       {&mu, "mu", n, true},
        {&L, "L", n, true},           {&R, "R", n, true},
        {&C, "C", n, true},           {&G, "G", n, true},
        {&C_dc, "C_dc", n, true},     {&G_dc, "G_dc", n, true},
        {&tau_dc, "tau_dc", n, true}, {&kappa_dc, "kappa_dc", n, true},
        {&i_dc_r, "i_dc_r", n, false}, {&v_dc_r, "v_dc_r", n, false},
        {&L_dc, "L_dc", m, true},     {&R_dc, "R_dc", m, true},
        {&eta, "eta", n, true},       {&gamma, "gamma", n, false},
        {&delta_r, "delta_r", n, false}, {&b, "b", n, false},
        {&i_dc_inj, "i_dc_inj", n, false},
    };
    for (const auto& e : entries) {
        require_size(*e.v, e.size, e.name);
        require_finite(*e.v, e.name);
        if (e.positive) {
            require_positive(*e.v, e.name);
        }
    }
    for (Index j = 0; j < n; ++j) {
        if (gamma[j] < 0.0) {
            throw std::invalid_argument("GridParameters: gamma must be non-negative");
        }
        if (b[j] < 0.0) {
            throw std::invalid_argument("GridParameters: b must be non-negative");
        }
        if (mu[j] > 0.5) {
            throw std::invalid_argument("mu must lie in (0, 0.5]");
        }
        if (delta_r[j] < -kTwoPi || delta_r[j] >= kTwoPi) {
            throw std::invalid_argument("GridParameters: delta_r must lie in [-2pi, 2pi)");
        }
    }
    if (B.rows() != n || B.cols() != m) {
        throw std::invalid_argument("GridParameters: incidence matrix must be n x m");
    }
    for (Index k = 0; k < m; ++k) {
        int plus = 0;
        int minus = 0;
        for (Index j = 0; j < n; ++j) {
            const double e = B(j, k);
            if (e == 1.0) {
                ++plus;
            } else if (e == -1.0) {
                ++minus;
            } else if (e != 0.0) {
                throw std::invalid_argument("GridParameters: incidence entries must be 0 or +-1");
            }
        }
        if (plus != 1 || minus != 1) {
            throw std::invalid_argument("GridParameters: incidence column " + std::to_string(k) +
                                        " needs exactly one +1 and one -1");
        }
    }
}

Mat incidence_from_pairs(Index n, const std::vector<std::pair<Index, Index>>& pairs) {
    Mat B = Mat::Zero(n, static_cast<Index>(pairs.size()));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [from, to] = pairs[k];
        if (from < 0 || from >= n || to < 0 || to >= n) {
            throw std::invalid_argument("incidence: node index out of range in line " +
                                        std::to_string(k));
        }
        if (from == to) {
            throw std::invalid_argument("incidence: line " + std::to_string(k) +
                                        " is a self-loop");
        }
        B(from, static_cast<Index>(k)) = -1.0;
        B(to, static_cast<Index>(k)) = 1.0;
    }
    return B;
}

GridParameters default_grid(Index n, Index m) {
    if (n <= 0 || m < 0) {
        throw std::invalid_argument("default_grid: need n > 0 and m >= 0");
    }
    if (n == 1 && m > 0) {
        throw std::invalid_argument("default_grid: a single node cannot carry dc lines");
    }
    auto c = [n](double value) { return Vec::Constant(n, value); };
    GridParameters p;
    p.n = n;
    p.m = m;
    p.J = c(4.0);
    p.D_f = c(1.0);
    p.D_d = c(25.0);
    p.tau_g = c(2.0);
    p.kappa_g = c(20.0);
    p.T_r = c(0.0);
    p.omega_r = c(1.0);
    p.L_g = c(0.2);
    p.R_g = c(0.05);
    p.mu = c(0.5);
    p.L = c(0.08);
    p.R = c(0.02);
    p.C = c(0.1);
    p.G = c(0.05);
    p.C_dc = c(0.2);
    p.G_dc = c(0.1);
    p.tau_dc = c(0.1);
    p.kappa_dc = c(10.0);
    p.i_dc_r = c(0.0);
    p.v_dc_r = c(1.0);
    p.eta = c(1.0);
    p.gamma = c(0.0);
    p.delta_r = Vec(n);
    p.b = Vec(n);
    for (Index j = 0; j < n; ++j) {
        // alternate leading/lagging reference angles, mildly heterogeneous voltages
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        p.delta_r[j] = sign * 0.15 * (1.0 + 0.5 * static_cast<double>(j / 2));
        p.b[j] = (0.45 + 0.02 * static_cast<double>(j)) / p.omega_r[j];
    }
    p.i_dc_inj = c(0.0);

    std::vector<std::pair<Index, Index>> pairs;
    for (Index k = 0; k < m; ++k) {
        pairs.emplace_back(k % n, (k + 1) % n);
    }
    p.B = incidence_from_pairs(n, pairs);
    p.L_dc = Vec::Constant(m, 0.1);
    p.R_dc = Vec::Constant(m, 0.05);
    return p;
}

SystemState SystemState::zeros(Index n, Index m) {
    return from_flat(Vec::Zero(11 * n + m), n, m);
}

SystemState SystemState::from_flat(const Vec& x, Index n, Index m) {
    const StateLayout lay{n, m};
    if (x.size() != lay.dim()) {
        throw std::invalid_argument("SystemState: flat vector has length " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(lay.dim()));
    }
    SystemState s;
    s.delta = x.segment(lay.delta(), n);
    s.i_dc_n = x.segment(lay.i_dc_n(), m);
    s.i_dc_g = x.segment(lay.i_dc_g(), n);
    s.v_dc = x.segment(lay.v_dc(), n);
    s.i = x.segment(lay.i(), 2 * n);
    s.v = x.segment(lay.v(), 2 * n);
    s.i_g = x.segment(lay.i_g(), 2 * n);
    s.omega_g = x.segment(lay.omega_g(), n);
    s.T_m = x.segment(lay.T_m(), n);
    return s;
}

Vec SystemState::flat() const {
    const Index n = delta.size();
    const Index m = i_dc_n.size();
    const StateLayout lay{n, m};
    Vec x(lay.dim());
    x << delta, i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m;
    return x;
}

void SystemState::wrap() {
    for (Index j = 0; j < delta.size(); ++j) {
        delta[j] = wrap_angle(delta[j]);
    }
}

MassMatrix MassMatrix::from(const GridParameters& p) {
    auto pairs = [](const Vec& v) {
        Vec out(2 * v.size());
        for (Index j = 0; j < v.size(); ++j) {
            out[2 * j] = v[j];
            out[2 * j + 1] = v[j];
        }
        return out;
    };
    MassMatrix k;
    k.delta = Vec::Ones(p.n);
    k.i_dc_n = p.L_dc;
    k.i_dc_g = p.tau_dc;
    k.v_dc = p.C_dc;
    k.i = pairs(p.L);
    k.v = pairs(p.C);
    k.i_g = pairs(p.L_g);
    k.omega_g = p.J;
    k.T_m = p.tau_g;
    return k;
}

Vec MassMatrix::diagonal() const {
    Vec d(delta.size() + i_dc_n.size() + i_dc_g.size() + v_dc.size() + i.size() + v.size() +
          i_g.size() + omega_g.size() + T_m.size());
    d << delta, i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m;
    return d;
}

Mat modulation_matrix(const Vec& delta, const Vec& mu) {
    if (delta.size() != mu.size()) {
        throw std::invalid_argument("modulation_matrix: delta and mu lengths differ");
    }
    const Index n = delta.size();
    Mat out = Mat::Zero(2 * n, n);
    for (Index j = 0; j < n; ++j) {
        out(2 * j, j) = mu[j] * std::cos(delta[j]);
        out(2 * j + 1, j) = mu[j] * std::sin(delta[j]);
    }
    return out;
}

Mat build_psi(const Vec& b) {
    const Index n = b.size();
    Mat out = Mat::Zero(2 * n, n);
    for (Index j = 0; j < n; ++j) {
        out(2 * j, j) = b[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// vector field

namespace {

void check_dims(const Vec& x, const GridParameters& p) {
    if (x.size() != p.layout().dim()) {
        throw std::invalid_argument("vector_field: state has length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(p.layout().dim()));
    }
}

}  // namespace

void vector_field(const Vec& x, const GridParameters& p, const ControllerKind& ctl, Vec& out) {
    check_dims(x, p);
    const Index n = p.n;
    const Index m = p.m;
    const StateLayout lay = p.layout();
    out.resize(lay.dim());

    const auto delta = x.segment(lay.delta(), n);
    const auto idcn = x.segment(lay.i_dc_n(), m);
    const auto idcg = x.segment(lay.i_dc_g(), n);
    const auto vdc = x.segment(lay.v_dc(), n);
    const auto i = x.segment(lay.i(), 2 * n);
    const auto v = x.segment(lay.v(), 2 * n);
    const auto ig = x.segment(lay.i_g(), 2 * n);
    const auto w = x.segment(lay.omega_g(), n);
    const auto tm = x.segment(lay.T_m(), n);

    // converter frequency
    const bool power_variant = ctl.variant == ControllerKind::Variant::HacPower;
    for (Index j = 0; j < n; ++j) {
        double sin_term;
        if (power_variant) {
            const double pj = v[2 * j] * ig[2 * j] + v[2 * j + 1] * ig[2 * j + 1];
            sin_term = std::sin(0.5 * (pj - ctl.p_r[j]));
        } else {
            sin_term = std::sin(0.5 * angle_difference(delta[j], p.delta_r[j]));
        }
        const double omega_c =
            p.omega_r[j] + p.eta[j] * (vdc[j] - p.v_dc_r[j]) - p.gamma[j] * sin_term;
        out[lay.delta() + j] = omega_c - w[j];
    }

    // dc edges: -B^T v_dc - R_dc i_dc_n
    for (Index k = 0; k < m; ++k) {
        out[lay.i_dc_n() + k] = -p.B.col(k).dot(vdc) - p.R_dc[k] * idcn[k];
    }

    for (Index j = 0; j < n; ++j) {
        const double cd = std::cos(delta[j]);
        const double sd = std::sin(delta[j]);
        const double md = p.mu[j] * cd;
        const double mq = p.mu[j] * sd;
        const double id = i[2 * j], iq = i[2 * j + 1];
        const double vd = v[2 * j], vq = v[2 * j + 1];
        const double gd = ig[2 * j], gq = ig[2 * j + 1];
        const double wj = w[j];

        out[lay.i_dc_g() + j] =
            p.i_dc_r[j] - p.kappa_dc[j] * (vdc[j] - p.v_dc_r[j]) - idcg[j];

        double edge_in = 0.0;
        for (Index k = 0; k < m; ++k) {
            edge_in += p.B(j, k) * idcn[k];
        }
        out[lay.v_dc() + j] = idcg[j] + edge_in - p.G_dc[j] * vdc[j] - (md * id + mq * iq) +
                              p.i_dc_inj[j];

        // J2 = [0 -1; 1 0], so (w J2) z = w (-z_q, z_d)
        const double Lw = p.L[j] * wj;
        out[lay.i() + 2 * j] = md * vdc[j] - p.R[j] * id - Lw * iq - vd;
        out[lay.i() + 2 * j + 1] = mq * vdc[j] - p.R[j] * iq + Lw * id - vq;

        const double Cw = p.C[j] * wj;
        out[lay.v() + 2 * j] = id - p.G[j] * vd - Cw * vq - gd;
        out[lay.v() + 2 * j + 1] = iq - p.G[j] * vq + Cw * vd - gq;

        const double Lgw = p.L_g[j] * wj;
        out[lay.i_g() + 2 * j] = vd - p.R_g[j] * gd - Lgw * gq - p.b[j] * wj;
        out[lay.i_g() + 2 * j + 1] = vq - p.R_g[j] * gq + Lgw * gd;

        out[lay.omega_g() + j] =
            tm[j] - p.D_f[j] * wj - p.D_d[j] * (wj - p.omega_r[j]) + p.b[j] * gd;
        out[lay.T_m() + j] = p.T_r[j] - p.kappa_g[j] * (wj - p.omega_r[j]) - tm[j];
    }
}

Vec vector_field(const Vec& x, const GridParameters& p, const ControllerKind& ctl) {
    Vec out;
    vector_field(x, p, ctl, out);
    return out;
}

Vec vector_field(const SystemState& x, const GridParameters& p, const ControllerKind& ctl) {
    return vector_field(x.flat(), p, ctl);
}

void state_derivative(const Vec& x, const GridParameters& p, const ControllerKind& ctl,
                      const Vec& inv_mass, Vec& out) {
    vector_field(x, p, ctl, out);
    out.array() *= inv_mass.array();
}

// ---------------------------------------------------------------------------
// error coordinates

Vec error_vector_field(const Vec& xhat, const Vec& xstar, const GridParameters& p) {
    check_dims(xhat, p);
    check_dims(xstar, p);
    const Index n = p.n;
    const Index m = p.m;
    const StateLayout lay = p.layout();
    const SystemState e = SystemState::from_flat(xhat, n, m);
    const SystemState s = SystemState::from_flat(xstar, n, m);

    Vec delta(n);
    for (Index j = 0; j < n; ++j) {
        delta[j] = wrap_angle(xhat[j] + xstar[j]);
    }
    const Vec omega = s.omega_g + e.omega_g;
    const Mat mod = modulation_matrix(delta, p.mu);
    const Mat E = mod - modulation_matrix(s.delta, p.mu);
    const Mat psi = build_psi(p.b);

    // rotation by omega_j J2 applied per converter to a stacked 2n-vector
    auto rotate = [n](const Vec& scale, const Vec& z) {
        Vec r(2 * n);
        for (Index j = 0; j < n; ++j) {
            r[2 * j] = -scale[j] * z[2 * j + 1];
            r[2 * j + 1] = scale[j] * z[2 * j];
        }
        return r;
    };
    auto pairs = [n](const Vec& v) {
        Vec out(2 * n);
        for (Index j = 0; j < n; ++j) {
            out[2 * j] = out[2 * j + 1] = v[j];
        }
        return out;
    };
    const Vec R2 = pairs(p.R), G2 = pairs(p.G), Rg2 = pairs(p.R_g);

    Vec out(lay.dim());
    Vec half_sin(n);
    for (Index j = 0; j < n; ++j) {
        // reduces to sin(delta_hat / 2) about the desired equilibrium
        half_sin[j] = std::sin(0.5 * (e.delta[j] + s.delta[j] - p.delta_r[j]));
    }
    out.segment(lay.delta(), n) = p.eta.cwiseProduct(e.v_dc) - p.gamma.cwiseProduct(half_sin) -
                                  e.omega_g;
    out.segment(lay.i_dc_n(), m) = -p.B.transpose() * e.v_dc - p.R_dc.cwiseProduct(e.i_dc_n);
    out.segment(lay.i_dc_g(), n) = -p.kappa_dc.cwiseProduct(e.v_dc) - e.i_dc_g;
    out.segment(lay.v_dc(), n) = e.i_dc_g + p.B * e.i_dc_n - p.G_dc.cwiseProduct(e.v_dc) -
                                 E.transpose() * s.i - mod.transpose() * e.i;
    out.segment(lay.i(), 2 * n) = mod * e.v_dc + E * s.v_dc - R2.cwiseProduct(e.i) +
                                  rotate(p.L.cwiseProduct(omega), e.i) +
                                  rotate(p.L.cwiseProduct(e.omega_g), s.i) - e.v;
    out.segment(lay.v(), 2 * n) = e.i - G2.cwiseProduct(e.v) + rotate(p.C.cwiseProduct(omega), e.v) +
                                  rotate(p.C.cwiseProduct(e.omega_g), s.v) - e.i_g;
    out.segment(lay.i_g(), 2 * n) = e.v - Rg2.cwiseProduct(e.i_g) +
                                    rotate(p.L_g.cwiseProduct(omega), e.i_g) +
                                    rotate(p.L_g.cwiseProduct(e.omega_g), s.i_g) -
                                    psi * e.omega_g;
    out.segment(lay.omega_g(), n) =
        e.T_m - p.damping().cwiseProduct(e.omega_g) + psi.transpose() * e.i_g;
    out.segment(lay.T_m(), n) = -p.kappa_g.cwiseProduct(e.omega_g) - e.T_m;
    return out;
}

// ---------------------------------------------------------------------------
// Jacobian

Mat jacobian(const Vec& x, const GridParameters& p) {
    check_dims(x, p);
    const Index n = p.n;
    const Index m = p.m;
    const StateLayout lay = p.layout();
    Mat Jac = Mat::Zero(lay.dim(), lay.dim());

    const Index D = lay.delta(), IN = lay.i_dc_n(), IG = lay.i_dc_g(), VD = lay.v_dc(),
                I = lay.i(), V = lay.v(), G = lay.i_g(), W = lay.omega_g(), T = lay.T_m();

    for (Index k = 0; k < m; ++k) {
        for (Index j = 0; j < n; ++j) {
            Jac(IN + k, VD + j) = -p.B(j, k);
            Jac(VD + j, IN + k) = p.B(j, k);
        }
        Jac(IN + k, IN + k) = -p.R_dc[k];
    }

    for (Index j = 0; j < n; ++j) {
        const double dj = x[D + j];
        const double cd = std::cos(dj), sd = std::sin(dj);
        const double mu = p.mu[j];
        const double vdc = x[VD + j];
        const double w = x[W + j];
        const double id = x[I + 2 * j], iq = x[I + 2 * j + 1];
        const double vd = x[V + 2 * j], vq = x[V + 2 * j + 1];
        const double gd = x[G + 2 * j], gq = x[G + 2 * j + 1];

        Jac(D + j, D + j) = -0.5 * p.gamma[j] * std::cos(0.5 * angle_difference(dj, p.delta_r[j]));
        Jac(D + j, VD + j) = p.eta[j];
        Jac(D + j, W + j) = -1.0;

        Jac(IG + j, VD + j) = -p.kappa_dc[j];
        Jac(IG + j, IG + j) = -1.0;

        Jac(VD + j, IG + j) = 1.0;
        Jac(VD + j, VD + j) = -p.G_dc[j];
        Jac(VD + j, I + 2 * j) = -mu * cd;
        Jac(VD + j, I + 2 * j + 1) = -mu * sd;
        Jac(VD + j, D + j) = -mu * (-sd * id + cd * iq);

        // filter current
        Jac(I + 2 * j, D + j) = -mu * sd * vdc;
        Jac(I + 2 * j + 1, D + j) = mu * cd * vdc;
        Jac(I + 2 * j, VD + j) = mu * cd;
        Jac(I + 2 * j + 1, VD + j) = mu * sd;
        Jac(I + 2 * j, I + 2 * j) = -p.R[j];
        Jac(I + 2 * j, I + 2 * j + 1) = -p.L[j] * w;
        Jac(I + 2 * j + 1, I + 2 * j) = p.L[j] * w;
        Jac(I + 2 * j + 1, I + 2 * j + 1) = -p.R[j];
        Jac(I + 2 * j, W + j) = -p.L[j] * iq;
        Jac(I + 2 * j + 1, W + j) = p.L[j] * id;
        Jac(I + 2 * j, V + 2 * j) = -1.0;
        Jac(I + 2 * j + 1, V + 2 * j + 1) = -1.0;

        // filter voltage
        Jac(V + 2 * j, I + 2 * j) = 1.0;
        Jac(V + 2 * j + 1, I + 2 * j + 1) = 1.0;
        Jac(V + 2 * j, V + 2 * j) = -p.G[j];
        Jac(V + 2 * j, V + 2 * j + 1) = -p.C[j] * w;
        Jac(V + 2 * j + 1, V + 2 * j) = p.C[j] * w;
        Jac(V + 2 * j + 1, V + 2 * j + 1) = -p.G[j];
        Jac(V + 2 * j, W + j) = -p.C[j] * vq;
        Jac(V + 2 * j + 1, W + j) = p.C[j] * vd;
        Jac(V + 2 * j, G + 2 * j) = -1.0;
        Jac(V + 2 * j + 1, G + 2 * j + 1) = -1.0;

        // line current
        Jac(G + 2 * j, V + 2 * j) = 1.0;
        Jac(G + 2 * j + 1, V + 2 * j + 1) = 1.0;
        Jac(G + 2 * j, G + 2 * j) = -p.R_g[j];
        Jac(G + 2 * j, G + 2 * j + 1) = -p.L_g[j] * w;
        Jac(G + 2 * j + 1, G + 2 * j) = p.L_g[j] * w;
        Jac(G + 2 * j + 1, G + 2 * j + 1) = -p.R_g[j];
        Jac(G + 2 * j, W + j) = -p.L_g[j] * gq - p.b[j];
        Jac(G + 2 * j + 1, W + j) = p.L_g[j] * gd;

        Jac(W + j, T + j) = 1.0;
        Jac(W + j, W + j) = -(p.D_f[j] + p.D_d[j]);
        Jac(W + j, G + 2 * j) = p.b[j];

        Jac(T + j, W + j) = -p.kappa_g[j];
        Jac(T + j, T + j) = -1.0;
    }
    return Jac;
}

Mat jacobian_fd(const Vec& x, const GridParameters& p, double step) {
    check_dims(x, p);
    const Index dim = x.size();
    Mat Jac(dim, dim);
    Vec xp = x, xm = x, fp, fm;
    const ControllerKind ctl;
    for (Index c = 0; c < dim; ++c) {
        xp[c] = x[c] + step;
        xm[c] = x[c] - step;
        vector_field(xp, p, ctl, fp);
        vector_field(xm, p, ctl, fm);
        Jac.col(c) = (fp - fm) / (2.0 * step);
        xp[c] = x[c];
        xm[c] = x[c];
    }
    return Jac;
}

}  // namespace hgl
