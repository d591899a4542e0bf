#include "hgl/equilibria.hpp"

#include "hgl/model.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace hgl {

std::string to_string(EquilibriumKind kind) {
    return kind == EquilibriumKind::StableCandidate ? "stable-candidate" : "saddle";
}

FSystem build_F_h(const Vec& delta_star, const Vec& omega_star, const Vec& v_dc_star,
                  const GridParameters& p) {
    const Index n = p.n;
    const Index N = 2 * n;
    FSystem sys;
    sys.F = Mat::Zero(3 * N, 3 * N);
    sys.h = Vec::Zero(3 * N);

    // -(Z - X w (x) J2) with J2 = [0 -1; 1 0]
    auto impedance_block = [&](Index row0, Index col0, const Vec& Z, const Vec& X) {
        for (Index j = 0; j < n; ++j) {
            const Index r = row0 + 2 * j;
            const Index c = col0 + 2 * j;
            const double xw = X[j] * omega_star[j];
            sys.F(r, c) = -Z[j];
            sys.F(r, c + 1) = -xw;
            sys.F(r + 1, c) = xw;
            sys.F(r + 1, c + 1) = -Z[j];
        }
    };
    impedance_block(0, 0, p.R, p.L);
    impedance_block(N, N, p.G, p.C);
    impedance_block(2 * N, 2 * N, p.R_g, p.L_g);
    sys.F.block(0, N, N, N) = -Mat::Identity(N, N);
    sys.F.block(N, 0, N, N) = Mat::Identity(N, N);
    sys.F.block(N, 2 * N, N, N) = -Mat::Identity(N, N);
    sys.F.block(2 * N, N, N, N) = Mat::Identity(N, N);

    const Mat mod = modulation_matrix(delta_star, p.mu);
    sys.h.segment(0, N) = -mod * v_dc_star;
    sys.h.segment(2 * N, N) = build_psi(p.b) * omega_star;
    return sys;
}

namespace {

Vec solve_filter_states(const GridParameters& p, const Vec& delta_star) {
    const FSystem sys = build_F_h(delta_star, p.omega_r, p.v_dc_r, p);
    const Eigen::PartialPivLU<Mat> lu(sys.F);
    // partial pivoting has no rank report; gauge singularity by the pivots
    const Mat& U = lu.matrixLU();
    const double scale = std::max(1.0, sys.F.cwiseAbs().maxCoeff());
    const double min_pivot = U.diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot > 1e-13 * scale)) {
        throw SolverError("solve_stationary: filter/line matrix F is numerically singular");
    }
    Vec ybar = lu.solve(sys.h);
    if (!ybar.allFinite()) {
        throw SolverError("solve_stationary: non-finite solution");
    }
    return ybar;
}

}  // namespace

EquilibriumSet solve_stationary(const GridParameters& p) {
    p.validate();
    const Index n = p.n;
    const Index m = p.m;
    const StateLayout lay = p.layout();

    const Vec ybar = solve_filter_states(p, p.delta_r);

    Vec x(lay.dim());
    x.segment(lay.delta(), n) = p.delta_r;
    // R_dc i_dc_n = -B^T v_dc_r
    x.segment(lay.i_dc_n(), m) = (-(p.B.transpose() * p.v_dc_r)).cwiseQuotient(p.R_dc);
    x.segment(lay.i_dc_g(), n) = p.i_dc_r;
    x.segment(lay.v_dc(), n) = p.v_dc_r;
    x.segment(lay.i(), 6 * n) = ybar;
    x.segment(lay.omega_g(), n) = p.omega_r;
    x.segment(lay.T_m(), n) = p.T_r;

    EquilibriumSet base;
    base.n = n;
    base.m = m;
    base.y_star = x.tail(lay.y_dim());
    base.T_r = p.T_r;
    base.i_dc_r = p.i_dc_r;
    base.points.push_back({x, EquilibriumKind::StableCandidate, 0});
    return enumerate_equilibria(base);
}

GridParameters synthesize_references(const GridParameters& p) {
    p.validate();
    const Index n = p.n;
    const Vec ybar = solve_filter_states(p, p.delta_r);
    const Vec i_star = ybar.segment(0, 2 * n);
    const Vec ig_star = ybar.segment(4 * n, 2 * n);
    const Vec idcn_star = (-(p.B.transpose() * p.v_dc_r)).cwiseQuotient(p.R_dc);

    GridParameters out = p;
    out.T_r = p.D_f.cwiseProduct(p.omega_r) - build_psi(p.b).transpose() * ig_star;
    out.i_dc_r = p.G_dc.cwiseProduct(p.v_dc_r) +
                 modulation_matrix(p.delta_r, p.mu).transpose() * i_star - p.B * idcn_star -
                 p.i_dc_inj;
    return out;
}

EquilibriumSet enumerate_equilibria(const EquilibriumSet& base) {
    if (base.n > kMaxEnumeratedUnits) {
        throw std::invalid_argument("enumerate_equilibria: refusing to enumerate 2^" +
                                    std::to_string(base.n) + " equilibria");
    }
    if (base.points.empty()) {
        throw std::invalid_argument("enumerate_equilibria: base set has no solved point");
    }
    const Index n = base.n;
    const Vec& x0 = base.stable().x;
    Vec delta_r = x0.head(n);

    EquilibriumSet out = base;
    out.points.clear();
    const std::uint32_t count = std::uint32_t{1} << n;
    out.points.reserve(count);
    for (std::uint32_t pattern = 0; pattern < count; ++pattern) {
        Vec x = x0;
        for (Index j = 0; j < n; ++j) {
            if (pattern & (std::uint32_t{1} << j)) {
                x[j] = wrap_angle(delta_r[j] + kTwoPi);
            }
        }
        out.points.push_back(
            {std::move(x),
             pattern == 0 ? EquilibriumKind::StableCandidate : EquilibriumKind::Saddle, pattern});
    }
    return out;
}

double equilibrium_residual(const EquilibriumSet& set, const GridParameters& p) {
    double worst = 0.0;
    Vec f;
    for (const auto& pt : set.points) {
        vector_field(pt.x, p, ControllerKind::angle(), f);
        worst = std::max(worst, f.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace hgl
