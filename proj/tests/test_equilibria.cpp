#include "catch_amalgamated.hpp"

#include "hgl/equilibria.hpp"
#include "hgl/model.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>

using namespace hgl;
using Catch::Matchers::WithinAbs;

TEST_CASE("default grid: four exact equilibria, one stable candidate") {
    const GridParameters p = default_certified_grid(2, 1);
    const EquilibriumSet eq = solve_stationary(p);
    REQUIRE(eq.points.size() == 4);
    CHECK(equilibrium_residual(eq, p) <= kEquilibriumTolerance);
    int stable = 0;
    for (const auto& pt : eq.points) {
        if (pt.kind == EquilibriumKind::StableCandidate) ++stable;
        CHECK(vector_field(pt.x, p).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(pt.x.tail(21) == eq.y_star);
        for (Index j = 0; j < 2; ++j) {
            const double expected = (pt.pattern >> j) & 1u ? wrap_angle(p.delta_r[j] + kTwoPi) : p.delta_r[j];
            CHECK(pt.x[j] == expected);
        }
    }
    CHECK(stable == 1);
    CHECK(eq.stable().kind == EquilibriumKind::StableCandidate);
    CHECK(eq.stable().pattern == 0);
    CHECK(to_string(EquilibriumKind::Saddle) == "saddle");
}

TEST_CASE("equilibrium points are pairwise distinct") {
    const GridParameters p = default_certified_grid(3, 2);
    const EquilibriumSet eq = solve_stationary(p);
    REQUIRE(eq.points.size() == 8);
    for (std::size_t a = 0; a < eq.points.size(); ++a) {
        for (std::size_t b = a + 1; b < eq.points.size(); ++b) {
            CHECK((eq.points[a].x - eq.points[b].x).cwiseAbs().maxCoeff() > 1.0);
        }
    }
}

TEST_CASE("stationary filter states match per-unit elimination") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [n, m] = test::random_size(rng);
        const GridParameters p = synthesize_references(test::random_grid(rng, n, m));
        const EquilibriumSet eq = solve_stationary(p);
        const SystemState s = eq.stable_state();
        for (Index j = 0; j < n; ++j) {
            const auto o = oracle::unit_stationary(p, j);
            REQUIRE_THAT(s.i[2 * j], WithinAbs(o[0], 1e-12));
            REQUIRE_THAT(s.i[2 * j + 1], WithinAbs(o[1], 1e-12));
            REQUIRE_THAT(s.v[2 * j], WithinAbs(o[2], 1e-12));
            REQUIRE_THAT(s.v[2 * j + 1], WithinAbs(o[3], 1e-12));
            REQUIRE_THAT(s.i_g[2 * j], WithinAbs(o[4], 1e-12));
            REQUIRE_THAT(s.i_g[2 * j + 1], WithinAbs(o[5], 1e-12));
        }
        for (Index e = 0; e < m; ++e) {
            double flow = 0.0;
            for (Index j = 0; j < n; ++j) flow += p.B(j, e) * p.v_dc_r[j];
            REQUIRE_THAT(s.i_dc_n[e], WithinAbs(-flow / p.R_dc[e], 1e-13));
        }
        CHECK(s.omega_g == p.omega_r);
        CHECK(s.v_dc == p.v_dc_r);
    }
}

TEST_CASE("synthesized references close the torque and dc balances") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [n, m] = test::random_size(rng);
        const GridParameters p = synthesize_references(test::random_grid(rng, n, m));
        const EquilibriumSet eq = solve_stationary(p);
        const SystemState s = eq.stable_state();
        for (Index j = 0; j < n; ++j) {
            REQUIRE_THAT(p.T_r[j], WithinAbs(p.D_f[j] * p.omega_r[j] - p.b[j] * s.i_g[2 * j], 1e-13));
            double node_in = 0.0;
            for (Index e = 0; e < m; ++e) node_in += p.B(j, e) * s.i_dc_n[e];
            const double load = p.mu[j] * (std::cos(p.delta_r[j]) * s.i[2 * j] + std::sin(p.delta_r[j]) * s.i[2 * j + 1]);
            REQUIRE_THAT(p.i_dc_r[j], WithinAbs(p.G_dc[j] * p.v_dc_r[j] + load - node_in - p.i_dc_inj[j], 1e-13));
        }
        REQUIRE(equilibrium_residual(eq, p) <= kEquilibriumTolerance);
    }
}

TEST_CASE("symmetric part of F is negative definite with the smallest loss on top") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const auto [n, m] = test::random_size(rng);
        const GridParameters p = test::random_grid(rng, n, m);
        const FSystem sys = build_F_h(p.delta_r, p.omega_r, p.v_dc_r, p);
        const Mat sym = 0.5 * (sys.F + sys.F.transpose());
        const Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
        const double expected = -std::min({p.R.minCoeff(), p.G.minCoeff(), p.R_g.minCoeff()});
        REQUIRE_THAT(es.eigenvalues().maxCoeff(), WithinAbs(expected, 1e-12));
    }
}

TEST_CASE("enumeration limits") {
    EquilibriumSet base;
    base.n = kMaxEnumeratedUnits + 1;
    base.m = 0;
    base.y_star = Vec::Zero(10 * base.n);
    base.points.push_back({Vec::Zero(11 * base.n), EquilibriumKind::StableCandidate, 0});
    CHECK_THROWS_AS(enumerate_equilibria(base), std::invalid_argument);
}

TEST_CASE("single unit without dc lines") {
    const GridParameters p = default_certified_grid(1, 0);
    const EquilibriumSet eq = solve_stationary(p);
    CHECK(eq.points.size() == 2);
    CHECK(eq.y_star.size() == 10);
    CHECK(equilibrium_residual(eq, p) <= kEquilibriumTolerance);
}

TEST_CASE("unsynthesized references leave a residual") {
    GridParameters p = default_grid(2, 1);
    p.gamma = Vec::Constant(2, 10.0);
    const EquilibriumSet eq = solve_stationary(p);
    CHECK(equilibrium_residual(eq, p) > 1e-3);
}
