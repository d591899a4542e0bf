#include "catch_amalgamated.hpp"

#include "hgl/equilibria.hpp"
#include "hgl/model.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace hgl;
using Catch::Matchers::WithinAbs;

constexpr double pi = std::numbers::pi;

TEST_CASE("wrap_angle maps onto [-2pi, 2pi)") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK_THAT(wrap_angle(4 * pi), WithinAbs(0.0, 1e-15));
    CHECK_THAT(wrap_angle(3 * pi), WithinAbs(-pi, 1e-15));
    CHECK(wrap_angle(-kTwoPi) == -kTwoPi);
    CHECK_THAT(wrap_angle(kTwoPi), WithinAbs(-kTwoPi, 1e-15));
    CHECK_THROWS_AS(wrap_angle(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(wrap_angle(INFINITY), std::invalid_argument);
}

TEST_CASE("wrap_angle is idempotent and 4pi-periodic") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 1000; ++k) {
        const double theta = test::uniform(rng, -60.0, 60.0);
        const double w = wrap_angle(theta);
        REQUIRE(w >= -kTwoPi);
        REQUIRE(w < kTwoPi);
        REQUIRE(wrap_angle(w) == w);
        REQUIRE_THAT(wrap_angle(theta + kFourPi), WithinAbs(w, 1e-12));
        REQUIRE_THAT(std::remainder(w - theta, kFourPi), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("modulation matrix places mu r(delta) in each unit's rows") {
    const Mat m1 = modulation_matrix(Vec::Zero(1), Vec::Constant(1, 0.5));
    CHECK(m1(0, 0) == 0.5);
    CHECK(m1(1, 0) == 0.0);

    Vec delta(2);
    delta << 0.0, pi / 2;
    const Mat m2 = modulation_matrix(delta, Vec::Constant(2, 0.5));
    CHECK(m2.rows() == 4);
    CHECK(m2.cols() == 2);
    CHECK(m2(0, 0) == 0.5);
    CHECK(m2.col(0).tail(3).isZero());
    CHECK(m2.col(1).head(3).norm() < 1e-16);
    CHECK_THAT(m2(3, 1), WithinAbs(0.5, 1e-16));

    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const Vec d = test::uniform_vec(rng, 4, -6.0, 6.0);
        const Vec mu = test::uniform_vec(rng, 4, 0.1, 0.5);
        const Mat m = modulation_matrix(d, mu);
        for (Index j = 0; j < 4; ++j) {
            REQUIRE_THAT(m.col(j).norm(), WithinAbs(mu[j], 1e-15));
            for (Index l = j + 1; l < 4; ++l) REQUIRE(m.col(j).dot(m.col(l)) == 0.0);
        }
        const Vec i = test::uniform_vec(rng, 8, -2.0, 2.0);
        REQUIRE((m.transpose() * i).norm() <= mu.maxCoeff() * i.norm() + 1e-14);
    }
}

TEST_CASE("psi selects the d components") {
    const Mat psi1 = build_psi(Vec::Constant(1, 1.2));
    CHECK(psi1(0, 0) == 1.2);
    CHECK(psi1(1, 0) == 0.0);

    const Mat psi2 = build_psi(Vec::Ones(2));
    Vec ig(4);
    ig << 0.3, -0.7, 1.1, 2.0;
    const Vec sel = psi2.transpose() * ig;
    CHECK(sel[0] == 0.3);
    CHECK(sel[1] == 1.1);

    Vec w(2);
    w << 0.9, 1.1;
    Vec b(2);
    b << 2.0, 3.0;
    const Vec pw = build_psi(b) * w;
    CHECK(pw[0] == 1.8);
    CHECK(pw[1] == 0.0);
    CHECK_THAT(pw[2], WithinAbs(3.3, 1e-15));
    CHECK(pw[3] == 0.0);
}

TEST_CASE("incidence matrix from pairs") {
    const Mat B = incidence_from_pairs(3, {{0, 1}, {2, 1}});
    CHECK(B(0, 0) == -1);
    CHECK(B(1, 0) == 1);
    CHECK(B(2, 1) == -1);
    CHECK(B(1, 1) == 1);
    CHECK(B.colwise().sum().isZero());
    CHECK_THROWS_AS(incidence_from_pairs(2, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(incidence_from_pairs(2, {{0, 2}}), std::invalid_argument);
}

TEST_CASE("state layout dimensions") {
    const StateLayout l{2, 1};
    CHECK(l.dim() == 23);
    CHECK(l.y_dim() == 21);
    CHECK(l.names().size() == 23);
    CHECK(l.names().front() == "delta_0");
    CHECK(l.names().back() == "T_m_1");

    const GridParameters p = default_grid(2, 1);
    CHECK(vector_field(Vec(Vec::Zero(23)), p).size() == 23);
    CHECK(MassMatrix::from(p).diagonal().size() == 23);
    CHECK((MassMatrix::from(p).diagonal().array() > 0).all());
    CHECK_THROWS_AS(vector_field(Vec(Vec::Zero(21)), p), std::invalid_argument);
}

TEST_CASE("SystemState round trip") {
    std::mt19937_64 rng(5);
    const Vec x = test::uniform_vec(rng, 23, -1, 1);
    const SystemState s = SystemState::from_flat(x, 2, 1);
    CHECK(s.i.size() == 4);
    CHECK(s.i_dc_n.size() == 1);
    CHECK(s.flat() == x);
    SystemState w = SystemState::from_flat(x, 2, 1);
    w.delta[0] = 7.0;
    w.wrap();
    CHECK_THAT(w.delta[0], WithinAbs(7.0 - kFourPi, 1e-15));
}

TEST_CASE("parameter validation rejects out-of-range values") {
    GridParameters p = default_grid(2, 1);
    p.gamma = Vec::Constant(2, 1.0);
    CHECK_NOTHROW(p.validate());

    auto rejects = [&](auto mutate) {
        GridParameters q = p;
        mutate(q);
        CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    };
    rejects([](GridParameters& q) { q.mu[0] = 0.7; });
    rejects([](GridParameters& q) { q.mu[1] = 0.0; });
    rejects([](GridParameters& q) { q.R[0] = -0.1; });
    rejects([](GridParameters& q) { q.J[1] = 0.0; });
    rejects([](GridParameters& q) { q.R_dc[0] = 0.0; });
    rejects([](GridParameters& q) { q.delta_r[0] = kTwoPi; });
    rejects([](GridParameters& q) { q.B(0, 0) = 1.0; });
    rejects([](GridParameters& q) { q.eta.resize(1); });

    try {
        GridParameters q = p;
        q.mu[0] = 0.7;
        q.validate();
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mu must lie in (0, 0.5]") != std::string::npos);
    }
}

TEST_CASE("vector field matches the straight-line single-unit transcription") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        GridParameters p = test::random_grid(rng, 1, 0);
        p.T_r[0] = test::uniform(rng, -1, 1);
        p.i_dc_r[0] = test::uniform(rng, -1, 1);
        std::array<double, 11> xo{};
        Vec x(11);
        for (int k = 0; k < 11; ++k) {
            xo[k] = x[k] = test::uniform(rng, -2, 2);
        }
        const auto fo = oracle::single_unit_field(xo, p);
        const Vec f = vector_field(x, p);
        double scale = 1.0;
        for (double v : fo) scale = std::max(scale, std::abs(v));
        for (int k = 0; k < 11; ++k) {
            REQUIRE_THAT(f[k], WithinAbs(fo[k], 1e-12 * scale));
        }
    }
}

TEST_CASE("rotation terms are lossless") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 3;
        const Vec z = test::uniform_vec(rng, 2 * n, -3, 3);
        const Vec w = test::uniform_vec(rng, n, 0.5, 1.5);
        const Vec X = test::uniform_vec(rng, n, 0.05, 0.5);
        double power = 0.0;
        for (Index j = 0; j < n; ++j) {
            // z^T (X w J2) z with J2 z = (-z_q, z_d)
            power += X[j] * w[j] * (z[2 * j] * -z[2 * j + 1] + z[2 * j + 1] * z[2 * j]);
        }
        REQUIRE_THAT(power, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("error vector field agrees with the shifted vector field") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 150; ++trial) {
        const auto [n, m] = test::random_size(rng);
        const GridParameters p = test::random_certified_grid(rng, n, m);
        const EquilibriumSet eq = solve_stationary(p);
        const Vec& xs = eq.stable().x;
        Vec xhat = test::uniform_vec(rng, xs.size(), -1.0, 1.0);
        for (Index j = 0; j < n; ++j) xhat[j] = test::uniform(rng, -kTwoPi, kTwoPi);

        Vec shifted = xhat + xs;
        wrap_angles(shifted, n);
        const Vec a = error_vector_field(xhat, xs, p);
        const Vec b = vector_field(shifted, p);
        REQUIRE((a - b).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("error vector field vanishes at the equilibria") {
    const GridParameters p = default_certified_grid(2, 1);
    const EquilibriumSet eq = solve_stationary(p);
    const Vec& xs = eq.stable().x;
    CHECK(error_vector_field(Vec::Zero(xs.size()), xs, p).cwiseAbs().maxCoeff() <= 1e-10);

    Vec xhat = Vec::Zero(xs.size());
    xhat[0] = kTwoPi;
    const Vec f = error_vector_field(xhat, xs, p);
    CHECK_THAT(f[0], WithinAbs(0.0, 1e-12));
    CHECK(f.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("analytic Jacobian matches central differences") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto [n, m] = test::random_size(rng);
        const GridParameters p = test::random_certified_grid(rng, n, m);
        Vec x = test::uniform_vec(rng, p.layout().dim(), -1.5, 1.5);
        const Mat Ja = jacobian(x, p);
        const Mat Jf = jacobian_fd(x, p);
        REQUIRE((Ja - Jf).cwiseAbs().maxCoeff() / std::max(1.0, Ja.cwiseAbs().maxCoeff()) < 1e-6);
    }
}
