#include "catch_amalgamated.hpp"

#include "hgl/controller.hpp"
#include "hgl/model.hpp"

#include <cmath>
#include <numbers>

using namespace hgl;
using Catch::Matchers::WithinAbs;

namespace {

GridParameters unit_grid() {
    GridParameters p = default_grid(1, 0);
    p.gamma = Vec::Constant(1, 2.0);
    p.eta = Vec::Constant(1, 0.5);
    p.delta_r = Vec::Zero(1);
    return p;
}

}  // namespace

TEST_CASE("HAC frequency at the reference is the nominal frequency") {
    const GridParameters p = unit_grid();
    const Vec w = hac_frequency(Vec::Zero(1), p.v_dc_r, p);
    CHECK(w[0] == p.omega_r[0]);
}

TEST_CASE("HAC frequency terms") {
    const GridParameters p = unit_grid();
    Vec delta(1);
    delta << std::numbers::pi;
    // sin(pi/2) = 1 drives the angle back with full gain
    CHECK_THAT(hac_frequency(delta, p.v_dc_r, p)[0], WithinAbs(1.0 - 2.0, 1e-15));

    Vec vdc = p.v_dc_r;
    vdc[0] += 0.1;
    CHECK_THAT(hac_frequency(Vec::Zero(1), vdc, p)[0], WithinAbs(1.0 + 0.05, 1e-15));

    // the half-angle term is the same on either representative of an angle
    Vec d1(1), d2(1);
    d1 << 1.3;
    d2 << 1.3 + 4 * std::numbers::pi;
    CHECK_THAT(hac_frequency(d1, vdc, p)[0], WithinAbs(hac_frequency(d2, vdc, p)[0], 1e-13));
}

TEST_CASE("HAC frequency is the first row of the vector field") {
    GridParameters p = default_grid(2, 1);
    p.gamma = Vec::Constant(2, 10.0);
    Vec x = Vec::Zero(p.layout().dim());
    x[0] = 0.4;
    x[1] = -2.0;
    x.segment(p.layout().v_dc(), 2) << 1.05, 0.97;
    x.segment(p.layout().omega_g(), 2) << 1.01, 0.99;
    const Vec f = vector_field(x, p);
    const Vec wc = hac_frequency(x.head(2), x.segment(p.layout().v_dc(), 2), p);
    CHECK_THAT(f[0], WithinAbs(wc[0] - 1.01, 1e-15));
    CHECK_THAT(f[1], WithinAbs(wc[1] - 0.99, 1e-15));
}

TEST_CASE("power variant") {
    const GridParameters p = unit_grid();
    Vec pflow(1), p_r(1);
    pflow << 0.3;
    p_r << 0.3;
    const PowerFrequency pf = hac_power_frequency(pflow, p.v_dc_r, p, p_r);
    CHECK(pf.omega_c[0] == 1.0);
    CHECK(pf.out_of_domain.empty());

    pflow << 0.3 + 7.0;
    const PowerFrequency far = hac_power_frequency(pflow, p.v_dc_r, p, p_r);
    REQUIRE(far.out_of_domain.size() == 1);
    CHECK(std::isfinite(far.omega_c[0]));
    CHECK_THAT(far.omega_c[0], WithinAbs(1.0 - 2.0 * std::sin(3.5), 1e-14));
}

TEST_CASE("active power is the dq inner product") {
    Vec v(4), ig(4);
    v << 1.0, 0.5, -0.2, 0.3;
    ig << 0.4, -0.2, 1.0, 2.0;
    const Vec pw = active_power(v, ig);
    CHECK_THAT(pw[0], WithinAbs(0.4 - 0.1, 1e-15));
    CHECK_THAT(pw[1], WithinAbs(-0.2 + 0.6, 1e-15));
}

TEST_CASE("controller validation") {
    CHECK_NOTHROW(ControllerKind::angle().validate(2));
    CHECK_THROWS_AS(ControllerKind::power(Vec::Zero(1)).validate(2), std::invalid_argument);
    CHECK_THROWS_AS(ControllerKind::power(Vec::Constant(2, NAN)).validate(2), std::invalid_argument);
    CHECK_NOTHROW(ControllerKind::power(Vec::Zero(2)).validate(2));
}

TEST_CASE("power variant vector field uses the measured power") {
    GridParameters p = default_grid(1, 0);
    p.gamma = Vec::Constant(1, 3.0);
    Vec x = Vec::Zero(11);
    const StateLayout l = p.layout();
    x.segment(l.v(), 2) << 0.5, 0.1;
    x.segment(l.i_g(), 2) << 0.4, 0.2;
    x[l.v_dc()] = p.v_dc_r[0];
    x[l.omega_g()] = 1.0;
    Vec p_r(1);
    p_r << 0.1;
    const Vec f = vector_field(x, p, ControllerKind::power(p_r));
    const double pw = 0.5 * 0.4 + 0.1 * 0.2;
    CHECK_THAT(f[0], WithinAbs(1.0 - 3.0 * std::sin((pw - 0.1) / 2) - 1.0, 1e-15));
}
