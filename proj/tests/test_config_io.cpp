#include "catch_amalgamated.hpp"

#include "hgl/config.hpp"
#include "hgl/equilibria.hpp"
#include "hgl/io.hpp"

#include <fstream>
#include <sstream>

using namespace hgl;
using nlohmann::json;

namespace {

json load(const std::string& name) {
    std::ifstream in(std::string(HGL_SOURCE_DIR) + "/configs/" + name);
    return json::parse(in);
}

std::string error_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal single-unit document parses") {
    const GridConfig cfg = parse_config(load("single_unit.json"));
    CHECK(cfg.params.n == 1);
    CHECK(cfg.params.m == 0);
    CHECK(cfg.reference_residual <= kEquilibriumTolerance);
    CHECK(cfg.params.gamma[0] > 0);
}

TEST_CASE("default grid document matches the built-in defaults") {
    const GridConfig cfg = parse_config(load("default_grid.json"));
    const GridParameters p = default_certified_grid(2, 1);
    CHECK(cfg.params.b.isApprox(p.b, 1e-15));
    CHECK(cfg.params.delta_r == p.delta_r);
    CHECK(cfg.params.gamma.isApprox(p.gamma, 1e-12));
    CHECK(cfg.params.T_r.isApprox(p.T_r, 1e-12));
    CHECK(cfg.params.B == p.B);
}

TEST_CASE("schema violations name the offending key") {
    json doc = load("default_grid.json");

    json self_loop = doc;
    self_loop["incidence"][0] = {0, 0};
    CHECK(error_of(self_loop).find("incidence[0]") != std::string::npos);
    CHECK(error_of(self_loop).find("self-loop") != std::string::npos);

    json mu = doc;
    mu["ilcs"][1]["mu"] = 0.7;
    CHECK(error_of(mu).find("mu must lie in (0, 0.5]") != std::string::npos);
    CHECK(error_of(mu).find("ilcs[1]") != std::string::npos);

    json negative = doc;
    negative["ac_grids"][0]["R_g"] = -0.1;
    CHECK(error_of(negative).find("ac_grids[0].R_g") != std::string::npos);

    json missing = doc;
    missing["dc_lines"][0].erase("R_dc");
    CHECK(error_of(missing).find("R_dc") != std::string::npos);

    json short_eta = doc;
    short_eta["control"]["eta"] = {1.0};
    CHECK(error_of(short_eta).find("control.eta") != std::string::npos);

    json out_of_range = doc;
    out_of_range["incidence"][0] = {0, 5};
    CHECK(error_of(out_of_range).find("out of range") != std::string::npos);

    json power = doc;
    power["control"]["variant"] = "hac-power";
    CHECK(error_of(power).find("p_r") != std::string::npos);

    json mode = doc;
    mode["references"]["mode"] = "guess";
    CHECK(error_of(mode).find("references.mode") != std::string::npos);

    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS(parse_config(std::filesystem::path("/nonexistent/grid.json")), ConfigError);
}

TEST_CASE("strict mode checks the supplied references") {
    const GridConfig synthesized = parse_config(load("default_grid.json"));
    json strict = emit_config(synthesized);
    CHECK_NOTHROW(parse_config(strict));

    strict["references"]["T_r"][0] = strict["references"]["T_r"][0].get<double>() + 1e-3;
    const std::string err = error_of(strict);
    CHECK(err.find("residual") != std::string::npos);

    json missing = emit_config(synthesized);
    missing["references"].erase("i_dc_r");
    CHECK(error_of(missing).find("i_dc_r") != std::string::npos);
}

TEST_CASE("emit and parse round trip is idempotent") {
    for (const char* name : {"default_grid.json", "single_unit.json"}) {
        const GridConfig a = parse_config(load(name));
        const json ea = emit_config(a);
        const GridConfig b = parse_config(ea);
        const json eb = emit_config(b);
        CHECK(ea == eb);
        CHECK(b.params.T_r == a.params.T_r);
        CHECK(b.params.i_dc_r == a.params.i_dc_r);
        CHECK(b.params.gamma == a.params.gamma);
        CHECK(b.mode == ReferenceMode::Strict);
    }
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.901234567, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
        CHECK(format_double(v).size() <= 24);
    }
    CHECK(format_double(NAN) == "nan");
}

TEST_CASE("trajectory CSV round trip") {
    Trajectory tr;
    tr.t = {0.0, 0.5};
    tr.x = {Vec::LinSpaced(11, 0.0, 1.0), Vec::LinSpaced(11, 1.0 / 3.0, 2.0)};
    tr.V = {2.0, 1.0};
    tr.Vdot = {-1.0, -0.5};
    std::ostringstream out;
    write_trajectory_csv(out, tr, StateLayout{1, 0});
    const std::string text = out.str();
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("t,delta_0,", 0) == 0);

    std::istringstream in(text);
    const CsvTable table = read_csv(in);
    REQUIRE(table.header.size() == 1 + 11 + 2);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1][1] == 1.0 / 3.0);
    CHECK(table.rows[1][table.column("Vdot")] == -0.5);
    CHECK_THROWS_AS(table.column("missing"), std::invalid_argument);

    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(ragged), std::invalid_argument);
    std::istringstream garbage("a\nxyz\n");
    CHECK_THROWS_AS(read_csv(garbage), std::invalid_argument);
}

TEST_CASE("SVG plot contains one polyline per series") {
    std::ostringstream out;
    write_svg_plot(out, {0, 1, 2}, "t", {{"a", {1, 2, 3}}, {"b<c", {0, 0, 0}}}, "demo");
    const std::string svg = out.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    CHECK(count == 2);
    CHECK(svg.find("b&lt;c") != std::string::npos);
}

TEST_CASE("report JSON uses null for unbounded gains") {
    GridParameters p = synthesize_references(default_grid(2, 1));
    p.D_f = Vec::Constant(2, 0.01);
    p.D_d = Vec::Constant(2, 0.01);
    p = synthesize_references(p);
    p.gamma = Vec::Constant(2, 1.0);
    const EquilibriumSet eq = solve_stationary(p);
    const json j = to_json(certify(p, eq, false));
    CHECK(j["gamma_min_schur"][0].is_null());
    CHECK(j["verdicts"]["pass"] == false);
    CHECK(json::parse(j.dump()) == j);
}
