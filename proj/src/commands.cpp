#include "hgl/commands.hpp"

#include "hgl/certificates.hpp"
#include "hgl/config.hpp"
#include "hgl/equilibria.hpp"
#include "hgl/io.hpp"
#include "hgl/lyapunov.hpp"
#include "hgl/simulator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hgl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double t_end = 0.0;
    std::string method = "rk45";
    double step = 1e-3;
    std::size_t stride = 1;
    bool strict = false;
    std::vector<std::string> perturb;
    int threads = 0;
    bool serial = false;
    std::string csv;
    std::string columns;
};

// Write `text` to <out_dir>/<name>, or to `out` when no directory was given.
void emit(const Options& o, const std::string& name, const std::string& text, std::ostream& out) {
    if (o.out_dir.empty()) {
        out << text;
        return;
    }
    fs::create_directories(o.out_dir);
    const fs::path path = fs::path(o.out_dir) / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write " + path.string());
    }
    file << text;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

IntegratorConfig integrator_from(const Options& o, double default_t_end) {
    IntegratorConfig cfg;
    cfg.method = o.method == "rk4" ? Method::Rk4 : Method::Rk45;
    cfg.t_end = o.t_end > 0.0 ? o.t_end : default_t_end;
    cfg.step = o.step;
    cfg.stride = o.stride;
    return cfg;
}

Index block_offset(const StateLayout& l, const std::string& block, Index& size) {
    struct Entry {
        const char* name;
        Index offset, size;
    };
    const Entry table[] = {
        {"delta", l.delta(), l.n},       {"i_dc_n", l.i_dc_n(), l.m},   {"i_dc_g", l.i_dc_g(), l.n},
        {"v_dc", l.v_dc(), l.n},         {"i", l.i(), 2 * l.n},         {"v", l.v(), 2 * l.n},
        {"i_g", l.i_g(), 2 * l.n},       {"omega_g", l.omega_g(), l.n}, {"T_m", l.T_m(), l.n},
    };
    for (const auto& e : table) {
        if (block == e.name) {
            size = e.size;
            return e.offset;
        }
    }
    throw UsageError("--perturb: unknown block \"" + block + "\"");
}

// Offsets of the form block:index:value added to x*_s.
Vec perturbed_start(const EquilibriumSet& eq, const std::vector<std::string>& offsets) {
    Vec x = eq.stable().x;
    const StateLayout layout{eq.n, eq.m};
    for (const auto& item : offsets) {
        const auto a = item.find(':');
        const auto b = item.find(':', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos) {
            throw UsageError("--perturb expects block:index:value, got \"" + item + "\"");
        }
        Index size = 0;
        const Index offset = block_offset(layout, item.substr(0, a), size);
        Index idx = 0;
        double value = 0.0;
        try {
            std::size_t used = 0;
            const std::string idx_text = item.substr(a + 1, b - a - 1);
            idx = std::stol(idx_text, &used);
            if (used != idx_text.size()) throw std::invalid_argument("index");
            const std::string val_text = item.substr(b + 1);
            value = std::stod(val_text, &used);
            if (used != val_text.size()) throw std::invalid_argument("value");
        } catch (const std::logic_error&) {
            throw UsageError("--perturb: cannot parse \"" + item + "\"");
        }
        if (idx < 0 || idx >= size) {
            throw UsageError("--perturb: index out of range in \"" + item + "\"");
        }
        x[offset + idx] += value;
    }
    return x;
}

struct Loaded {
    GridConfig cfg;
    EquilibriumSet eq;
};

Loaded load(const Options& o) {
    Loaded l{parse_config(fs::path(o.config)), {}};
    l.eq = solve_stationary(l.cfg.params);
    return l;
}

int cmd_equilibria(const Options& o, std::ostream& out, std::ostream& err) {
    const Loaded l = load(o);
    const auto& p = l.cfg.params;
    json doc = to_json(l.eq, p.layout());
    doc["residual"] = equilibrium_residual(l.eq, p);
    if (o.out_dir.empty()) {
        doc["effective_config"] = emit_config(l.cfg);
        out << dump(doc);
    } else {
        emit(o, "equilibria.json", dump(doc), out);
        emit(o, "effective_config.json", dump(emit_config(l.cfg)), out);
        err << l.eq.points.size() << " equilibria written to " << o.out_dir << "\n";
    }
    return kExitOk;
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
    const Loaded l = load(o);
    const CertificateReport report = certify(l.cfg.params, l.eq);
    if (o.out_dir.empty()) {
        out << dump(to_json(report));
        write_certificate_table(err, report);
    } else {
        emit(o, "certificate.json", dump(to_json(report)), out);
        write_certificate_table(out, report);
    }
    if (o.strict && !report.pass) {
        return kExitCertificateFail;
    }
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const Loaded l = load(o);
    const Vec x0 = perturbed_start(l.eq, o.perturb);
    IntegratorConfig cfg = integrator_from(o, 10.0);
    cfg.early_stop = false;
    const Trajectory traj = integrate(x0, l.cfg.params, l.cfg.control, cfg,
                                      l.cfg.control.variant == ControllerKind::Variant::HacAngle ? &l.eq : nullptr);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, l.cfg.params.layout());
    emit(o, "trajectory.csv", csv.str(), out);
    const auto hit = classify_convergence(traj, l.eq);
    err << "simulate: " << traj.steps << " steps to t = " << traj.final_time << ", final |f| = "
        << traj.final_residual << ", nearest equilibrium: "
        << (hit ? std::to_string(*hit) + " (" + to_string(l.eq.points[*hit].kind) + ")" : std::string("none"))
        << "\n";
    return kExitOk;
}

int cmd_lyapunov_check(const Options& o, std::ostream& out, std::ostream& err) {
    const Loaded l = load(o);
    const auto& p = l.cfg.params;
    const BoundParameters bp = assign_bound_parameters(p, l.eq);
    const QBlocks q = build_Q(p, l.eq, bp);
    const bool certified = certify(p, l.eq, false).pass;

    IntegratorConfig cfg = integrator_from(o, 20.0);
    const std::size_t trials = std::max<std::size_t>(o.trials, 1);
    json runs = json::array();
    bool all_pass = true;
    for (std::size_t k = 0; k < trials; ++k) {
        const Vec x0 = (k == 0 && !o.perturb.empty())
                           ? perturbed_start(l.eq, o.perturb)
                           : sample_initial_state(l.eq, Vec::Constant(8, 0.5), trial_seed(o.seed, k));
        const Trajectory traj = integrate(x0, p, ControllerKind::angle(), cfg, &l.eq);
        const double V0 = traj.V.front();
        const double tol = 1e-8 * std::max(1.0, V0);
        double max_increase = 0.0;
        double max_bound_excess = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < traj.t.size(); ++s) {
            if (s > 0) {
                max_increase = std::max(max_increase, traj.V[s] - traj.V[s - 1]);
            }
            const Vec xhat = error_state(traj.x[s], l.eq);
            max_bound_excess = std::max(max_bound_excess, traj.Vdot[s] - quadratic_bound(xhat, p, q));
        }
        const bool monotone = max_increase <= tol;
        const bool bounded = max_bound_excess <= 1e-9;
        all_pass = all_pass && monotone && bounded;
        runs.push_back({{"V0", V0},
                        {"V_final", traj.V.back()},
                        {"samples", traj.t.size()},
                        {"max_increase", max_increase},
                        {"max_bound_excess", max_bound_excess},
                        {"nonincreasing", monotone},
                        {"bound_holds", bounded}});
    }
    const json doc = {{"certified", certified}, {"pass", all_pass}, {"runs", runs}};
    emit(o, "lyapunov_check.json", dump(doc), out);
    err << "lyapunov-check: " << (all_pass ? "PASS" : "FAIL") << " over " << trials << " run(s)"
        << (certified ? "" : " (certificate does not hold)") << "\n";
    if (o.strict && !all_pass) {
        return kExitCertificateFail;
    }
    return kExitOk;
}

int cmd_mc_agas(const Options& o, std::ostream& out, std::ostream& err) {
    const Loaded l = load(o);
    MonteCarloConfig mc;
    mc.trials = o.trials > 0 ? o.trials : 500;
    mc.seed = o.seed;
    mc.integrator = integrator_from(o, 200.0);
    mc.integrator.record = false;
    mc.execution = o.serial ? Execution::Serial : Execution::Parallel;
    mc.threads = o.threads;
    const MonteCarloReport report = monte_carlo_agas(l.cfg.params, l.eq, mc);
    emit(o, "mc_agas.json", dump(to_json(report)), out);
    err << "mc-agas: " << report.trials << " trials on " << report.threads_used << " thread(s), stable "
        << report.fraction_stable << ", saddle " << report.fraction_saddle << ", unresolved "
        << report.fraction_unresolved << ", " << report.wall_time << " s\n";
    for (const auto& w : report.warnings) {
        err << "warning: " << w << "\n";
    }
    return kExitOk;
}

int cmd_plot(const Options& o, std::ostream& out, std::ostream& /*err*/) {
    std::ifstream in(o.csv, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + o.csv);
    }
    const CsvTable table = read_csv(in);
    std::vector<std::string> names;
    {
        std::stringstream ss(o.columns.empty() ? std::string("V") : o.columns);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) names.push_back(name);
        }
    }
    std::vector<double> x;
    const std::size_t tcol = table.column("t");
    for (const auto& row : table.rows) {
        x.push_back(row[tcol]);
    }
    std::vector<PlotSeries> series;
    for (const auto& name : names) {
        const std::size_t c = table.column(name);
        PlotSeries s{name, {}};
        for (const auto& row : table.rows) {
            s.y.push_back(row[c]);
        }
        series.push_back(std::move(s));
    }
    std::ostringstream svg;
    write_svg_plot(svg, x, "t", series, fs::path(o.csv).filename().string());
    emit(o, "plot.svg", svg.str(), out);
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid ac/dc grid stability toolkit", "hgl"};
    app.require_subcommand(1, 1);
    Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "grid configuration JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_dir, "directory for artifacts (default: stdout)");
    };
    auto add_integrator = [&](CLI::App* sub) {
        sub->add_option("--t-end", o.t_end, "final time")->check(CLI::PositiveNumber);
        sub->add_option("--method", o.method, "integrator")->check(CLI::IsMember({"rk4", "rk45"}));
        sub->add_option("--step", o.step, "fixed step (rk4) or initial step (rk45)")->check(CLI::PositiveNumber);
        sub->add_option("--stride", o.stride, "record every n-th step")->check(CLI::PositiveNumber);
    };

    auto* equilibria = app.add_subcommand("equilibria", "equilibrium set and effective configuration");
    add_config(equilibria);

    auto* cert = app.add_subcommand("certify", "stability certificate report");
    add_config(cert);
    cert->add_flag("--strict", o.strict, "exit 3 when the certificate fails");

    auto* sim = app.add_subcommand("simulate", "trajectory CSV from a perturbed equilibrium");
    add_config(sim);
    add_integrator(sim);
    sim->add_option("--perturb", o.perturb, "offset block:index:value added to x*_s (repeatable)");

    auto* lyap = app.add_subcommand("lyapunov-check", "check the decrease of V along trajectories");
    add_config(lyap);
    add_integrator(lyap);
    lyap->add_option("--perturb", o.perturb, "offset block:index:value for the first run");
    lyap->add_option("--trials", o.trials, "number of runs");
    lyap->add_option("--seed", o.seed, "seed for random initial states");
    lyap->add_flag("--strict", o.strict, "exit 3 when a check fails");

    auto* mc = app.add_subcommand("mc-agas", "Monte Carlo basin experiment");
    add_config(mc);
    add_integrator(mc);
    mc->add_option("--trials", o.trials, "number of random trials (default 500)");
    mc->add_option("--seed", o.seed, "run seed");
    mc->add_option("--threads", o.threads, "thread count (capped by HGL_THREADS)");
    mc->add_flag("--serial", o.serial, "use the serial reference loop");

    auto* plot = app.add_subcommand("plot", "SVG plot of trajectory CSV columns");
    plot->add_option("--csv", o.csv, "trajectory CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--columns", o.columns, "comma-separated column names (default V)");
    plot->add_option("--out", o.out_dir, "directory for plot.svg (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (equilibria->parsed()) return cmd_equilibria(o, out, err);
        if (cert->parsed()) return cmd_certify(o, out, err);
        if (sim->parsed()) return cmd_simulate(o, out, err);
        if (lyap->parsed()) return cmd_lyapunov_check(o, out, err);
        if (mc->parsed()) return cmd_mc_agas(o, out, err);
        if (plot->parsed()) return cmd_plot(o, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace hgl
