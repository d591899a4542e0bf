#include "hgl/simulator.hpp"

#include "hgl/certificates.hpp"
#include "hgl/lyapunov.hpp"
#include "hgl/model.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>

namespace hgl {

namespace ode = boost::numeric::odeint;

namespace {

using Rk4Stepper = ode::runge_kutta4<Vec, double, Vec, double, ode::vector_space_algebra>;
using DopriStepper = ode::runge_kutta_dopri5<Vec, double, Vec, double, ode::vector_space_algebra>;

// Copied by value inside odeint, so only pointers are held.
struct Rhs {
    const GridParameters* p;
    const ControllerKind* ctl;
    const Vec* inv_mass;

    void operator()(const Vec& x, Vec& dxdt, double /*t*/) const {
        state_derivative(x, *p, *ctl, *inv_mass, dxdt);
    }
};

}  // namespace

void IntegratorConfig::validate() const {
    if (!(step > 0.0)) throw std::invalid_argument("IntegratorConfig: step must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: rtol and atol must be positive");
    }
    if (!(t_end > 0.0)) throw std::invalid_argument("IntegratorConfig: t_end must be positive");
    if (stride == 0) throw std::invalid_argument("IntegratorConfig: stride must be at least 1");
    if (!(max_step > 0.0) || !(min_step > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: step bounds must be positive");
    }
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::TEnd: return "t_end";
        case Termination::Converged: return "converged";
        case Termination::Diverged: return "diverged";
    }
    return "unknown";
}

Trajectory integrate(const Vec& x0, const GridParameters& p, const ControllerKind& ctl,
                     const IntegratorConfig& cfg, const EquilibriumSet* lyapunov) {
    cfg.validate();
    ctl.validate(p.n);
    if (x0.size() != p.layout().dim()) {
        throw std::invalid_argument("integrate: initial state has wrong length");
    }
    const Vec inv_mass = MassMatrix::from(p).diagonal().cwiseInverse();
    const Rhs rhs{&p, &ctl, &inv_mass};

    Trajectory traj;
    Vec x = x0;
    wrap_angles(x, p.n);
    double t = 0.0;
    Vec f;

    auto residual = [&](const Vec& state) {
        vector_field(state, p, ctl, f);
        return f.cwiseAbs().maxCoeff();
    };
    auto record = [&](double time, const Vec& state) {
        traj.t.push_back(time);
        traj.x.push_back(state);
        if (lyapunov != nullptr) {
            const Vec xhat = error_state(state, *lyapunov);
            traj.V.push_back(evaluate_V(xhat, p, *lyapunov).V);
            traj.Vdot.push_back(vdot_closed_form(xhat, p, *lyapunov));
        }
    };
    auto finish = [&](Termination reason) {
        traj.reason = reason;
        traj.final_state = x;
        traj.final_time = t;
        if (cfg.record && (traj.t.empty() || traj.t.back() != t)) {
            record(t, x);
        }
    };
    auto fail = [&](const std::string& why) {
        finish(Termination::Diverged);
        throw IntegrationError("integrate: " + why + " at t = " + std::to_string(t), traj);
    };

    if (cfg.record) {
        record(t, x);
    }
    int below = 0;
    traj.final_residual = residual(x);
    if (cfg.early_stop && traj.final_residual <= cfg.convergence_tol) {
        ++below;
    }

    Rk4Stepper rk4;
    auto dopri = ode::make_controlled(cfg.atol, cfg.rtol, DopriStepper());
    double dt = std::min(cfg.step, cfg.max_step);
    std::size_t fixed_steps = 0;
    const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);

    while (t < cfg.t_end - t_eps) {
        try {
            if (cfg.method == Method::Rk4) {
                const double next = std::min(cfg.t_end, static_cast<double>(fixed_steps + 1) * cfg.step);
                rk4.do_step(rhs, x, t, next - t);
                ++fixed_steps;
                t = next;
            } else {
                double h = std::min({dt, cfg.max_step, cfg.t_end - t});
                const bool clipped = h < dt;
                const auto result = dopri.try_step(rhs, x, t, h);
                if (result == ode::fail) {
                    dt = h;
                    if (dt < cfg.min_step) {
                        fail("step size underflow");
                    }
                    continue;
                }
                if (!clipped || h > dt) {
                    dt = h;
                }
            }
        } catch (const std::invalid_argument& e) {
            fail(std::string("non-finite state (") + e.what() + ")");
        }
        if (!x.allFinite()) {
            fail("non-finite state");
        }
        wrap_angles(x, p.n);
        ++traj.steps;

        traj.final_residual = residual(x);
        if (!std::isfinite(traj.final_residual)) {
            fail("non-finite vector field");
        }
        if (cfg.record && traj.steps % cfg.stride == 0) {
            record(t, x);
        }
        if (cfg.early_stop) {
            below = traj.final_residual <= cfg.convergence_tol ? below + 1 : 0;
            if (below >= cfg.convergence_samples) {
                finish(Termination::Converged);
                return traj;
            }
        }
    }
    finish(Termination::TEnd);
    return traj;
}

double state_distance(const Vec& a, const Vec& b, Index n) {
    double sq = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double d = angle_difference(a[j], b[j]);
        sq += d * d;
    }
    sq += (a.tail(a.size() - n) - b.tail(b.size() - n)).squaredNorm();
    return std::sqrt(sq);
}

std::optional<std::size_t> classify_state(const Vec& x, const EquilibriumSet& eq, double tol) {
    std::optional<std::size_t> hit;
    for (std::size_t k = 0; k < eq.points.size(); ++k) {
        if (state_distance(x, eq.points[k].x, eq.n) < tol) {
            if (hit) {
                throw ConsistencyError("classify_state: state is within tolerance of two equilibria");
            }
            hit = k;
        }
    }
    return hit;
}

std::optional<std::size_t> classify_convergence(const Trajectory& traj, const EquilibriumSet& eq,
                                                double tol) {
    if (traj.reason == Termination::Diverged || traj.final_state.size() == 0) {
        return std::nullopt;
    }
    return classify_state(traj.final_state, eq, tol);
}

std::vector<int> MonteCarloReport::labels() const {
    std::vector<int> out;
    out.reserve(results.size());
    for (const auto& r : results) {
        out.push_back(r.label);
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 gen(seq);
    return gen();
}

Vec sample_initial_state(const EquilibriumSet& eq, const Vec& sigma, std::uint64_t seed) {
    if (sigma.size() != 8) {
        throw std::invalid_argument("sample_initial_state: sigma needs one entry per y block (8)");
    }
    const Index n = eq.n;
    const Index m = eq.m;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> angle(-kTwoPi, kTwoPi);
    std::normal_distribution<double> normal(0.0, 1.0);

    Vec x(11 * n + m);
    for (Index j = 0; j < n; ++j) {
        x[j] = wrap_angle(angle(gen));
    }
    const Index sizes[8] = {m, n, n, 2 * n, 2 * n, 2 * n, n, n};
    Index k = n;
    for (int block = 0; block < 8; ++block) {
        for (Index e = 0; e < sizes[block]; ++e, ++k) {
            x[k] = eq.y_star[k - n] + sigma[block] * normal(gen);
        }
    }
    return x;
}

TrialResult run_trial(const Vec& x0, const GridParameters& p, const EquilibriumSet& eq,
                      const IntegratorConfig& cfg, double classify_tol) {
    IntegratorConfig local = cfg;
    local.record = false;
    TrialResult r;
    try {
        const Trajectory traj = integrate(x0, p, ControllerKind::angle(), local);
        r.reason = traj.reason;
        r.final_time = traj.final_time;
        if (const auto hit = classify_convergence(traj, eq, classify_tol)) {
            r.label = static_cast<int>(*hit);
        }
    } catch (const IntegrationError& e) {
        r.reason = Termination::Diverged;
        r.final_time = e.partial().final_time;
    } catch (const std::exception&) {
        r.reason = Termination::Diverged;
    }
    return r;
}

int resolve_threads(int requested) {
    int threads = requested > 0 ? requested : omp_get_max_threads();
    if (const char* env = std::getenv("HGL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) {
            threads = std::min<int>(threads, static_cast<int>(cap));
        }
    }
    return std::max(1, threads);
}

MonteCarloReport monte_carlo_agas(const GridParameters& p, const EquilibriumSet& eq,
                                  const MonteCarloConfig& cfg) {
    cfg.integrator.validate();
    MonteCarloReport report;
    report.seed = cfg.seed;
    report.certified = certify(p, eq, /*with_spectra=*/false).pass;
    if (!report.certified) {
        report.warnings.push_back("stability certificate does not hold for this grid");
    }

    const std::size_t injected = cfg.injected.size();
    const std::size_t total = injected + cfg.trials;
    report.trials = total;
    report.results.resize(total);

    auto run_one = [&](std::size_t k) {
        Vec x0;
        std::uint64_t s = 0;
        if (k < injected) {
            x0 = cfg.injected[k];
        } else {
            s = trial_seed(cfg.seed, k - injected);
            x0 = sample_initial_state(eq, cfg.sigma, s);
        }
        TrialResult r = run_trial(x0, p, eq, cfg.integrator, cfg.classify_tol);
        r.seed = s;
        r.injected = k < injected;
        report.results[k] = r;
    };

    const auto start = std::chrono::steady_clock::now();
    if (cfg.execution == Execution::Serial) {
        report.threads_used = 1;
        for (std::size_t k = 0; k < total; ++k) {
            run_one(k);
        }
    } else {
        const int threads = resolve_threads(cfg.threads);
        report.threads_used = threads;
        const auto count = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::int64_t k = 0; k < count; ++k) {
            run_one(static_cast<std::size_t>(k));
        }
    }
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (total > 0) {
        std::size_t stable = 0, saddle = 0, none = 0;
        for (const auto& r : report.results) {
            if (r.label == 0) {
                ++stable;
            } else if (r.label > 0) {
                ++saddle;
            } else {
                ++none;
            }
        }
        const double denom = static_cast<double>(total);
        report.fraction_stable = static_cast<double>(stable) / denom;
        report.fraction_saddle = static_cast<double>(saddle) / denom;
        report.fraction_unresolved = static_cast<double>(none) / denom;
    }
    return report;
}

}  // namespace hgl
