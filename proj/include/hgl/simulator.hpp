#pragma once

// Time integration of x' = K^{-1} f(x), convergence classification against the
// equilibrium set, and Monte Carlo basin experiments.
//
// Monte Carlo trials run either through the serial reference loop or an OpenMP
// loop; both write each trial into its own slot, so results do not depend on the
// execution order or thread count.

#include "hgl/controller.hpp"
#include "hgl/equilibria.hpp"
#include "hgl/grid.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgl {

enum class Method { Rk4, Rk45 };

struct IntegratorConfig {
    Method method = Method::Rk45;
    double step = 1e-3;  ///< fixed step (RK4) or initial step (RK45)
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = 1.0;
    double min_step = 1e-12;
    double t_end = 10.0;
    std::size_t stride = 1;  ///< record every stride-th step (first and last always kept)
    bool record = true;
    bool early_stop = true;
    double convergence_tol = 1e-9;   ///< on ||f(x)||_inf
    int convergence_samples = 3;     ///< consecutive steps below tolerance

    void validate() const;
};

enum class Termination { TEnd, Converged, Diverged };
std::string to_string(Termination t);

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<double> V;     ///< filled when an equilibrium set is supplied
    std::vector<double> Vdot;  ///< closed-form derivative at the same samples
    Termination reason = Termination::TEnd;
    Vec final_state;
    double final_time = 0.0;
    double final_residual = 0.0;
    std::size_t steps = 0;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

/// Integrate from x0 up to cfg.t_end. Angles are wrapped after every accepted step.
/// With `lyapunov` set, V(t) and Vdot(t) about its stable point are recorded.
/// Throws IntegrationError (carrying the partial trajectory) on step-size
/// underflow or a non-finite state.
Trajectory integrate(const Vec& x0, const GridParameters& p, const ControllerKind& ctl,
                     const IntegratorConfig& cfg, const EquilibriumSet* lyapunov = nullptr);

/// Distance on the angle manifold for delta, Euclidean on y.
double state_distance(const Vec& a, const Vec& b, Index n);

/// Index into eq.points of the equilibrium within `tol` of `x`, or nullopt.
/// Throws ConsistencyError if two points qualify.
std::optional<std::size_t> classify_state(const Vec& x, const EquilibriumSet& eq,
                                          double tol = 1e-4);
std::optional<std::size_t> classify_convergence(const Trajectory& traj, const EquilibriumSet& eq,
                                                double tol = 1e-4);

enum class Execution { Serial, Parallel };

struct MonteCarloConfig {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    /// Standard deviation per y block (i_dc_n, i_dc_g, v_dc, i, v, i_g, omega_g, T_m).
    Vec sigma = Vec::Constant(8, 0.5);
    IntegratorConfig integrator{};
    double classify_tol = 1e-4;
    /// Extra initial states run ahead of the random trials.
    std::vector<Vec> injected;
    Execution execution = Execution::Parallel;
    /// 0 = OpenMP default. Always capped by the HGL_THREADS environment variable.
    int threads = 0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    bool injected = false;
    int label = -1;  ///< index into the equilibrium set, -1 when unresolved
    Termination reason = Termination::TEnd;
    double final_time = 0.0;
};

struct MonteCarloReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<TrialResult> results;
    double fraction_stable = 0.0;
    double fraction_saddle = 0.0;
    double fraction_unresolved = 0.0;
    double wall_time = 0.0;
    bool certified = false;
    int threads_used = 1;
    std::vector<std::string> warnings;

    std::vector<int> labels() const;
};

/// Per-trial seed derived from the run seed and the trial index.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// delta uniform on [-2pi, 2pi)^n, y = y* + N(0, sigma_block^2).
Vec sample_initial_state(const EquilibriumSet& eq, const Vec& sigma, std::uint64_t seed);

/// Integrate one initial state and classify its limit. Never throws.
TrialResult run_trial(const Vec& x0, const GridParameters& p, const EquilibriumSet& eq,
                      const IntegratorConfig& cfg, double classify_tol);

/// Number of threads a parallel run may use given the request and HGL_THREADS.
int resolve_threads(int requested);

MonteCarloReport monte_carlo_agas(const GridParameters& p, const EquilibriumSet& eq,
                                  const MonteCarloConfig& cfg);

}  // namespace hgl
