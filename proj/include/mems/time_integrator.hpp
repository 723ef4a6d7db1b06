#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mems/domain.hpp"
#include "mems/nonlocal_rhs.hpp"

namespace mems {

struct SimConfig {
    GridPtr grid;
    Params params;
    Field u0;

    double dt_init = 1e-3;
    double dt_max = 1e-3;
    double dt_min = 1e-10;
    double t_max = 10.0;
    /// Converged once ||u^{n+1} - u^n||_inf / dt < steady_tol for
    /// steady_window consecutive steps.
    double steady_tol = 1e-8;
    int steady_window = 5;
    /// Step controller dt = clamp(c_adapt (1 - max u)^2, dt_min, dt_max).
    double c_adapt = 0.1;
    /// Re-evaluate the reaction at the predicted state and solve once more.
    bool picard = false;
    std::size_t record_every = 10;
    /// Steps are shortened to land exactly on these times.
    std::vector<double> snapshot_times;

    explicit SimConfig(GridPtr g) : grid(g), u0(g) {}

    /// Throws InvalidArgument on inconsistent settings.
    void validate() const;
};

struct TrajectorySample {
    double t = 0.0;
    double max_u = 0.0;
    double energy = 0.0;
    double l2_ut = 0.0;       // weighted L2 norm of (u^{n+1} - u^n) / dt
    double nonlocal_I = 0.0;  // Integral of 1/(1-u)
    double dt_used = 0.0;     // 0 for the initial sample
};

struct Converged {
    Field steady;
    double t_reached = 0.0;
};

struct Quenched {
    double t_quench = 0.0;
    std::size_t peak_node = 0;
    /// The controller asked for dt < dt_min before max u crossed 1 - quench_eps.
    bool by_dt_collapse = false;
};

struct TimedOut {
    Field final_state;
};

using SimOutcome = std::variant<Converged, Quenched, TimedOut>;

struct Snapshot {
    double t = 0.0;
    Field u;
};

struct SimResult {
    SimOutcome outcome;
    std::vector<TrajectorySample> samples;
    std::vector<Snapshot> snapshots;
    /// State when the run stopped (for Quenched, the first state past the
    /// threshold).
    Field final_state;
    std::size_t steps = 0;

    bool converged() const { return std::holds_alternative<Converged>(outcome); }
    bool quenched() const { return std::holds_alternative<Quenched>(outcome); }
    bool timed_out() const { return std::holds_alternative<TimedOut>(outcome); }
    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

std::string outcome_name(const SimOutcome& outcome);

/// One IMEX step: u+ = implicit_solve(dt, u + dt * reaction(u)); with picard
/// the reaction is re-evaluated at u+ and the solve repeated once.
/// Throws SingularityError when the reaction is evaluated at max u >= 1.
Field step(const Field& u, double dt, const Params& params, bool picard = false);

/// Integrates from u0 until convergence, quenching or t_max.
SimResult run(const SimConfig& config);

/// Named experiment setups.
struct Preset {
    std::string name;
    std::string description;
    SimConfig config;
    /// Probe point for sweep curves.
    double probe_x = 0.0;
    double probe_y = 0.0;
};

/// "1d-unit", "disk-radial", "disk-cartesian", "square-unit".
std::vector<Preset> presets();
/// Throws InvalidArgument for an unknown name. `n` overrides the resolution
/// (0 keeps the preset default).
Preset find_preset(std::string_view name, std::size_t n = 0);

/// u0(x, y) = 100 (1 - x^2 - y^2)^3 x^2 y^2 inside the unit disk.
double disk_lobes_initial(double x, double y);

}  // namespace mems
