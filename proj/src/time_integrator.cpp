#include "mems/time_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "mems/diagnostics.hpp"
#include "mems/errors.hpp"
#include "mems/grid_ops.hpp"

namespace mems {

void SimConfig::validate() const {
    if (!grid) throw InvalidArgument("simulation needs a grid");
    params.validate();
    if (u0.grid_ptr() != grid) throw GridMismatch("u0 is not defined on the config grid");
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(dt_min) || !positive(dt_init) || !positive(dt_max))
        throw InvalidArgument("time steps must be positive");
    if (!(dt_min <= dt_init && dt_init <= dt_max))
        throw InvalidArgument("time steps must satisfy dt_min <= dt_init <= dt_max");
    if (!positive(t_max)) throw InvalidArgument("t_max must be positive");
    if (!positive(steady_tol)) throw InvalidArgument("steady_tol must be positive");
    if (steady_window < 1) throw InvalidArgument("steady_window must be at least 1");
    if (!positive(c_adapt)) throw InvalidArgument("c_adapt must be positive");
    if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
    for (double t : snapshot_times)
        if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("snapshot times must be finite and nonnegative");
    if (!u0.all_finite()) throw InvalidArgument("u0 has non-finite values");
    if (!u0.satisfies_boundary()) throw InvalidArgument("u0 violates the Dirichlet boundary condition");
    if (!(u0.max() < 1.0)) throw InvalidArgument("u0 must satisfy max(u0) < 1");
}

std::string outcome_name(const SimOutcome& outcome) {
    switch (outcome.index()) {
        case 0: return "converged";
        case 1: return "quenched";
        default: return "timed-out";
    }
}

Field step(const Field& u, double dt, const Params& params, bool picard) {
    auto explicit_rhs = [&](const Field& at) {
        const Field f = reaction(at, params);
        Field rhs(u.grid_ptr());
        for (std::size_t k = 0; k < u.size(); ++k) rhs[k] = u[k] + dt * f[k];
        return rhs;
    };
    Field next = implicit_solve(dt, explicit_rhs(u), &u);
    if (picard) next = implicit_solve(dt, explicit_rhs(next), &next);
    return next;
}

namespace {

TrajectorySample make_sample(double t, const Field& u, const Params& params, double l2_ut, double dt) {
    TrajectorySample s;
    s.t = t;
    s.max_u = u.max();
    s.energy = energy(u, params);
    s.l2_ut = l2_ut;
    s.nonlocal_I = nonlocal_integral(u, params);
    s.dt_used = dt;
    return s;
}

// ||Laplacian_h u + f(u)|| at t = 0, the semi-discrete rate.
double initial_rate(const Field& u, const Params& params) {
    Field ut = laplacian_apply(u);
    const Field f = reaction(u, params);
    for (std::size_t k = 0; k < u.size(); ++k) ut[k] = u.grid().is_interior(k) ? ut[k] + f[k] : 0.0;
    return l2_norm(ut);
}

}  // namespace

SimResult run(const SimConfig& config) {
    config.validate();
    const Params& params = config.params;
    const double threshold = 1.0 - params.quench_eps;

    std::vector<double> stops;
    for (double t : config.snapshot_times)
        if (t > 0.0 && t < config.t_max) stops.push_back(t);
    stops.push_back(config.t_max);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    auto is_snapshot_time = [&](double t) {
        return std::any_of(config.snapshot_times.begin(), config.snapshot_times.end(),
                           [&](double s) { return s == t; });
    };

    Field u = config.u0;
    double t = 0.0;
    std::vector<TrajectorySample> samples;
    std::vector<Snapshot> snapshots;
    samples.push_back(make_sample(0.0, u, params, initial_rate(u, params), 0.0));
    if (is_snapshot_time(0.0)) snapshots.push_back({0.0, u});

    auto finish = [&](SimOutcome outcome, Field final_state, std::size_t steps) {
        return SimResult{std::move(outcome), std::move(samples), std::move(snapshots), std::move(final_state), steps};
    };

    if (u.max() >= threshold) return finish(Quenched{0.0, u.argmax(), false}, u, 0);

    std::size_t steps = 0;
    std::size_t stop_index = 0;
    int calm_steps = 0;
    while (true) {
        const double target = stops[stop_index];
        const double gap = 1.0 - u.max();
        const double controlled = config.c_adapt * gap * gap;
        if (controlled < config.dt_min) return finish(Quenched{t, u.argmax(), true}, u, steps);
        double dt = std::min({controlled, config.dt_max, steps == 0 ? config.dt_init : config.dt_max});

        // Land exactly on the next stop without leaving a sliver step behind.
        bool landing = false;
        if (t + dt >= target * (1.0 - 1e-14)) {
            dt = target - t;
            landing = true;
        } else if (t + 1.5 * dt > target) {
            dt = 0.5 * (target - t);
        }

        Field next(u.grid_ptr());
        try {
            next = step(u, dt, params, config.picard);
        } catch (const SingularityError&) {
            return finish(Quenched{t + dt, u.argmax(), false}, u, steps + 1);
        }
        if (!next.all_finite()) throw Error("time step produced non-finite values at t = " + std::to_string(t));

        double sup_change = 0.0;
        Field ut(u.grid_ptr());
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double d = next[k] - u[k];
            sup_change = std::max(sup_change, std::abs(d));
            ut[k] = d / dt;
        }
        t = landing ? target : t + dt;
        u = std::move(next);
        ++steps;

        if (u.max() >= threshold) {
            if (u.max() < 1.0) samples.push_back(make_sample(t, u, params, l2_norm(ut), dt));
            return finish(Quenched{t, u.argmax(), false}, u, steps);
        }

        calm_steps = (sup_change / dt < config.steady_tol) ? calm_steps + 1 : 0;
        const bool converged = calm_steps >= config.steady_window;
        const bool at_stop = landing;
        if (steps % config.record_every == 0 || at_stop || converged)
            samples.push_back(make_sample(t, u, params, l2_norm(ut), dt));
        if (at_stop && is_snapshot_time(t)) snapshots.push_back({t, u});

        if (converged) return finish(Converged{u, t}, u, steps);
        if (landing) {
            if (target >= config.t_max) return finish(TimedOut{u}, u, steps);
            ++stop_index;
        }
    }
}

double disk_lobes_initial(double x, double y) {
    const double s = 1.0 - x * x - y * y;
    if (s <= 0.0) return 0.0;
    return 100.0 * s * s * s * x * x * y * y;
}

namespace {

std::vector<double> evenly_spaced(double t_end, double every) {
    std::vector<double> times;
    const auto count = static_cast<int>(std::lround(t_end / every));
    for (int i = 0; i <= count; ++i) times.push_back(every * i);
    return times;
}

Preset make_preset(std::string_view name, std::size_t n) {
    auto build = [&](const Domain& d, std::size_t default_n) { return build_grid(d, n == 0 ? default_n : n); };
    if (name == "1d-unit") {
        Preset p{"1d-unit", "interval (0,1), u0 = 0, Dirichlet at both ends", SimConfig(build(Interval{1.0}, 201)),
                 0.5, 0.0};
        p.config.params.lambda = 8.53;
        p.config.t_max = 10.0;
        p.config.snapshot_times = evenly_spaced(10.0, 0.25);
        return p;
    }
    if (name == "disk-radial") {
        Preset p{"disk-radial", "radially symmetric unit disk, u0 = 0, u_r(0) = 0, u(1) = 0",
                 SimConfig(build(RadialDisk{1.0}, 201)), 0.0, 0.0};
        p.config.params.lambda = 22.0;
        p.config.t_max = 20.0;
        p.config.snapshot_times = evenly_spaced(20.0, 0.5);
        return p;
    }
    if (name == "disk-cartesian") {
        Preset p{"disk-cartesian", "unit disk on a staircase Cartesian grid, u0 = 100 (1-x^2-y^2)^3 x^2 y^2",
                 SimConfig(build(EmbeddedDisk{1.0}, 81)), 0.0, 0.0};
        p.config.u0 = Field::from_function(p.config.grid, disk_lobes_initial);
        p.config.params.lambda = 20.0;
        p.config.t_max = 20.0;
        p.config.snapshot_times = evenly_spaced(20.0, 1.0);
        return p;
    }
    if (name == "square-unit") {
        Preset p{"square-unit", "unit square, u0 = 0, Dirichlet on the boundary",
                 SimConfig(build(Rectangle{1.0, 1.0}, 51)), 0.5, 0.5};
        p.config.params.lambda = 10.0;
        p.config.t_max = 10.0;
        p.config.snapshot_times = evenly_spaced(10.0, 0.25);
        return p;
    }
    throw InvalidArgument("unknown preset '" + std::string(name) +
                          "' (expected 1d-unit, disk-radial, disk-cartesian or square-unit)");
}

}  // namespace

std::vector<Preset> presets() {
    return {make_preset("1d-unit", 0), make_preset("disk-radial", 0), make_preset("disk-cartesian", 0),
            make_preset("square-unit", 0)};
}

Preset find_preset(std::string_view name, std::size_t n) { return make_preset(name, n); }

}  // namespace mems
