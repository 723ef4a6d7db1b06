// memsim: command-line driver for the nonlocal MEMS toolkit.
//
//   memsim run     --preset 1d-unit --lambda 8.53
//   memsim sweep   --preset 1d-unit --lambdas 8,8.25,8.5 --jobs 2
//   memsim bisect  --preset 1d-unit --lo 8 --hi 9 --tol 0.05
//   memsim steady  --preset 1d-unit --lambda 4
//   memsim rate    --preset 1d-unit --lambda 8 --t-start 5 --t-end 30
//   memsim bound   --domain disk --radius 1
//   memsim presets
//
// Output goes to --out, else $MEMSIM_OUT_DIR, else ./memsim_out.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mems/config.hpp"
#include "mems/csv.hpp"
#include "mems/diagnostics.hpp"
#include "mems/errors.hpp"
#include "mems/lambda_search.hpp"
#include "mems/steady_state.hpp"
#include "mems/time_integrator.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitQuenched = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string preset;
    std::string config_path;
    std::optional<double> lambda;
    std::vector<std::string> overrides;
    std::string out_dir;
    int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_jobs = false) {
    cmd->add_option("--preset", c.preset, "Start from a named preset (see `presets`)");
    cmd->add_option("--config", c.config_path, "INI-style config file applied on top of the preset");
    cmd->add_option("--lambda", c.lambda, "Override params.lambda");
    cmd->add_option("--set", c.overrides, "Override a key, e.g. --set integrator.t_max=20")->allow_extra_args(false);
    cmd->add_option("--out", c.out_dir, "Output directory");
    if (with_jobs) cmd->add_option("--jobs", c.jobs, "Concurrent simulations")->check(CLI::PositiveNumber);
}

mems::RunConfig resolve(const Common& c) {
    mems::RunConfig config = c.preset.empty() ? mems::RunConfig{} : mems::config_from_preset(c.preset);
    if (!c.config_path.empty()) config = mems::load_config(c.config_path, config);
    if (c.lambda) config.params.lambda = *c.lambda;
    for (const auto& o : c.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw mems::ConfigError("expected section.key=value", 0, o);
        mems::apply_override(config, o.substr(0, eq), o.substr(eq + 1));
    }
    config.validate();
    return config;
}

fs::path output_dir(const Common& c) {
    fs::path dir = c.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("MEMSIM_OUT_DIR");
        dir = env && *env ? env : "memsim_out";
    }
    fs::create_directories(dir);
    return dir;
}

// RunManifest plus command-specific results.
class Manifest {
public:
    Manifest(std::string command, fs::path dir) : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["version"] = MEMSIM_VERSION;
    }

    void set_config(const mems::RunConfig& config) {
        doc_["config"] = mems::serialize_config(config);
    }
    std::string add_artifact(const std::string& name) {
        artifacts_.push_back(name);
        return (dir_ / name).string();
    }
    json& result() { return doc_["result"]; }

    void write() {
        doc_["artifacts"] = artifacts_;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        doc_["wall_seconds"] = elapsed.count();
        std::ofstream out(dir_ / "summary.json");
        out << doc_.dump(2) << '\n';
        if (!out) throw mems::Error("cannot write summary.json in " + dir_.string());
    }

private:
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    json doc_;
    std::vector<std::string> artifacts_;
};

json sample_json(const mems::TrajectorySample& s) {
    return {{"t", s.t}, {"max_u", s.max_u}, {"energy", s.energy}, {"l2_ut", s.l2_ut}, {"nonlocal_I", s.nonlocal_I}};
}

std::size_t probe_node(const mems::RunConfig& config, const mems::Grid& grid) {
    return grid.nearest_node(config.probe_x, config.probe_y);
}

int cmd_run(const Common& c) {
    const mems::RunConfig config = resolve(c);
    const mems::SimConfig sim = config.to_sim_config();
    Manifest manifest("run", output_dir(c));
    manifest.set_config(config);

    const mems::SimResult result = mems::run(sim);

    mems::csv::write_file(manifest.add_artifact("trajectory.csv"),
                          [&](std::ostream& out) { mems::csv::write_trajectory(out, result.samples); });
    json snapshots = json::array();
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
        mems::csv::write_file(manifest.add_artifact(name),
                              [&](std::ostream& out) { mems::csv::write_snapshot(out, result.snapshots[i].u); });
        snapshots.push_back({{"t", result.snapshots[i].t}, {"file", name}});
    }
    mems::csv::write_file(manifest.add_artifact("final.csv"),
                          [&](std::ostream& out) { mems::csv::write_snapshot(out, result.final_state); });

    json& r = manifest.result();
    r["outcome"] = mems::outcome_name(result.outcome);
    r["t_end"] = result.t_end();
    r["steps"] = result.steps;
    r["last_sample"] = sample_json(result.samples.back());
    r["snapshots"] = snapshots;
    if (const auto* q = std::get_if<mems::Quenched>(&result.outcome)) {
        r["t_quench"] = q->t_quench;
        r["peak_x"] = sim.grid->x(q->peak_node);
        r["peak_y"] = sim.grid->y(q->peak_node);
        r["by_dt_collapse"] = q->by_dt_collapse;
    }
    manifest.write();

    const auto* q = std::get_if<mems::Quenched>(&result.outcome);
    std::cout << mems::outcome_name(result.outcome) << " t=" << mems::format_double(q ? q->t_quench : result.t_end())
              << " max_u=" << mems::format_double(result.final_state.max()) << '\n';
    return result.quenched() ? kExitQuenched : kExitOk;
}

int cmd_sweep(const Common& c, std::vector<double> lambdas, std::optional<double> from, std::optional<double> to,
              std::optional<double> by) {
    const mems::RunConfig config = resolve(c);
    if (from || to || by) {
        if (!(from && to && by) || !(*by > 0.0) || *to < *from)
            throw mems::ConfigError("--from, --to and --step must be given together with step > 0", 0, "sweep");
        const auto count = static_cast<long>(std::floor((*to - *from) / *by + 1e-9));
        for (long i = 0; i <= count; ++i) lambdas.push_back(*from + *by * static_cast<double>(i));
    }
    if (lambdas.empty()) throw mems::ConfigError("no lambda values given (--lambdas or --from/--to/--step)", 0, "sweep");

    const mems::SimConfig sim = config.to_sim_config();
    Manifest manifest("sweep", output_dir(c));
    manifest.set_config(config);
    const std::size_t node = probe_node(config, *sim.grid);
    const auto series = mems::sweep(sim, lambdas, node, c.jobs);

    mems::csv::write_file(manifest.add_artifact("sweep.csv"),
                          [&](std::ostream& out) { mems::csv::write_sweep(out, series); });
    json& r = manifest.result();
    r["probe_x"] = sim.grid->x(node);
    r["probe_y"] = sim.grid->y(node);
    r["runs"] = json::array();
    for (const auto& s : series) {
        r["runs"].push_back({{"lambda", s.lambda}, {"verdict", mems::verdict_name(s.verdict)}, {"t_terminal", s.t_terminal}});
        std::cout << mems::format_double(s.lambda) << ' ' << mems::verdict_name(s.verdict) << '\n';
    }
    manifest.write();
    return kExitOk;
}

int cmd_bisect(const Common& c, double lo, double hi, double tol) {
    const mems::RunConfig config = resolve(c);
    const mems::SimConfig sim = config.to_sim_config();
    Manifest manifest("bisect", output_dir(c));
    manifest.set_config(config);

    mems::BisectOptions options;
    options.tol = tol;
    options.jobs = c.jobs;
    const mems::BisectResult result = mems::bisect_lambda_star(sim, lo, hi, options);

    mems::csv::write_file(manifest.add_artifact("interval.csv"),
                          [&](std::ostream& out) { mems::csv::write_interval(out, result.lo, result.hi); });
    mems::csv::write_file(manifest.add_artifact("bisect_history.csv"),
                          [&](std::ostream& out) { mems::csv::write_history(out, result.history); });
    json& r = manifest.result();
    r["lo"] = result.lo;
    r["hi"] = result.hi;
    r["rounds"] = result.rounds;
    r["classify_calls"] = result.classify_calls;
    r["monotonicity_violations"] = result.monotonicity_violations;
    manifest.write();

    std::cout << mems::format_double(result.lo) << ',' << mems::format_double(result.hi) << '\n';
    for (const auto& v : result.monotonicity_violations) std::cerr << "warning: " << v << '\n';
    return kExitOk;
}

// Continuation from lambda = 0 in steps of at most `max_step`.
mems::BranchPoint steady_state(const mems::RunConfig& config, const mems::GridPtr& grid, double max_step,
                               std::optional<double>& fold) {
    const double lambda = config.params.lambda;
    const auto count = std::max<long>(1, static_cast<long>(std::ceil(lambda / max_step)));
    std::vector<double> targets;
    for (long k = lambda == 0.0 ? count : 1; k <= count; ++k) targets.push_back(lambda * k / count);

    mems::NewtonOptions options;
    options.tol = config.newton_tol;
    options.max_iters = config.newton_max_iters;
    const auto result = mems::continuation(grid, targets, config.params, options);
    fold = result.fold_estimate;
    if (result.branch.empty() || result.branch.back().lambda != lambda) {
        std::string msg = "no minimal steady state reached at lambda=" + mems::format_double(lambda);
        if (fold) msg += "; branch folds near lambda=" + mems::format_double(*fold);
        throw mems::Error(msg);
    }
    return result.branch.back();
}

int cmd_steady(const Common& c, double max_step) {
    const mems::RunConfig config = resolve(c);
    const mems::GridPtr grid = mems::build_grid(config.make_domain(), config.n);
    Manifest manifest("steady", output_dir(c));
    manifest.set_config(config);

    std::optional<double> fold;
    const mems::BranchPoint point = steady_state(config, grid, max_step, fold);
    mems::csv::write_file(manifest.add_artifact("steady.csv"),
                          [&](std::ostream& out) { mems::csv::write_snapshot(out, point.phi); });
    json& r = manifest.result();
    r["lambda"] = point.lambda;
    r["max_phi"] = point.max_phi;
    r["newton_iters"] = point.newton_iters;
    r["residual_norm"] = point.residual_norm;
    r["energy"] = mems::energy(point.phi, config.params);
    manifest.write();

    std::cout << "max_phi=" << mems::format_double(point.max_phi) << " iterations=" << point.newton_iters << '\n';
    return kExitOk;
}

int cmd_rate(const Common& c, double every, std::optional<double> t_start, std::optional<double> t_end,
             const std::string& model) {
    const mems::RunConfig config = resolve(c);
    if (!(every > 0.0)) throw mems::ConfigError("must be positive", 0, "--every");
    mems::DecayModelSelection selection = mems::DecayModelSelection::Auto;
    if (model == "exponential") selection = mems::DecayModelSelection::Exponential;
    else if (model == "algebraic") selection = mems::DecayModelSelection::Algebraic;
    else if (model != "auto") throw mems::ConfigError("expected auto, exponential or algebraic", 0, "--model");

    mems::SimConfig sim = config.to_sim_config();
    Manifest manifest("rate", output_dir(c));
    manifest.set_config(config);

    std::optional<double> fold;
    const mems::BranchPoint steady = steady_state(config, sim.grid, 0.5, fold);

    // Keep integrating past the usual stop so late windows still see the tail.
    sim.steady_tol = std::numeric_limits<double>::min();
    sim.snapshot_times.clear();
    for (long k = 0; every * static_cast<double>(k) <= sim.t_max * (1 + 1e-12); ++k)
        sim.snapshot_times.push_back(every * static_cast<double>(k));
    const mems::SimResult result = mems::run(sim);

    std::vector<mems::DecaySample> samples;
    for (const auto& snap : result.snapshots) samples.push_back({snap.t, mems::l2_distance(snap.u, steady.phi)});
    mems::csv::write_file(manifest.add_artifact("decay.csv"),
                          [&](std::ostream& out) { mems::csv::write_decay(out, samples); });

    std::vector<mems::DecaySample> window;
    if (t_start || t_end) {
        for (const auto& s : samples)
            if (s.t >= t_start.value_or(-INFINITY) && s.t <= t_end.value_or(INFINITY)) window.push_back(s);
    } else {
        window = mems::default_fit_window(samples);
    }
    const mems::DecayFit fit = mems::fit_decay(window, selection);

    json& r = manifest.result();
    r["outcome"] = mems::outcome_name(result.outcome);
    r["steady_max_phi"] = steady.max_phi;
    const std::string model_name = fit.is_exponential() ? "exponential" : "algebraic";
    r["model"] = model_name;
    if (const auto* e = std::get_if<mems::ExponentialDecay>(&fit.model)) {
        r["rate"] = e->rate;
        r["amplitude"] = e->amplitude;
    } else {
        const auto& a = std::get<mems::AlgebraicDecay>(fit.model);
        r["exponent"] = a.exponent;
        r["amplitude"] = a.amplitude;
    }
    r["r_squared"] = fit.r_squared;
    r["rival_r_squared"] = fit.rival_r_squared;
    r["theta_implied"] = fit.theta_implied;
    r["t_start"] = fit.t_start;
    r["t_end"] = fit.t_end;
    r["converged_exactly"] = fit.converged_exactly;
    manifest.write();

    std::cout << model_name << " r2=" << mems::format_double(fit.r_squared);
    if (const auto* e = std::get_if<mems::ExponentialDecay>(&fit.model))
        std::cout << " rate=" << mems::format_double(e->rate);
    else
        std::cout << " exponent=" << mems::format_double(std::get<mems::AlgebraicDecay>(fit.model).exponent);
    std::cout << '\n';
    return result.quenched() ? kExitQuenched : kExitOk;
}

int cmd_bound(const std::string& domain, double radius, double lx, double ly, std::optional<double> beta,
              const std::string& out_dir) {
    mems::Domain d;
    if (domain == "disk" || domain == "radial-disk") d = mems::RadialDisk{radius};
    else if (domain == "embedded-disk") d = mems::EmbeddedDisk{radius};
    else if (domain == "rectangle") d = mems::Rectangle{lx, ly};
    else if (domain == "interval") d = mems::Interval{lx};
    else throw mems::ConfigError("expected disk, embedded-disk, rectangle or interval", 0, "--domain");
    mems::validate(d);
    const double bound = mems::nonexistence_bound(d, beta);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        Manifest manifest("bound", out_dir);
        manifest.result() = {{"domain", mems::describe(d)}, {"bound", bound}};
        manifest.write();
    }
    std::cout << mems::format_double(bound) << '\n';
    return kExitOk;
}

int cmd_presets() {
    for (const auto& p : mems::presets()) {
        std::cout << p.name << "  " << p.description << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal parabolic MEMS equation toolkit"};
    app.set_version_flag("--version", std::string(MEMSIM_VERSION));
    app.require_subcommand(1);

    std::function<int()> action;

    Common run_opts;
    auto* run = app.add_subcommand("run", "Integrate one configuration in time");
    add_common(run, run_opts);
    run->callback([&] { action = [&] { return cmd_run(run_opts); }; });

    Common sweep_opts;
    std::vector<double> sweep_lambdas;
    std::optional<double> sweep_from, sweep_to, sweep_step;
    auto* sweep = app.add_subcommand("sweep", "Run a list of lambda values and record the probe value");
    add_common(sweep, sweep_opts, true);
    sweep->add_option("--lambdas", sweep_lambdas, "Comma-separated lambda values")->delimiter(',');
    sweep->add_option("--from", sweep_from, "First lambda of an evenly spaced list");
    sweep->add_option("--to", sweep_to, "Last lambda of an evenly spaced list");
    sweep->add_option("--step", sweep_step, "Spacing of the evenly spaced list");
    sweep->callback([&] {
        action = [&] { return cmd_sweep(sweep_opts, sweep_lambdas, sweep_from, sweep_to, sweep_step); };
    });

    Common bisect_opts;
    double bisect_lo = 0.0, bisect_hi = 0.0, bisect_tol = 0.05;
    auto* bisect = app.add_subcommand("bisect", "Bracket the critical lambda");
    add_common(bisect, bisect_opts, true);
    bisect->add_option("--lo", bisect_lo, "Lower end (must converge)")->required();
    bisect->add_option("--hi", bisect_hi, "Upper end (must quench)")->required();
    bisect->add_option("--tol", bisect_tol, "Final bracket width");
    bisect->callback([&] { action = [&] { return cmd_bisect(bisect_opts, bisect_lo, bisect_hi, bisect_tol); }; });

    Common steady_opts;
    double steady_step = 0.5;
    auto* steady = app.add_subcommand("steady", "Minimal steady state by Newton continuation");
    add_common(steady, steady_opts);
    steady->add_option("--max-step", steady_step, "Largest continuation step in lambda")->check(CLI::PositiveNumber);
    steady->callback([&] { action = [&] { return cmd_steady(steady_opts, steady_step); }; });

    Common rate_opts;
    double rate_every = 0.1;
    std::optional<double> rate_start, rate_end;
    std::string rate_model = "auto";
    auto* rate = app.add_subcommand("rate", "Fit the decay of ||u(t) - phi|| toward the steady state");
    add_common(rate, rate_opts);
    rate->add_option("--every", rate_every, "Sampling interval in t");
    rate->add_option("--t-start", rate_start, "Start of the fit window");
    rate->add_option("--t-end", rate_end, "End of the fit window");
    rate->add_option("--model", rate_model, "auto, exponential or algebraic");
    rate->callback([&] {
        action = [&] { return cmd_rate(rate_opts, rate_every, rate_start, rate_end, rate_model); };
    });

    std::string bound_domain = "disk", bound_out;
    double bound_radius = 1.0, bound_lx = 1.0, bound_ly = 1.0;
    std::optional<double> bound_beta;
    auto* bound = app.add_subcommand("bound", "Nonexistence threshold for lambda on a 2D domain");
    bound->add_option("--domain", bound_domain, "disk, embedded-disk, rectangle or interval");
    bound->add_option("--radius", bound_radius, "Disk radius");
    bound->add_option("--lx", bound_lx, "Rectangle width (interval length)");
    bound->add_option("--ly", bound_ly, "Rectangle height");
    bound->add_option("--beta", bound_beta, "Star-shapedness constant (required for rectangles)");
    bound->add_option("--out", bound_out, "Also write summary.json here");
    bound->callback([&] {
        action = [&] { return cmd_bound(bound_domain, bound_radius, bound_lx, bound_ly, bound_beta, bound_out); };
    });

    auto* list = app.add_subcommand("presets", "List the named presets");
    list->callback([&] { action = cmd_presets; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        return action();
    } catch (const mems::InvalidBracket& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mems::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mems::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
