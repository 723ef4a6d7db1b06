// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion 7   run one criterion (ctest registers each separately)
//
// Tolerances are fixed below; nothing here is tuned per run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mems/diagnostics.hpp"
#include "mems/grid_ops.hpp"
#include "mems/lambda_search.hpp"
#include "mems/nonlocal_rhs.hpp"
#include "mems/steady_state.hpp"
#include "mems/time_integrator.hpp"

using namespace mems;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 1
constexpr double kDichotomyLow = 8.53;
constexpr double kDichotomyHigh = 8.54;
constexpr double kDichotomyHorizon = 10.0;
constexpr double kDichotomyMaxSeconds = 10.0;
// Criterion 2
constexpr double kBisect1dTol = 0.05;
constexpr double kCritical1d = 8.533;
constexpr double kCritical1dSlack = 0.07;
constexpr double kBisect1dMaxSeconds = 60.0;
// Criterion 3
constexpr double kRadialConverge = 22.0;
constexpr double kRadialQuench = 22.5;
constexpr double kRadialHorizon = 20.0;
constexpr double kRadialBracketLo = 21.5, kRadialBracketHi = 23.5;
// Criterion 4
constexpr double kSquareConverge = 10.0;
constexpr double kSquareQuench = 16.0;
constexpr double kSquareHorizon = 10.0;
constexpr double kSquareQuenchTimeMax = 1.0;
constexpr double kSquareBracketLo = 12.5, kSquareBracketHi = 14.5;
constexpr double kBisect2dTol = 0.5;
// Criterion 5
constexpr double kLobesLambda = 20.0;
// Criterion 6
constexpr double kEnergySlack = 1e-6;
constexpr double kIdentityDtMax = 1e-3;
constexpr double kIdentityRelTol = 0.10;
// Criterion 7
constexpr double kSteadyDynamicTol = 1e-4;
constexpr double kSteadyDynamicHorizon = 50.0;
// Criterion 8
constexpr double kRateLambda = 8.0;
constexpr double kRateWindowStart = 5.0, kRateWindowEnd = 30.0;
constexpr double kRateMinR2 = 0.99;
constexpr double kRateSampleEvery = 0.1;
// Criterion 9
constexpr double kProbeTime = 10.0;
// Criterion 10
constexpr int kJacobianTrials = 20;
constexpr double kJacobianEps = 1e-6;
constexpr double kJacobianRelTol = 1e-6;
constexpr double kShermanMorrisonTol = 1e-8;
// Criterion 11
constexpr double kWeightSumTol = 1e-10;
constexpr double kQuadraticExactTol = 1e-9;
constexpr double kOrderRatioTol = 0.05;
// Criterion 12
constexpr double kBoundFactor = 1.1;

struct Verdict_ {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << (ok ? "" : "FAILED ") << what;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

SimConfig scenario(const std::string& name, double t_max = 0.0) {
    SimConfig c = find_preset(name).config;
    if (t_max > 0.0) c.t_max = t_max;
    return c;
}

std::string describe_class(const LambdaClassification& c) {
    std::string s = "lambda=" + fmt(c.lambda) + " " + verdict_name(c.verdict) + " at t=" + fmt(c.t_terminal);
    if (c.verdict == Verdict::Undetermined) s += " (max_u=" + fmt(c.evidence.max_u) + ", rate " + fmt(c.evidence.l2_ut) + ")";
    return s;
}

// 1D dichotomy at n=201 with a fixed horizon.
void criterion_1(Verdict_& v) {
    const SimConfig s = scenario("1d-unit", kDichotomyHorizon);
    auto t0 = Clock::now();
    const auto low = classify(kDichotomyLow, s);
    const double t_low = seconds_since(t0);
    t0 = Clock::now();
    const auto high = classify(kDichotomyHigh, s);
    const double t_high = seconds_since(t0);
    v.require(low.verdict == Verdict::Converged && low.t_terminal <= kDichotomyHorizon, describe_class(low));
    v.require(high.verdict == Verdict::Quenched && high.t_terminal <= kDichotomyHorizon, describe_class(high));
    v.require(t_low <= kDichotomyMaxSeconds && t_high <= kDichotomyMaxSeconds,
              "runtimes " + fmt(t_low, 3) + "s, " + fmt(t_high, 3) + "s");
}

void criterion_2(Verdict_& v) {
    const auto t0 = Clock::now();
    BisectOptions opts;
    opts.tol = kBisect1dTol;
    const auto r = bisect_lambda_star(scenario("1d-unit"), 8.0, 9.0, opts);
    const double secs = seconds_since(t0);
    v.require(r.hi - r.lo <= kBisect1dTol, "interval [" + fmt(r.lo, 8) + ", " + fmt(r.hi, 8) + "]");
    v.require(r.lo - kCritical1dSlack <= kCritical1d && kCritical1d <= r.hi + kCritical1dSlack,
              "contains " + fmt(kCritical1d) + " within +-" + fmt(kCritical1dSlack));
    v.require(secs <= kBisect1dMaxSeconds, "runtime " + fmt(secs, 3) + "s");
}

void criterion_3(Verdict_& v) {
    const SimConfig s = scenario("disk-radial", kRadialHorizon);
    const auto low = classify(kRadialConverge, s);
    const auto high = classify(kRadialQuench, s);
    v.require(low.verdict == Verdict::Converged && low.t_terminal <= kRadialHorizon, describe_class(low));
    v.require(high.verdict == Verdict::Quenched, describe_class(high));
    BisectOptions opts;
    opts.tol = kBisect2dTol;
    const auto r = bisect_lambda_star(s, 15.0, 34.0, opts);
    v.require(r.lo > kRadialBracketLo && r.hi < kRadialBracketHi,
              "bracket [" + fmt(r.lo) + ", " + fmt(r.hi) + "] within (" + fmt(kRadialBracketLo) + ", " +
                  fmt(kRadialBracketHi) + ")");
}

void criterion_4(Verdict_& v) {
    const SimConfig s = scenario("square-unit", kSquareHorizon);
    const auto low = classify(kSquareConverge, s);
    const auto high = classify(kSquareQuench, s);
    v.require(low.verdict == Verdict::Converged && low.t_terminal <= kSquareHorizon, describe_class(low));
    v.require(high.verdict == Verdict::Quenched && high.t_terminal < kSquareQuenchTimeMax, describe_class(high));
    BisectOptions opts;
    opts.tol = kBisect2dTol;
    const auto r = bisect_lambda_star(s, 10.0, 16.0, opts);
    v.require(r.lo > kSquareBracketLo && r.hi < kSquareBracketHi,
              "bracket [" + fmt(r.lo) + ", " + fmt(r.hi) + "] within (" + fmt(kSquareBracketLo) + ", " +
                  fmt(kSquareBracketHi) + ")");
}

void criterion_5(Verdict_& v) {
    const SimConfig s = scenario("disk-cartesian");
    const auto c = classify(kLobesLambda, s);
    v.require(c.verdict == Verdict::Converged, describe_class(c) + ", max_u=" + fmt(c.evidence.max_u));
}

void criterion_6(Verdict_& v) {
    struct Case {
        const char* preset;
        double lambda;
    };
    // Each preset at its own lambda, plus the two line/radial presets below their folds.
    std::vector<Case> cases;
    for (const auto& p : presets()) cases.push_back({nullptr, p.config.params.lambda});
    const auto all = presets();
    for (std::size_t i = 0; i < all.size(); ++i) cases[i].preset = all[i].name.c_str();
    cases.push_back({"1d-unit", 8.0});
    cases.push_back({"disk-radial", 20.0});

    int converging = 0;
    for (const auto& c : cases) {
        SimConfig s = scenario(c.preset);
        s.params.lambda = c.lambda;
        s.record_every = 1;
        s.snapshot_times.clear();
        const SimResult r = run(s);
        if (!r.converged()) continue;
        ++converging;
        const EnergyAudit a = audit_energy(r.samples, kEnergySlack, kIdentityDtMax);
        const std::string tag = std::string(c.preset) + "@" + fmt(c.lambda);
        v.require(a.increases == 0, tag + " energy increases: " + std::to_string(a.increases) +
                                        " (worst " + fmt(a.worst_increase, 3) + ")");
        v.require(a.identity_checked > 0 && a.worst_identity_error <= kIdentityRelTol,
                  tag + " identity error " + fmt(a.worst_identity_error, 3) + " over " +
                      std::to_string(a.identity_checked) + " steps");
    }
    v.require(converging >= 2, std::to_string(converging) + " converging runs audited");
}

void criterion_7(Verdict_& v) {
    const GridPtr g = find_preset("1d-unit").config.grid;
    for (double lambda : {4.0, 6.0, 8.0}) {
        Params p;
        p.lambda = lambda;
        const std::vector<double> targets{lambda};
        const auto branch = continuation(g, targets, p);
        if (branch.branch.empty()) {
            v.require(false, "Newton failed at lambda=" + fmt(lambda));
            continue;
        }
        SimConfig s(g);
        s.params = p;
        s.t_max = kSteadyDynamicHorizon;
        const SimResult r = run(s);
        const double d = l2_distance(branch.branch.back().phi, r.final_state);
        v.require(d <= kSteadyDynamicTol, "lambda=" + fmt(lambda) + " distance " + fmt(d, 3) + " (" +
                                              outcome_name(r.outcome) + " at t=" + fmt(r.t_end()) + ")");
    }
}

void criterion_8(Verdict_& v) {
    const GridPtr g = find_preset("1d-unit").config.grid;
    Params p;
    p.lambda = kRateLambda;
    const auto branch = newton_solve(Field(g), p);

    SimConfig s(g);
    s.params = p;
    s.t_max = kRateWindowEnd;
    // Run until the iterate stops changing; sub-floor distances are dropped by the fit.
    s.steady_tol = std::numeric_limits<double>::min();
    for (int k = 0; k * kRateSampleEvery <= kRateWindowEnd + 1e-9; ++k) s.snapshot_times.push_back(k * kRateSampleEvery);
    const SimResult r = run(s);

    std::vector<DecaySample> window;
    for (const auto& snap : r.snapshots)
        if (snap.t >= kRateWindowStart - 1e-12 && snap.t <= kRateWindowEnd + 1e-12)
            window.push_back({snap.t, l2_distance(snap.u, branch.phi)});
    try {
        const DecayFit fit = fit_decay(window);
        std::string desc = fit.is_exponential()
                               ? "exponential rate " + fmt(std::get<ExponentialDecay>(fit.model).rate)
                               : "algebraic exponent " + fmt(std::get<AlgebraicDecay>(fit.model).exponent);
        v.require(fit.is_exponential() && fit.r_squared >= kRateMinR2,
                  desc + ", r2=" + fmt(fit.r_squared, 8) + " (rival " + fmt(fit.rival_r_squared, 8) + ") over t in [" +
                      fmt(fit.t_start) + ", " + fmt(fit.t_end) + "]");
    } catch (const Error& e) {
        v.require(false, e.what());
    }
}

void criterion_9(Verdict_& v) {
    const SimConfig base = scenario("1d-unit", kProbeTime);
    const std::size_t mid = base.grid->nearest_node(0.5);
    double prev = -1.0;
    std::string values;
    bool increasing = true;
    for (int lambda = 3; lambda <= 8; ++lambda) {
        SimConfig s = base;
        s.params.lambda = lambda;
        s.snapshot_times = {kProbeTime};
        const SimResult r = run(s);
        // A run that converged before the probe time sits on its steady state.
        const double value = r.snapshots.empty() ? r.final_state[mid] : r.snapshots.back().u[mid];
        if (r.quenched()) increasing = false;
        if (!(value > prev)) increasing = false;
        values += (values.empty() ? "" : ", ") + fmt(value, 8);
        prev = value;
    }
    v.require(increasing, "u(0.5, 10) for lambda=3..8: " + values);
}

void criterion_10(Verdict_& v) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<Domain> domains{Interval{1.0}, RadialDisk{1.0}, Rectangle{1.0, 1.0}, EmbeddedDisk{1.0}};
    double worst = 0.0;
    for (int trial = 0; trial < kJacobianTrials; ++trial) {
        const auto g = build_grid(domains[trial % domains.size()], 25);
        const double amp = 0.8 * unit(rng), kx = 1 + 2 * unit(rng), ky = 1 + 2 * unit(rng), ph = unit(rng);
        Field psi = Field::from_function(
            g, [&](double x, double y) { return amp * std::abs(std::sin(kx * x + ph) * std::cos(ky * y + ph)); });
        Field w(g);
        for (std::size_t k : g->interior_nodes()) w[k] = 2 * unit(rng) - 1;
        Params p;
        p.lambda = 1 + 20 * unit(rng);
        p.alpha = 0.5 + unit(rng);
        const Field jw = apply(reaction_jacobian(psi, p), w);
        Field plus = psi, minus = psi;
        for (std::size_t k = 0; k < psi.size(); ++k) {
            plus[k] += kJacobianEps * w[k];
            minus[k] -= kJacobianEps * w[k];
        }
        const Field fp = reaction(plus, p), fm = reaction(minus, p);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < psi.size(); ++k) {
            const double fd = (fp[k] - fm[k]) / (2 * kJacobianEps);
            num = std::max(num, std::abs(fd - jw[k]));
            den = std::max(den, std::abs(fd));
        }
        worst = std::max(worst, num / den);
    }
    v.require(worst <= kJacobianRelTol, "worst directional-derivative error " + fmt(worst, 3) + " over " +
                                            std::to_string(kJacobianTrials) + " cases");

    double worst_sm = 0.0;
    for (const auto& [domain, n] : std::vector<std::pair<Domain, std::size_t>>{
             {Interval{1.0}, 64}, {RadialDisk{1.0}, 64}, {Rectangle{1.0, 1.0}, 8}, {EmbeddedDisk{1.0}, 9}}) {
        const auto g = build_grid(domain, n);
        const Field psi = Field::from_function(g, [](double x, double y) { return 0.5 * std::abs(std::sin(3 * x + 1) * std::cos(2 * y)); });
        Field rhs(g);
        for (std::size_t k : g->interior_nodes()) rhs[k] = 2 * unit(rng) - 1;
        Params p;
        p.lambda = 7.0;
        const Field x = solve_linearized(psi, p, rhs);

        const auto interior = g->interior_nodes();
        const auto m = static_cast<Eigen::Index>(interior.size());
        const auto jac = reaction_jacobian(psi, p);
        Eigen::MatrixXd a(m, m);
        Eigen::VectorXd b(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            Field e(g);
            e[interior[j]] = 1.0;
            const Field lap = laplacian_apply(e), je = apply(jac, e);
            for (Eigen::Index i = 0; i < m; ++i) a(i, j) = -lap[interior[i]] - je[interior[i]];
            b(j) = rhs[interior[j]];
        }
        const Eigen::VectorXd ref = a.fullPivLu().solve(b);
        for (Eigen::Index i = 0; i < m; ++i) worst_sm = std::max(worst_sm, std::abs(x[interior[i]] - ref(i)));
    }
    v.require(worst_sm <= kShermanMorrisonTol, "rank-one solve vs dense oracle " + fmt(worst_sm, 3));
}

void criterion_11(Verdict_& v) {
    auto quad_error = [](std::size_t n) {
        const auto g = build_grid(Interval{1.0}, n);
        return std::abs(quadrature(Field::from_function(g, [](double x, double) { return x * (1 - x); })) - 1.0 / 6.0);
    };
    const double r1 = quad_error(51) / quad_error(101), r2 = quad_error(101) / quad_error(201);
    v.require(std::abs(r1 - 4) <= 4 * kOrderRatioTol && std::abs(r2 - 4) <= 4 * kOrderRatioTol,
              "trapezoid error ratios " + fmt(r1) + ", " + fmt(r2));

    double worst_lap = 0.0;
    {
        const auto g = build_grid(Interval{1.0}, 101);
        const Field lap = laplacian_apply(Field::from_function(g, [](double x, double) { return x * (1 - x); }));
        for (std::size_t k : g->interior_nodes()) worst_lap = std::max(worst_lap, std::abs(lap[k] + 2));
    }
    {
        const auto g = build_grid(Rectangle{1.0, 1.0}, 41);
        Field q(g);
        for (std::size_t k = 0; k < g->size(); ++k) q[k] = g->x(k) * (1 - g->x(k)) + g->y(k) * (1 - g->y(k));
        const Field lap = laplacian_stencil(q);
        for (std::size_t k : g->interior_nodes()) worst_lap = std::max(worst_lap, std::abs(lap[k] + 4));
    }
    {
        const auto g = build_grid(RadialDisk{1.0}, 101);
        const Field lap = laplacian_apply(Field::from_function(g, [](double r, double) { return 1 - r * r; }));
        for (std::size_t k : g->interior_nodes()) worst_lap = std::max(worst_lap, std::abs(lap[k] + 4));
    }
    v.require(worst_lap <= kQuadraticExactTol, "Laplacian error on quadratics " + fmt(worst_lap, 3));

    double worst_w = 0.0;
    for (const auto& [domain, expected] : std::vector<std::pair<Domain, double>>{
             {Interval{1.0}, 1.0}, {RadialDisk{1.0}, kPi}, {Rectangle{1.0, 1.0}, 1.0}}) {
        for (std::size_t n : {5u, 11u, 64u, 201u}) {
            worst_w = std::max(worst_w, std::abs(build_grid(domain, n)->weight_sum() - expected));
        }
    }
    v.require(worst_w <= kWeightSumTol, "weight sums off by " + fmt(worst_w, 3));
}

void criterion_12(Verdict_& v) {
    const double bound = nonexistence_bound(RadialDisk{1.0});
    const double lambda = kBoundFactor * bound;
    const auto c = classify(lambda, scenario("disk-radial"));
    v.require(c.verdict == Verdict::Quenched, "bound " + fmt(bound, 8) + ", " + describe_class(c));
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Verdict_&)> check;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "1D dichotomy at lambda 8.53 / 8.54 by t=10", criterion_1},
        {2, "1D critical bracket from (8, 9)", criterion_2},
        {3, "radial disk dichotomy and bracket", criterion_3},
        {4, "unit square dichotomy and bracket", criterion_4},
        {5, "non-radial disk datum converges at lambda 20", criterion_5},
        {6, "energy is a Lyapunov function and tracks the dissipation", criterion_6},
        {7, "Newton steady state equals the long-time limit", criterion_7},
        {8, "exponential decay to the steady state at lambda 8", criterion_8},
        {9, "midpoint value increases with lambda", criterion_9},
        {10, "Jacobian and rank-one solve oracles", criterion_10},
        {11, "quadrature, Laplacian and weight oracles", criterion_11},
        {12, "quench above the nonexistence bound on the disk", criterion_12},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 64;
        }
    }

    int failed = 0, ran = 0;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        Verdict_ v;
        const auto t0 = Clock::now();
        try {
            c.check(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        std::printf("[%s] C%-2d %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                    v.detail.str().c_str());
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 64;
    }
    return failed == 0 ? 0 : 1;
}
