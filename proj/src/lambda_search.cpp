#include "mems/lambda_search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "mems/errors.hpp"

namespace mems {

std::string verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Converged: return "converged";
        case Verdict::Quenched: return "quenched";
        default: return "undetermined";
    }
}

LambdaClassification classify(double lambda, const SimConfig& scenario, const ClassifyOptions& options) {
    if (!(lambda >= 0.0)) throw InvalidArgument("classify: lambda must be nonnegative");
    SimConfig config = scenario;
    config.params.lambda = lambda;
    config.snapshot_times.clear();

    LambdaClassification c;
    c.lambda = lambda;
    for (int attempt = 0;; ++attempt) {
        c.t_max_used = config.t_max;
        try {
            const SimResult result = run(config);
            c.evidence = result.samples.back();
            if (const auto* conv = std::get_if<Converged>(&result.outcome)) {
                c.verdict = Verdict::Converged;
                c.t_terminal = conv->t_reached;
                c.reason.clear();
                return c;
            }
            if (const auto* q = std::get_if<Quenched>(&result.outcome)) {
                c.verdict = Verdict::Quenched;
                c.t_terminal = q->t_quench;
                c.reason = q->by_dt_collapse ? "by-dt-collapse" : "";
                return c;
            }
            c.verdict = Verdict::Undetermined;
            c.t_terminal = config.t_max;
            c.reason = "t_max reached without convergence or quenching";
        } catch (const Error& e) {
            c.verdict = Verdict::Undetermined;
            c.t_terminal = 0.0;
            c.reason = e.what();
            break;
        }
        if (attempt >= options.horizon_doublings) break;
        config.t_max *= 2.0;
    }
    if (options.undetermined_as_converged && c.reason.rfind("t_max reached", 0) == 0) {
        c.verdict = Verdict::Converged;
        c.reason = "undetermined at the horizon cap, resolved as converged";
    }
    return c;
}

BisectResult bisect_lambda_star(const SimConfig& scenario, double lo, double hi, const BisectOptions& options) {
    if (!(lo >= 0.0 && hi > lo)) throw InvalidBracket("bisection needs 0 <= lo < hi");
    if (!(options.tol > 0.0)) throw InvalidArgument("bisection tolerance must be positive");
    const int jobs = std::max(1, options.jobs);

    BisectResult result;
    auto record = [&](const LambdaClassification& c) {
        result.history.push_back(c);
        ++result.classify_calls;
    };

    const auto at_lo = classify(lo, scenario, options.classify);
    record(at_lo);
    if (at_lo.verdict != Verdict::Converged)
        throw InvalidBracket("lower end lambda=" + std::to_string(lo) + " classifies as " + verdict_name(at_lo.verdict));
    const auto at_hi = classify(hi, scenario, options.classify);
    record(at_hi);
    if (at_hi.verdict != Verdict::Quenched)
        throw InvalidBracket("upper end lambda=" + std::to_string(hi) + " classifies as " + verdict_name(at_hi.verdict));

    while (hi - lo > options.tol) {
        std::vector<double> points;
        for (int i = 1; i <= jobs; ++i) points.push_back(lo + (hi - lo) * i / (jobs + 1));

        std::vector<LambdaClassification> verdicts;
        if (jobs == 1) {
            verdicts.push_back(classify(points[0], scenario, options.classify));
        } else {
            std::vector<std::future<LambdaClassification>> pending;
            for (double p : points)
                pending.push_back(std::async(std::launch::async,
                                             [&, p] { return classify(p, scenario, options.classify); }));
            for (auto& f : pending) verdicts.push_back(f.get());
        }
        for (const auto& v : verdicts) record(v);

        // New bracket: the first quenched point and its left neighbour.
        double new_lo = lo, new_hi = hi;
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            if (verdicts[i].verdict == Verdict::Quenched) {
                new_hi = points[i];
                break;
            }
            new_lo = points[i];
        }
        lo = new_lo;
        hi = new_hi;
        ++result.rounds;
    }

    double lowest_quench = INFINITY;
    for (const auto& c : result.history)
        if (c.verdict == Verdict::Quenched) lowest_quench = std::min(lowest_quench, c.lambda);
    for (const auto& c : result.history) {
        if (c.verdict == Verdict::Converged && c.lambda > lowest_quench) {
            std::ostringstream os;
            os << "converged at lambda=" << c.lambda << " above a quenched lambda=" << lowest_quench;
            result.monotonicity_violations.push_back(os.str());
        }
    }
    result.lo = lo;
    result.hi = hi;
    return result;
}

namespace {

SweepSeries sweep_one(const SimConfig& scenario, double lambda, std::size_t probe_node) {
    SimConfig config = scenario;
    config.params.lambda = lambda;
    SweepSeries s;
    s.lambda = lambda;
    try {
        const SimResult result = run(config);
        if (result.snapshots.empty() || result.snapshots.front().t > 0.0)
            s.probe.push_back({0.0, config.u0[probe_node]});
        for (const auto& snap : result.snapshots) s.probe.push_back({snap.t, snap.u[probe_node]});
        s.t_terminal = result.t_end();
        if (const auto* q = std::get_if<Quenched>(&result.outcome)) {
            s.verdict = Verdict::Quenched;
            s.t_terminal = q->t_quench;
        } else if (result.converged()) {
            s.verdict = Verdict::Converged;
        }
    } catch (const Error&) {
        s.verdict = Verdict::Undetermined;
        s.probe.assign(1, {0.0, config.u0[probe_node]});
    }
    return s;
}

}  // namespace

std::vector<SweepSeries> sweep(const SimConfig& scenario, std::span<const double> lambdas, std::size_t probe_node,
                               int jobs) {
    if (probe_node >= scenario.grid->size()) throw InvalidArgument("sweep: probe node outside the grid");
    for (double l : lambdas)
        if (!(l >= 0.0)) throw InvalidArgument("sweep: lambda must be nonnegative");
    std::vector<SweepSeries> out(lambdas.size());
    const std::size_t batch = static_cast<std::size_t>(std::max(1, jobs));
    for (std::size_t start = 0; start < lambdas.size(); start += batch) {
        const std::size_t stop = std::min(lambdas.size(), start + batch);
        if (batch == 1) {
            out[start] = sweep_one(scenario, lambdas[start], probe_node);
            continue;
        }
        std::vector<std::future<SweepSeries>> pending;
        for (std::size_t i = start; i < stop; ++i)
            pending.push_back(std::async(std::launch::async, [&, i] { return sweep_one(scenario, lambdas[i], probe_node); }));
        for (std::size_t i = start; i < stop; ++i) out[i] = pending[i - start].get();
    }
    return out;
}

}  // namespace mems
