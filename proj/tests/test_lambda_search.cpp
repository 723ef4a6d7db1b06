#include <gtest/gtest.h>

#include "mems/errors.hpp"
#include "mems/lambda_search.hpp"
#include "mems/steady_state.hpp"

using namespace mems;

namespace {

SimConfig interval_scenario(std::size_t n) {
    SimConfig c(build_grid(Interval{1.0}, n));
    c.t_max = 10.0;
    return c;
}

}  // namespace

TEST(Classify, ZeroLambdaConvergesEverywhere) {
    for (const char* name : {"1d-unit", "disk-radial", "square-unit", "disk-cartesian"}) {
        const Preset p = find_preset(name, 21);
        const auto c = classify(0.0, p.config);
        EXPECT_EQ(c.verdict, Verdict::Converged) << name << ": " << c.reason;
    }
}

TEST(Classify, BelowAndAboveFold) {
    const SimConfig s = interval_scenario(101);
    const auto low = classify(8.0, s, {3, true});
    EXPECT_EQ(low.verdict, Verdict::Converged);
    const auto high = classify(9.0, s);
    EXPECT_EQ(high.verdict, Verdict::Quenched);
    EXPECT_LT(high.t_terminal, 10.0);
    EXPECT_GE(high.evidence.max_u, 0.9);
    EXPECT_THROW(classify(-1.0, s), InvalidArgument);
}

TEST(Classify, HorizonDoubling) {
    SimConfig s = interval_scenario(51);
    s.t_max = 0.5;
    const auto plain = classify(5.0, s);
    EXPECT_EQ(plain.verdict, Verdict::Undetermined);
    EXPECT_FALSE(plain.reason.empty());
    EXPECT_EQ(plain.t_max_used, 0.5);

    const auto doubled = classify(5.0, s, {2, false});
    EXPECT_EQ(doubled.t_max_used, 2.0);

    const auto resolved = classify(5.0, s, {1, true});
    EXPECT_EQ(resolved.verdict, Verdict::Converged);
    EXPECT_EQ(resolved.t_max_used, 1.0);
}

// The bracket has to contain the fold of the same discretization.
TEST(Bisect, BracketsContinuationFold) {
    const SimConfig s = interval_scenario(51);
    std::vector<double> targets;
    for (double l = 0.5; l <= 9.0; l += 0.5) targets.push_back(l);
    const auto branch = continuation(s.grid, targets, Params{}, {}, 1e-5);
    ASSERT_TRUE(branch.fold_estimate.has_value());

    BisectOptions opts;
    opts.tol = 0.05;
    const BisectResult r = bisect_lambda_star(s, 8.0, 9.0, opts);
    EXPECT_LE(r.hi - r.lo, 0.05);
    EXPECT_LE(r.lo, *branch.fold_estimate + 1e-3);
    EXPECT_GE(r.hi, *branch.fold_estimate - 1e-3);
    EXPECT_TRUE(r.monotonicity_violations.empty());
    EXPECT_EQ(static_cast<std::size_t>(r.classify_calls), r.history.size());

    opts.jobs = 3;
    const BisectResult par = bisect_lambda_star(s, 8.0, 9.0, opts);
    EXPECT_LE(par.hi - par.lo, 0.05);
    EXPECT_LE(par.lo, *branch.fold_estimate + 1e-3);
    EXPECT_GE(par.hi, *branch.fold_estimate - 1e-3);
    EXPECT_LT(par.rounds, r.rounds);
}

TEST(Bisect, RejectsBadBrackets) {
    const SimConfig s = interval_scenario(51);
    EXPECT_THROW(bisect_lambda_star(s, 9.0, 10.0), InvalidBracket);
    EXPECT_THROW(bisect_lambda_star(s, 1.0, 2.0), InvalidBracket);
    EXPECT_THROW(bisect_lambda_star(s, 2.0, 1.0), InvalidBracket);
}

TEST(Sweep, ProbeSeries) {
    SimConfig s = interval_scenario(101);
    s.snapshot_times = {0.0, 0.5, 1.0, 1.5};
    s.t_max = 1.5;
    const std::size_t mid = s.grid->nearest_node(0.5);
    const std::vector<double> lambdas{2.0, 4.0, 9.5};
    const auto series = sweep(s, lambdas, mid, 2);
    ASSERT_EQ(series.size(), 3u);
    EXPECT_EQ(series[0].lambda, 2.0);
    EXPECT_EQ(series[2].verdict, Verdict::Quenched);
    ASSERT_EQ(series[1].probe.size(), 4u);
    EXPECT_EQ(series[1].probe.front().t, 0.0);
    EXPECT_EQ(series[1].probe.front().value, 0.0);
    EXPECT_EQ(series[1].probe.back().t, 1.5);
    EXPECT_GT(series[1].probe.back().value, series[0].probe.back().value);

    const auto serial = sweep(s, lambdas, mid, 1);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        ASSERT_EQ(serial[i].probe.size(), series[i].probe.size());
        for (std::size_t j = 0; j < serial[i].probe.size(); ++j)
            EXPECT_EQ(serial[i].probe[j].value, series[i].probe[j].value);
    }
    EXPECT_THROW(sweep(s, lambdas, 1000), InvalidArgument);
}
