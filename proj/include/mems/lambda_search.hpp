#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mems/errors.hpp"
#include "mems/time_integrator.hpp"

namespace mems {

enum class Verdict { Converged, Quenched, Undetermined };

std::string verdict_name(Verdict verdict);

struct LambdaClassification {
    double lambda = 0.0;
    Verdict verdict = Verdict::Undetermined;
    double t_terminal = 0.0;
    TrajectorySample evidence;
    /// Horizon of the run that produced the verdict.
    double t_max_used = 0.0;
    /// Why the verdict is Undetermined (empty otherwise).
    std::string reason;
};

struct ClassifyOptions {
    /// Re-run an Undetermined case with t_max doubled, at most this many
    /// times (3 caps the horizon at 8x the scenario's).
    int horizon_doublings = 0;
    /// Treat a case that is still Undetermined after the last doubling as
    /// Converged.
    bool undetermined_as_converged = false;
};

/// Runs the scenario's grid and u0 at this lambda and maps the outcome to a
/// verdict. Simulation errors become Undetermined with a reason.
LambdaClassification classify(double lambda, const SimConfig& scenario, const ClassifyOptions& options = {});

class InvalidBracket : public Error {
public:
    using Error::Error;
};

struct BisectOptions {
    double tol = 0.05;
    /// Midpoints evaluated concurrently per round; 1 gives plain bisection.
    int jobs = 1;
    ClassifyOptions classify{3, true};
};

struct BisectResult {
    double lo = 0.0;
    double hi = 0.0;
    int rounds = 0;
    int classify_calls = 0;
    std::vector<LambdaClassification> history;
    /// Converged verdicts found above a Quenched one (the dichotomy is a
    /// conjecture, so these are reported, not thrown).
    std::vector<std::string> monotonicity_violations;
};

/// Shrinks [lo, hi] with classify(lo) = Converged, classify(hi) = Quenched
/// until hi - lo <= tol. Throws InvalidBracket when the ends do not classify
/// that way.
BisectResult bisect_lambda_star(const SimConfig& scenario, double lo, double hi, const BisectOptions& options = {});

struct ProbePoint {
    double t = 0.0;
    double value = 0.0;
};

struct SweepSeries {
    double lambda = 0.0;
    Verdict verdict = Verdict::Undetermined;
    double t_terminal = 0.0;
    /// u at the probe node at t = 0 and at each snapshot time reached.
    std::vector<ProbePoint> probe;
};

/// Runs the scenario once per lambda (no horizon doubling) and samples the
/// probe node at the scenario's snapshot times. Up to `jobs` runs at once.
std::vector<SweepSeries> sweep(const SimConfig& scenario, std::span<const double> lambdas, std::size_t probe_node,
                               int jobs = 1);

}  // namespace mems
