#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mems/domain.hpp"
#include "mems/errors.hpp"
#include "mems/nonlocal_rhs.hpp"

namespace mems {

struct NewtonOptions {
    double tol = 1e-10;  // weighted L2 norm of the residual
    int max_iters = 50;
    double damping_floor = 0x1p-20;
    double max_phi_margin = 1e-6;  // iterates must keep max(phi) < 1 - margin
};

struct BranchPoint {
    double lambda = 0.0;
    Field phi;
    double max_phi = 0.0;
    int newton_iters = 0;
    double residual_norm = 0.0;
    /// Weighted L2 residual before each iteration and at exit.
    std::vector<double> residual_history;
};

class NewtonError : public Error {
public:
    enum class Kind { NoConvergence, StepCollapse };
    NewtonError(Kind kind, double residual, int iterations);
    Kind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    Kind kind_;
    double residual_;
    int iterations_;
};

/// -Laplacian_h phi - reaction(phi) at interior nodes, zero on Dirichlet nodes.
Field residual(const Field& phi, const Params& params);

/// Solves (-Laplacian_h - D + left right^T W) x = rhs, the linearization of
/// residual() about psi, by factoring the sparse part and applying the
/// Sherman-Morrison correction for the nonlocal rank-one term.
Field solve_linearized(const Field& psi, const Params& params, const Field& rhs);

/// Damped Newton on residual(). Throws NewtonError on failure.
BranchPoint newton_solve(const Field& phi0, const Params& params, const NewtonOptions& options = {});

struct ContinuationResult {
    /// Solutions at the requested lambda values that were reached.
    std::vector<BranchPoint> branch;
    /// Largest lambda reached while halving the step after a failure.
    std::optional<double> fold_estimate;
    /// Extra solves performed while locating the fold.
    std::vector<BranchPoint> fold_search;
    std::vector<std::string> failures;
};

/// Minimal-branch continuation over increasing targets, warm-starting each
/// solve from the previous one. After the first failure the step is halved
/// down to step_floor and the last success is reported as the fold estimate;
/// later targets are not attempted.
ContinuationResult continuation(const GridPtr& grid, std::span<const double> lambda_targets,
                                const Params& params_template, const NewtonOptions& options = {},
                                double step_floor = 1e-4);

/// True when every phi on the branch is pointwise >= its predecessor - tol.
bool branch_is_monotone(std::span<const BranchPoint> branch, double tol = 1e-10);

}  // namespace mems
