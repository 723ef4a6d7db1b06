#include "mems/steady_state.hpp"

#include <algorithm>
#include <cmath>

#include "mems/diagnostics.hpp"
#include "mems/grid_ops.hpp"

namespace mems {

namespace {

std::string kind_name(NewtonError::Kind kind) {
    return kind == NewtonError::Kind::NoConvergence ? "no convergence" : "step collapse";
}

// Quadrature of a * b.
double weighted_dot(const Field& a, const Field& b) {
    const auto w = a.grid().weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += w[k] * a[k] * b[k];
    return sum;
}

}  // namespace

NewtonError::NewtonError(Kind kind, double residual, int iterations)
    : Error("Newton failed (" + kind_name(kind) + ") after " + std::to_string(iterations) +
            " iterations, residual " + std::to_string(residual)),
      kind_(kind),
      residual_(residual),
      iterations_(iterations) {}

Field residual(const Field& phi, const Params& params) {
    Field r = laplacian_apply(phi);
    const Field f = reaction(phi, params);
    const Grid& g = phi.grid();
    for (std::size_t k = 0; k < phi.size(); ++k) r[k] = g.is_interior(k) ? -r[k] - f[k] : 0.0;
    return r;
}

Field solve_linearized(const Field& psi, const Params& params, const Field& rhs) {
    require_same_grid(psi, rhs);
    const RankOneJacobian jac = reaction_jacobian(psi, params);
    Field shift(psi.grid_ptr());
    for (std::size_t k = 0; k < psi.size(); ++k) shift[k] = -jac.diag[k];

    const Field y = solve_shifted_laplacian(shift, 1.0, rhs, PlaneSolver::SparseLU);
    const Field z = solve_shifted_laplacian(shift, 1.0, jac.left, PlaneSolver::SparseLU);
    const double vy = weighted_dot(jac.right, y);
    const double vz = weighted_dot(jac.right, z);
    const double denom = 1.0 + vz;
    if (denom == 0.0 || !std::isfinite(denom)) throw SolverError("rank-one update is singular", denom);

    Field x(psi.grid_ptr());
    const double c = vy / denom;
    for (std::size_t k = 0; k < psi.size(); ++k) x[k] = y[k] - c * z[k];
    return x;
}

BranchPoint newton_solve(const Field& phi0, const Params& params, const NewtonOptions& options) {
    params.validate();
    if (!(phi0.max() < 1.0)) throw InvalidArgument("newton_solve: initial guess must satisfy max(phi0) < 1");
    if (!phi0.satisfies_boundary()) throw InvalidArgument("newton_solve: initial guess violates the boundary");

    BranchPoint point{params.lambda, phi0, 0.0, 0, 0.0, {}};
    Field r = residual(point.phi, params);
    double norm = l2_norm(r);
    const double ceiling = 1.0 - options.max_phi_margin;

    for (int iter = 0;; ++iter) {
        point.residual_history.push_back(norm);
        if (norm <= options.tol) {
            point.newton_iters = iter;
            point.residual_norm = norm;
            point.max_phi = point.phi.max();
            return point;
        }
        if (iter >= options.max_iters) throw NewtonError(NewtonError::Kind::NoConvergence, norm, iter);

        Field minus_r = r;
        for (auto& v : minus_r.values()) v = -v;
        const Field delta = solve_linearized(point.phi, params, minus_r);

        bool accepted = false;
        for (double s = 1.0; s >= options.damping_floor; s *= 0.5) {
            Field candidate = point.phi;
            for (std::size_t k = 0; k < candidate.size(); ++k) candidate[k] += s * delta[k];
            if (!(candidate.max() < ceiling) || !candidate.all_finite()) continue;
            Field r_candidate = residual(candidate, params);
            const double n_candidate = l2_norm(r_candidate);
            if (n_candidate < norm) {
                point.phi = std::move(candidate);
                r = std::move(r_candidate);
                norm = n_candidate;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw NewtonError(NewtonError::Kind::StepCollapse, norm, iter + 1);
    }
}

ContinuationResult continuation(const GridPtr& grid, std::span<const double> lambda_targets,
                                const Params& params_template, const NewtonOptions& options, double step_floor) {
    for (std::size_t i = 0; i < lambda_targets.size(); ++i) {
        if (!(lambda_targets[i] >= 0.0)) throw InvalidArgument("continuation targets must be nonnegative");
        if (i > 0 && !(lambda_targets[i] > lambda_targets[i - 1]))
            throw InvalidArgument("continuation targets must be strictly increasing");
    }
    if (!(step_floor > 0.0)) throw InvalidArgument("continuation step floor must be positive");

    ContinuationResult result;
    Field phi(grid);
    double lambda_reached = 0.0;
    Params params = params_template;

    auto attempt = [&](double lambda) -> std::optional<BranchPoint> {
        params.lambda = lambda;
        try {
            return newton_solve(phi, params, options);
        } catch (const NewtonError& e) {
            result.failures.push_back("lambda=" + std::to_string(lambda) + ": " + e.what());
        } catch (const SolverError& e) {
            result.failures.push_back("lambda=" + std::to_string(lambda) + ": " + e.what());
        }
        return std::nullopt;
    };

    for (double target : lambda_targets) {
        if (auto point = attempt(target)) {
            phi = point->phi;
            lambda_reached = target;
            result.branch.push_back(std::move(*point));
            continue;
        }
        // Locate the fold between the last success and the failed target.
        double step = 0.5 * (target - lambda_reached);
        while (step >= step_floor) {
            const double trial = lambda_reached + step;
            if (trial >= target) {
                step *= 0.5;
                continue;
            }
            if (auto point = attempt(trial)) {
                phi = point->phi;
                lambda_reached = trial;
                result.fold_search.push_back(std::move(*point));
            } else {
                step *= 0.5;
            }
        }
        result.fold_estimate = lambda_reached;
        break;
    }
    return result;
}

bool branch_is_monotone(std::span<const BranchPoint> branch, double tol) {
    for (std::size_t i = 1; i < branch.size(); ++i) {
        const Field& lo = branch[i - 1].phi;
        const Field& hi = branch[i].phi;
        require_same_grid(lo, hi);
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (hi[k] < lo[k] - tol) return false;
    }
    return true;
}

}  // namespace mems
