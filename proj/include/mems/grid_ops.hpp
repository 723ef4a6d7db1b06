#pragma once

#include <span>
#include <vector>

#include "mems/domain.hpp"

namespace mems {

/// Sum of weights[i] * f[i] over all nodes.
double quadrature(const Field& f);

/// Second-order discrete Laplacian at interior nodes, zero on Dirichlet nodes.
/// Throws InvalidArgument if f is nonzero on a Dirichlet node.
Field laplacian_apply(const Field& f);
/// The same stencil without the boundary check: boundary values of f enter
/// the neighbouring interior rows as given.
Field laplacian_stencil(const Field& f);

/// Solves (I - dt * Laplacian_h) u = rhs with Dirichlet rows pinned to zero.
/// Line and radial grids use tridiagonal elimination; plane grids use
/// conjugate gradients to a relative residual of 1e-10, warm-started from
/// `guess` when given.
Field implicit_solve(double dt, const Field& rhs, const Field* guess = nullptr);

enum class PlaneSolver { ConjugateGradient, SparseLU };

/// Solves (diag - coeff * Laplacian_h) x = rhs on interior nodes. Values of
/// diag and rhs on Dirichlet nodes are ignored; x is zero there. The CG path
/// requires the operator to be positive definite.
Field solve_shifted_laplacian(const Field& diag, double coeff, const Field& rhs,
                              PlaneSolver plane_solver = PlaneSolver::SparseLU,
                              const Field* guess = nullptr);

/// Thomas algorithm for a tridiagonal system. sub[0] and sup[n-1] are unused.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs);

}  // namespace mems
