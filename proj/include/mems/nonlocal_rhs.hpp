#pragma once

#include "mems/domain.hpp"

namespace mems {

/// Scalar parameters of the nonlocal MEMS equation
///   u_t - Laplacian u = lambda / ((1 - u)^2 (1 + alpha * Integral 1/(1-u))^2).
struct Params {
    double lambda = 0.0;       // applied voltage
    double alpha = 1.0;        // nonlocal (series capacitor) coupling
    double delta_trunc = 0.1;  // truncation level of g_delta, in (0, 1/2)
    double quench_eps = 1e-2;  // quench declared when max u >= 1 - quench_eps

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
    bool operator==(const Params&) const = default;
};

/// g_delta(v) = 1/(1-v) for v <= 1-delta, 1/delta beyond.
double g_trunc(double v, double delta);

/// Integral of 1/(1-u) (or g_delta(u) when truncated) over the grid.
/// Untruncated evaluation throws SingularityError when max(u) >= 1.
double nonlocal_integral(const Field& u, const Params& params, bool truncated = false);

/// Pointwise lambda * g(u)^2 / (1 + alpha * I)^2 with one shared I.
Field reaction(const Field& u, const Params& params, bool truncated = false);

/// Non-Laplacian part of the linearization about psi:
///   J w = diag * w - left * quadrature(right * w).
struct RankOneJacobian {
    Field diag;
    Field left;
    Field right;
};

RankOneJacobian reaction_jacobian(const Field& psi, const Params& params);

/// Applies J to w; equals the Gateaux derivative of reaction() at psi.
Field apply(const RankOneJacobian& jac, const Field& w);

}  // namespace mems
