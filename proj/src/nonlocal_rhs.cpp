#include "mems/nonlocal_rhs.hpp"

#include <cmath>

#include "mems/errors.hpp"

namespace mems {

void Params::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("lambda must be a finite nonnegative number, got " + std::to_string(lambda));
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("alpha must be positive, got " + std::to_string(alpha));
    if (!(delta_trunc > 0.0 && delta_trunc < 0.5))
        throw InvalidArgument("delta_trunc must lie in (0, 1/2), got " + std::to_string(delta_trunc));
    if (!(quench_eps > 0.0 && quench_eps < 1.0))
        throw InvalidArgument("quench_eps must lie in (0, 1), got " + std::to_string(quench_eps));
}

double g_trunc(double v, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("g_trunc: delta must lie in (0, 1/2)");
    return v <= 1.0 - delta ? 1.0 / (1.0 - v) : 1.0 / delta;
}

namespace {

// 1/(1-v) or its truncation, per node.
double reciprocal_gap(double v, const Params& p, bool truncated) {
    return truncated ? g_trunc(v, p.delta_trunc) : 1.0 / (1.0 - v);
}

void require_below_one(const Field& u) {
    const double m = u.max();
    if (!(m < 1.0)) throw SingularityError(m);
}

}  // namespace

double nonlocal_integral(const Field& u, const Params& params, bool truncated) {
    if (!truncated) require_below_one(u);
    const auto w = u.grid().weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) sum += w[k] * reciprocal_gap(u[k], params, truncated);
    return sum;
}

Field reaction(const Field& u, const Params& params, bool truncated) {
    const double integral = nonlocal_integral(u, params, truncated);
    const double denom = 1.0 + params.alpha * integral;
    const double scale = params.lambda / (denom * denom);
    Field f(u.grid_ptr());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double g = reciprocal_gap(u[k], params, truncated);
        f[k] = scale * g * g;
    }
    return f;
}

RankOneJacobian reaction_jacobian(const Field& psi, const Params& params) {
    const double integral = nonlocal_integral(psi, params, false);
    const double denom = 1.0 + params.alpha * integral;
    const double local = 2.0 * params.lambda / (denom * denom);
    const double nonlocal = 2.0 * params.lambda * params.alpha / (denom * denom * denom);
    RankOneJacobian jac{Field(psi.grid_ptr()), Field(psi.grid_ptr()), Field(psi.grid_ptr())};
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const double g = 1.0 / (1.0 - psi[k]);
        jac.diag[k] = local * g * g * g;
        jac.left[k] = nonlocal * g * g;
        jac.right[k] = g * g;
    }
    return jac;
}

Field apply(const RankOneJacobian& jac, const Field& w) {
    require_same_grid(jac.diag, w);
    const auto weights = w.grid().weights();
    double coupling = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) coupling += weights[k] * jac.right[k] * w[k];
    Field out(w.grid_ptr());
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = jac.diag[k] * w[k] - jac.left[k] * coupling;
    return out;
}

}  // namespace mems
