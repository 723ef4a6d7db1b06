#include "mems/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mems/errors.hpp"
#include "mems/grid_ops.hpp"
#include "mems/time_integrator.hpp"

namespace mems {

namespace {

double gradient_energy(const Field& u) {
    const Grid& g = u.grid();
    double sum = 0.0;
    switch (g.layout()) {
        case Layout::Line: {
            for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
                const double d = u[i + 1] - u[i];
                sum += d * d;
            }
            sum /= g.hx();
            break;
        }
        case Layout::Radial: {
            const double h = g.hx();
            for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
                const double d = u[i + 1] - u[i];
                const double r_mid = 0.5 * (g.x(i) + g.x(i + 1));
                sum += 2.0 * std::numbers::pi * r_mid * d * d / h;
            }
            break;
        }
        case Layout::Plane: {
            const double fx = g.hy() / g.hx();
            const double fy = g.hx() / g.hy();
            for (std::size_t j = 0; j < g.ny(); ++j) {
                for (std::size_t i = 0; i < g.nx(); ++i) {
                    const std::size_t k = g.index(i, j);
                    if (i + 1 < g.nx()) {
                        const double d = u[k + 1] - u[k];
                        sum += fx * d * d;
                    }
                    if (j + 1 < g.ny()) {
                        const double d = u[k + g.nx()] - u[k];
                        sum += fy * d * d;
                    }
                }
            }
            break;
        }
    }
    return 0.5 * sum;
}

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

}  // namespace

double energy(const Field& u, const Params& params) {
    const double integral = nonlocal_integral(u, params, false);
    return gradient_energy(u) + params.lambda / (params.alpha * (1.0 + params.alpha * integral));
}

double l2_distance(const Field& a, const Field& b) {
    require_same_grid(a, b);
    const auto w = a.grid().weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += w[k] * d * d;
    }
    return std::sqrt(sum);
}

double l2_norm(const Field& a) {
    const auto w = a.grid().weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += w[k] * a[k] * a[k];
    return std::sqrt(sum);
}

std::vector<DecaySample> default_fit_window(std::span<const DecaySample> samples) {
    std::vector<DecaySample> usable;
    for (const auto& s : samples)
        if (s.distance > kDistanceNoiseFloor) usable.push_back(s);
    const std::size_t keep = static_cast<std::size_t>(std::ceil(0.6 * static_cast<double>(usable.size())));
    return {usable.end() - static_cast<std::ptrdiff_t>(keep), usable.end()};
}

DecayFit fit_decay(std::span<const DecaySample> samples, DecayModelSelection selection) {
    if (!samples.empty() && std::all_of(samples.begin(), samples.end(), [](const DecaySample& s) {
            return std::abs(s.distance) <= kDistanceNoiseFloor;
        })) {
        DecayFit fit;
        fit.converged_exactly = true;
        fit.r_squared = 1.0;
        fit.t_start = samples.front().t;
        fit.t_end = samples.back().t;
        return fit;
    }

    std::vector<double> t, log_t, log_d;
    for (const auto& s : samples) {
        if (!(s.distance > kDistanceNoiseFloor) || !std::isfinite(s.distance) || !std::isfinite(s.t) || s.t <= -1.0)
            continue;
        t.push_back(s.t);
        log_t.push_back(std::log1p(s.t));
        log_d.push_back(std::log(s.distance));
    }
    if (t.size() < 10)
        throw InsufficientData("fit_decay needs at least 10 samples above the noise floor, got " +
                               std::to_string(t.size()));

    const LineFit exp_fit = least_squares(t, log_d);
    const LineFit alg_fit = least_squares(log_t, log_d);
    const bool exp_ok = exp_fit.slope < 0.0;
    const bool alg_ok = alg_fit.slope < 0.0;

    bool use_exp = false;
    switch (selection) {
        case DecayModelSelection::Exponential:
            if (!exp_ok) throw InvalidArgument("fit_decay: distances are not decaying exponentially");
            use_exp = true;
            break;
        case DecayModelSelection::Algebraic:
            if (!alg_ok) throw InvalidArgument("fit_decay: distances are not decaying algebraically");
            use_exp = false;
            break;
        case DecayModelSelection::Auto:
            if (!exp_ok && !alg_ok) throw InvalidArgument("fit_decay: distances are not decaying");
            use_exp = exp_ok && (!alg_ok || exp_fit.r_squared >= alg_fit.r_squared);
            break;
    }

    DecayFit fit;
    fit.t_start = t.front();
    fit.t_end = t.back();
    if (use_exp) {
        fit.model = ExponentialDecay{-exp_fit.slope, std::exp(exp_fit.intercept)};
        fit.r_squared = exp_fit.r_squared;
        fit.rival_r_squared = alg_fit.r_squared;
        fit.theta_implied = 0.5;
    } else {
        const double p = -alg_fit.slope;
        fit.model = AlgebraicDecay{p, std::exp(alg_fit.intercept)};
        fit.r_squared = alg_fit.r_squared;
        fit.rival_r_squared = exp_fit.r_squared;
        fit.theta_implied = p / (1.0 + 2.0 * p);
    }
    return fit;
}

double nonexistence_bound(const Domain& domain, std::optional<double> beta) {
    if (std::holds_alternative<Interval>(domain))
        throw InvalidArgument("nonexistence bound requires a domain of dimension N >= 2");
    validate(domain);
    const bool disk = std::holds_alternative<RadialDisk>(domain) || std::holds_alternative<EmbeddedDisk>(domain);
    if (!beta) {
        if (!disk) throw InvalidArgument("star-shape constant beta must be supplied for non-disk domains");
        beta = 1.0 / (2.0 * std::numbers::pi);
    }
    if (!(*beta > 0.0) || !std::isfinite(*beta)) throw InvalidArgument("beta must be positive");
    const double area = measure(domain);
    const double n = static_cast<double>(dimension(domain));
    return n * std::pow(1.0 + area, 4) / (2.0 * *beta * area * area);
}

EnergyAudit audit_energy(std::span<const TrajectorySample> samples, double slack, double dt_threshold,
                         double noise_floor) {
    EnergyAudit audit;
    audit.worst_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& a = samples[k];
        const auto& b = samples[k + 1];
        const double excess = b.energy - a.energy - slack * (1.0 + std::abs(a.energy));
        audit.worst_increase = std::max(audit.worst_increase, excess);
        if (excess > 0.0) ++audit.increases;

        const double dt = b.t - a.t;
        const bool one_step = b.dt_used > 0.0 && std::abs(dt - b.dt_used) <= 1e-12 * std::max(1.0, b.t);
        if (!one_step || b.dt_used > dt_threshold) continue;
        const double drop = a.energy - b.energy;
        if (drop <= noise_floor * (1.0 + std::abs(a.energy))) continue;
        const double dissipation = b.l2_ut * b.l2_ut;
        const double err = std::abs(drop / dt - dissipation) / dissipation;
        audit.worst_identity_error = std::max(audit.worst_identity_error, err);
        ++audit.identity_checked;
    }
    if (samples.size() < 2) audit.worst_increase = 0.0;
    return audit;
}

}  // namespace mems
