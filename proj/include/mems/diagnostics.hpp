#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mems/domain.hpp"
#include "mems/nonlocal_rhs.hpp"

namespace mems {

struct TrajectorySample;

/// E(u) = 1/2 Integral |grad u|^2 + lambda / (alpha (1 + alpha I)).
/// The gradient term uses forward differences on cells (2*pi*r_{i+1/2}
/// weighted on radial grids). Throws SingularityError when max(u) >= 1.
double energy(const Field& u, const Params& params);

/// sqrt(sum_i w_i (a_i - b_i)^2).
double l2_distance(const Field& a, const Field& b);
double l2_norm(const Field& a);

enum class DecayModelSelection { Auto, Exponential, Algebraic };

struct ExponentialDecay {
    double rate = 0.0;
    double amplitude = 0.0;
};

struct AlgebraicDecay {
    double exponent = 0.0;
    double amplitude = 0.0;
};

struct DecayFit {
    std::variant<ExponentialDecay, AlgebraicDecay> model;
    double r_squared = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    /// 1/2 for an exponential fit, exponent / (1 + 2 exponent) for an algebraic
    /// one (inverse of exponent = theta / (1 - 2 theta)).
    double theta_implied = 0.5;
    /// Every distance was below the noise floor: the run already sits on the
    /// steady state and no rate can be fitted.
    bool converged_exactly = false;
    /// r^2 of the model that was not selected (NaN when not evaluated).
    double rival_r_squared = 0.0;

    bool is_exponential() const { return std::holds_alternative<ExponentialDecay>(model); }
};

struct DecaySample {
    double t = 0.0;
    double distance = 0.0;
};

inline constexpr double kDistanceNoiseFloor = 1e-12;

/// Least-squares fit of log d against t (exponential) and against
/// log(1 + t) (algebraic). Needs at least 10 samples above the noise floor.
DecayFit fit_decay(std::span<const DecaySample> samples,
                   DecayModelSelection selection = DecayModelSelection::Auto);

/// Default fit window: the last 60% of the samples whose distance exceeds the
/// noise floor.
std::vector<DecaySample> default_fit_window(std::span<const DecaySample> samples);

/// Nonexistence threshold N (1 + |Omega|)^4 / (2 beta |Omega|^2) for strictly
/// star-shaped 2D domains. beta may be omitted for disks, where it is
/// (x . nu) / |boundary| = 1 / (2 pi).
double nonexistence_bound(const Domain& domain, std::optional<double> beta = std::nullopt);

/// Result of auditing a recorded trajectory against dE/dt = -||u_t||^2.
struct EnergyAudit {
    /// Largest E(t_{k+1}) - E(t_k) - slack * (1 + |E(t_k)|); <= 0 means monotone.
    double worst_increase = 0.0;
    std::size_t increases = 0;
    /// Largest |(-dE/dt) - l2_ut^2| / l2_ut^2 over checked steps.
    double worst_identity_error = 0.0;
    std::size_t identity_checked = 0;
};

/// Checks monotonicity with per-step slack `slack * (1 + |E|)` and, on
/// consecutive samples one step apart with dt <= dt_threshold, the discrete
/// identity -dE/dt ~ l2_ut^2. Steps whose energy drop is below
/// `noise_floor * (1 + |E|)` are skipped by the identity check because the
/// difference is then dominated by round-off.
EnergyAudit audit_energy(std::span<const TrajectorySample> samples, double slack = 1e-6,
                         double dt_threshold = 1e-3, double noise_floor = 1e-10);

}  // namespace mems
