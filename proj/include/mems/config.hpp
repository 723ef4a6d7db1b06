#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mems/errors.hpp"
#include "mems/nonlocal_rhs.hpp"
#include "mems/time_integrator.hpp"

namespace mems {

/// Parse or validation failure in a configuration file or override.
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& message, std::size_t line, std::string field);
    /// 1-based line in the source text, 0 for command-line overrides.
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// Flat, fully-defaulted run configuration. Serialized as INI-style text:
///
///   [grid]        domain, length, radius, lx, ly, n
///   [params]      lambda, alpha, delta_trunc, quench_eps
///   [initial]     profile (zero | disk-lobes | sine), amplitude
///   [integrator]  dt_init, dt_max, dt_min, t_max, steady_tol, steady_window,
///                 c_adapt, picard, record_every, snapshot_times
///   [newton]      tol, max_iters
///   [probe]       x, y
struct RunConfig {
    std::string domain = "interval";  // interval | radial-disk | rectangle | embedded-disk
    double length = 1.0;
    double radius = 1.0;
    double lx = 1.0;
    double ly = 1.0;
    std::size_t n = 201;

    Params params;

    std::string profile = "zero";
    double amplitude = 0.1;

    double dt_init = 1e-3;
    double dt_max = 1e-3;
    double dt_min = 1e-10;
    double t_max = 10.0;
    double steady_tol = 1e-8;
    int steady_window = 5;
    double c_adapt = 0.1;
    bool picard = false;
    std::size_t record_every = 10;
    std::vector<double> snapshot_times;

    double newton_tol = 1e-10;
    int newton_max_iters = 50;

    double probe_x = 0.5;
    double probe_y = 0.0;

    bool operator==(const RunConfig&) const = default;

    Domain make_domain() const;
    /// Builds the grid, the initial field and the integrator settings.
    SimConfig to_sim_config() const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

RunConfig config_from_preset(std::string_view name);

/// Parses text on top of `base`; keys absent from the text keep their base value.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string serialize_config(const RunConfig& config);

/// Applies "section.key=value" (or key and value separately).
void apply_override(RunConfig& config, std::string_view dotted_key, std::string_view value);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace mems
