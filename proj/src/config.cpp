#include "mems/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace mems {

ConfigError::ConfigError(const std::string& message, std::size_t line, std::string field)
    : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + message : field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view v) {
    v = trim(v);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw std::invalid_argument("expected a number");
    return out;
}

long long parse_integer(std::string_view v) {
    v = trim(v);
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw std::invalid_argument("expected an integer");
    return out;
}

std::size_t parse_count(std::string_view v) {
    const long long n = parse_integer(v);
    if (n < 0) throw std::invalid_argument("expected a nonnegative integer");
    return static_cast<std::size_t>(n);
}

bool parse_bool(std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected true or false");
}

std::vector<double> parse_list(std::string_view v) {
    std::vector<double> out;
    v = trim(v);
    if (v.empty()) return out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto comma = v.find(',', start);
        const auto item = v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_double(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ",";
        out += format_double(values[i]);
    }
    return out;
}

struct Key {
    const char* section;
    const char* name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define MEMS_DOUBLE_KEY(section, name, member)                                                   \
    Key {                                                                                        \
        section, name, [](RunConfig& c, std::string_view v) { c.member = parse_double(v); },     \
            [](const RunConfig& c) { return format_double(c.member); }                           \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        {"grid", "domain", [](RunConfig& c, std::string_view v) { c.domain = std::string(trim(v)); },
         [](const RunConfig& c) { return c.domain; }},
        MEMS_DOUBLE_KEY("grid", "length", length),
        MEMS_DOUBLE_KEY("grid", "radius", radius),
        MEMS_DOUBLE_KEY("grid", "lx", lx),
        MEMS_DOUBLE_KEY("grid", "ly", ly),
        {"grid", "n", [](RunConfig& c, std::string_view v) { c.n = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.n); }},
        MEMS_DOUBLE_KEY("params", "lambda", params.lambda),
        MEMS_DOUBLE_KEY("params", "alpha", params.alpha),
        MEMS_DOUBLE_KEY("params", "delta_trunc", params.delta_trunc),
        MEMS_DOUBLE_KEY("params", "quench_eps", params.quench_eps),
        {"initial", "profile", [](RunConfig& c, std::string_view v) { c.profile = std::string(trim(v)); },
         [](const RunConfig& c) { return c.profile; }},
        MEMS_DOUBLE_KEY("initial", "amplitude", amplitude),
        MEMS_DOUBLE_KEY("integrator", "dt_init", dt_init),
        MEMS_DOUBLE_KEY("integrator", "dt_max", dt_max),
        MEMS_DOUBLE_KEY("integrator", "dt_min", dt_min),
        MEMS_DOUBLE_KEY("integrator", "t_max", t_max),
        MEMS_DOUBLE_KEY("integrator", "steady_tol", steady_tol),
        {"integrator", "steady_window",
         [](RunConfig& c, std::string_view v) { c.steady_window = static_cast<int>(parse_integer(v)); },
         [](const RunConfig& c) { return std::to_string(c.steady_window); }},
        MEMS_DOUBLE_KEY("integrator", "c_adapt", c_adapt),
        {"integrator", "picard", [](RunConfig& c, std::string_view v) { c.picard = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.picard ? "true" : "false"); }},
        {"integrator", "record_every", [](RunConfig& c, std::string_view v) { c.record_every = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.record_every); }},
        {"integrator", "snapshot_times",
         [](RunConfig& c, std::string_view v) { c.snapshot_times = parse_list(v); },
         [](const RunConfig& c) { return format_list(c.snapshot_times); }},
        MEMS_DOUBLE_KEY("newton", "tol", newton_tol),
        {"newton", "max_iters",
         [](RunConfig& c, std::string_view v) { c.newton_max_iters = static_cast<int>(parse_integer(v)); },
         [](const RunConfig& c) { return std::to_string(c.newton_max_iters); }},
        MEMS_DOUBLE_KEY("probe", "x", probe_x),
        MEMS_DOUBLE_KEY("probe", "y", probe_y),
    };
    return table;
}

#undef MEMS_DOUBLE_KEY

const Key* find_key(std::string_view section, std::string_view name) {
    for (const auto& k : keys())
        if (section == k.section && name == k.name) return &k;
    return nullptr;
}

void set_key(RunConfig& config, std::string_view section, std::string_view name, std::string_view value,
             std::size_t line) {
    const std::string field = std::string(section) + "." + std::string(name);
    const Key* key = find_key(section, name);
    if (!key) throw ConfigError("unknown key", line, field);
    try {
        key->set(config, value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()) + ", got '" + std::string(trim(value)) + "'", line, field);
    }
}

}  // namespace

Domain RunConfig::make_domain() const {
    if (domain == "interval") return Interval{length};
    if (domain == "radial-disk") return RadialDisk{radius};
    if (domain == "rectangle") return Rectangle{lx, ly};
    if (domain == "embedded-disk") return EmbeddedDisk{radius};
    throw ConfigError("unknown domain '" + domain + "' (interval, radial-disk, rectangle, embedded-disk)", 0,
                      "grid.domain");
}

void RunConfig::validate() const {
    auto check = [](bool ok, const char* field, const std::string& message) {
        if (!ok) throw ConfigError(message, 0, field);
    };
    const Domain d = make_domain();
    try {
        mems::validate(d);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), 0, "grid");
    }
    check(n >= 3, "grid.n", "must be at least 3");
    check(params.lambda >= 0.0 && std::isfinite(params.lambda), "params.lambda", "must be nonnegative");
    check(params.alpha > 0.0 && std::isfinite(params.alpha), "params.alpha", "must be positive");
    check(params.delta_trunc > 0.0 && params.delta_trunc < 0.5, "params.delta_trunc", "must lie in (0, 1/2)");
    check(params.quench_eps > 0.0 && params.quench_eps < 1.0, "params.quench_eps", "must lie in (0, 1)");
    check(profile == "zero" || profile == "disk-lobes" || profile == "sine", "initial.profile",
          "must be zero, disk-lobes or sine");
    check(std::isfinite(amplitude) && amplitude < 1.0, "initial.amplitude", "must be below 1");
    check(dt_min > 0.0, "integrator.dt_min", "must be positive");
    check(dt_init >= dt_min, "integrator.dt_init", "must be >= dt_min");
    check(dt_max >= dt_init, "integrator.dt_max", "must be >= dt_init");
    check(t_max > 0.0 && std::isfinite(t_max), "integrator.t_max", "must be positive");
    check(steady_tol > 0.0, "integrator.steady_tol", "must be positive");
    check(steady_window >= 1, "integrator.steady_window", "must be at least 1");
    check(c_adapt > 0.0, "integrator.c_adapt", "must be positive");
    check(record_every >= 1, "integrator.record_every", "must be at least 1");
    for (double t : snapshot_times) check(t >= 0.0 && std::isfinite(t), "integrator.snapshot_times", "must be >= 0");
    check(newton_tol > 0.0, "newton.tol", "must be positive");
    check(newton_max_iters >= 1, "newton.max_iters", "must be at least 1");
}

SimConfig RunConfig::to_sim_config() const {
    validate();
    const GridPtr grid = build_grid(make_domain(), n);
    SimConfig sim(grid);
    sim.params = params;
    if (profile == "disk-lobes") {
        sim.u0 = Field::from_function(grid, disk_lobes_initial);
    } else if (profile == "sine") {
        const double a = amplitude;
        const Grid& g = *grid;
        sim.u0 = Field::from_function(grid, [&, a](double x, double y) {
            switch (g.layout()) {
                case Layout::Line: return a * std::sin(std::numbers::pi * x / length);
                case Layout::Radial: return a * std::cos(0.5 * std::numbers::pi * x / radius);
                case Layout::Plane:
                    if (domain == "rectangle")
                        return a * std::sin(std::numbers::pi * x / lx) * std::sin(std::numbers::pi * y / ly);
                    return a * (1.0 - (x * x + y * y) / (radius * radius));
            }
            return 0.0;
        });
    }
    sim.dt_init = dt_init;
    sim.dt_max = dt_max;
    sim.dt_min = dt_min;
    sim.t_max = t_max;
    sim.steady_tol = steady_tol;
    sim.steady_window = steady_window;
    sim.c_adapt = c_adapt;
    sim.picard = picard;
    sim.record_every = record_every;
    sim.snapshot_times = snapshot_times;
    return sim;
}

RunConfig config_from_preset(std::string_view name) {
    const Preset p = find_preset(name);
    const SimConfig& s = p.config;
    RunConfig c;
    const Domain& d = s.grid->domain();
    if (const auto* i = std::get_if<Interval>(&d)) {
        c.domain = "interval";
        c.length = i->length;
    } else if (const auto* r = std::get_if<RadialDisk>(&d)) {
        c.domain = "radial-disk";
        c.radius = r->radius;
    } else if (const auto* q = std::get_if<Rectangle>(&d)) {
        c.domain = "rectangle";
        c.lx = q->lx;
        c.ly = q->ly;
    } else if (const auto* e = std::get_if<EmbeddedDisk>(&d)) {
        c.domain = "embedded-disk";
        c.radius = e->radius;
    }
    c.n = s.grid->n();
    c.params = s.params;
    c.profile = p.name == "disk-cartesian" ? "disk-lobes" : "zero";
    c.dt_init = s.dt_init;
    c.dt_max = s.dt_max;
    c.dt_min = s.dt_min;
    c.t_max = s.t_max;
    c.steady_tol = s.steady_tol;
    c.steady_window = s.steady_window;
    c.c_adapt = s.c_adapt;
    c.picard = s.picard;
    c.record_every = s.record_every;
    c.snapshot_times = s.snapshot_times;
    c.probe_x = p.probe_x;
    c.probe_y = p.probe_y;
    return c;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no, std::string(line));
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no, std::string(line));
        const auto name = trim(line.substr(0, eq));
        if (section.empty()) throw ConfigError("key outside of a section", line_no, std::string(name));
        set_key(base, section, name, line.substr(eq + 1), line_no);
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, "config");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    std::string current;
    for (const auto& k : keys()) {
        if (current != k.section) {
            if (!current.empty()) out += "\n";
            current = k.section;
            out += "[" + current + "]\n";
        }
        out += std::string(k.name) + " = " + k.get(config) + "\n";
    }
    return out;
}

void apply_override(RunConfig& config, std::string_view dotted_key, std::string_view value) {
    const auto dot = dotted_key.find('.');
    if (dot == std::string_view::npos) throw ConfigError("override keys look like section.key", 0, std::string(dotted_key));
    set_key(config, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value, 0);
}

}  // namespace mems
