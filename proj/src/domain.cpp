#include "mems/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mems/errors.hpp"

namespace mems {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<double> uniform_axis(double lo, double hi, std::size_t n) {
    std::vector<double> axis(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) axis[i] = lo + h * static_cast<double>(i);
    axis.back() = hi;
    return axis;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

}  // namespace

double measure(const Domain& domain) {
    return std::visit(overloaded{
                          [](const Interval& d) { return d.length; },
                          [](const RadialDisk& d) { return std::numbers::pi * d.radius * d.radius; },
                          [](const Rectangle& d) { return d.lx * d.ly; },
                          [](const EmbeddedDisk& d) { return std::numbers::pi * d.radius * d.radius; },
                      },
                      domain);
}

int dimension(const Domain& domain) { return std::holds_alternative<Interval>(domain) ? 1 : 2; }

std::string describe(const Domain& domain) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Interval& d) { os << "interval(length=" << d.length << ")"; },
                   [&](const RadialDisk& d) { os << "radial-disk(radius=" << d.radius << ")"; },
                   [&](const Rectangle& d) { os << "rectangle(lx=" << d.lx << ", ly=" << d.ly << ")"; },
                   [&](const EmbeddedDisk& d) { os << "embedded-disk(radius=" << d.radius << ")"; },
               },
               domain);
    return os.str();
}

void validate(const Domain& domain) {
    const bool ok = std::visit(overloaded{
                                   [](const Interval& d) { return positive_finite(d.length); },
                                   [](const RadialDisk& d) { return positive_finite(d.radius); },
                                   [](const Rectangle& d) { return positive_finite(d.lx) && positive_finite(d.ly); },
                                   [](const EmbeddedDisk& d) { return positive_finite(d.radius); },
                               },
                               domain);
    if (!ok) throw InvalidArgument("nonpositive geometry: " + describe(domain));
}

std::size_t Grid::nearest_node(double x, double y) const {
    auto nearest = [](std::span<const double> axis, double v) {
        const double h = axis[1] - axis[0];
        const double k = std::round((v - axis.front()) / h);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(axis.size() - 1)));
    };
    const std::size_t i = nearest(axis_x_, x);
    if (ny_ == 1) return i;
    return index(i, nearest(axis_y_, y));
}

GridPtr build_grid(const Domain& domain, std::size_t n) {
    validate(domain);
    if (n < 3) throw InvalidArgument("grid needs at least 3 nodes per axis, got " + std::to_string(n));

    std::shared_ptr<Grid> g(new Grid());
    g->domain_ = domain;
    g->nx_ = n;

    std::visit(overloaded{
                   [&](const Interval& d) {
                       g->layout_ = Layout::Line;
                       g->axis_x_ = uniform_axis(0.0, d.length, n);
                       g->hx_ = d.length / static_cast<double>(n - 1);
                       g->weights_ = trapezoid_weights(n, g->hx_);
                       g->interior_.assign(n, 1);
                       g->interior_.front() = 0;
                       g->interior_.back() = 0;
                   },
                   [&](const RadialDisk& d) {
                       g->layout_ = Layout::Radial;
                       g->axis_x_ = uniform_axis(0.0, d.radius, n);
                       g->hx_ = d.radius / static_cast<double>(n - 1);
                       const auto trap = trapezoid_weights(n, g->hx_);
                       g->weights_.resize(n);
                       for (std::size_t i = 0; i < n; ++i)
                           g->weights_[i] = 2.0 * std::numbers::pi * g->axis_x_[i] * trap[i];
                       // r = 0 is a symmetry point, not a Dirichlet node.
                       g->interior_.assign(n, 1);
                       g->interior_.back() = 0;
                   },
                   [&](const Rectangle& d) {
                       g->layout_ = Layout::Plane;
                       g->ny_ = n;
                       g->axis_x_ = uniform_axis(0.0, d.lx, n);
                       g->axis_y_ = uniform_axis(0.0, d.ly, n);
                       g->hx_ = d.lx / static_cast<double>(n - 1);
                       g->hy_ = d.ly / static_cast<double>(n - 1);
                       const auto wx = trapezoid_weights(n, g->hx_);
                       const auto wy = trapezoid_weights(n, g->hy_);
                       g->weights_.resize(n * n);
                       g->interior_.assign(n * n, 0);
                       for (std::size_t j = 0; j < n; ++j) {
                           for (std::size_t i = 0; i < n; ++i) {
                               g->weights_[j * n + i] = wx[i] * wy[j];
                               g->interior_[j * n + i] = (i > 0 && j > 0 && i + 1 < n && j + 1 < n) ? 1 : 0;
                           }
                       }
                   },
                   [&](const EmbeddedDisk& d) {
                       g->layout_ = Layout::Plane;
                       g->ny_ = n;
                       g->axis_x_ = uniform_axis(-d.radius, d.radius, n);
                       g->axis_y_ = g->axis_x_;
                       g->hx_ = 2.0 * d.radius / static_cast<double>(n - 1);
                       g->hy_ = g->hx_;
                       const double cell = g->hx_ * g->hy_;
                       const double r2 = d.radius * d.radius * (1.0 - 1e-12);
                       g->weights_.assign(n * n, 0.0);
                       g->interior_.assign(n * n, 0);
                       for (std::size_t j = 0; j < n; ++j) {
                           for (std::size_t i = 0; i < n; ++i) {
                               const double x = g->axis_x_[i];
                               const double y = g->axis_y_[j];
                               if (x * x + y * y < r2) {
                                   g->interior_[j * n + i] = 1;
                                   g->weights_[j * n + i] = cell;
                               }
                           }
                       }
                   },
               },
               domain);

    if (g->ny_ == 1) g->hy_ = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->interior_[k]) g->interior_nodes_.push_back(k);
    // Compensated sum so the measure invariant holds to round-off for large n.
    double sum = 0.0, comp = 0.0;
    for (double w : g->weights_) {
        const double yv = w - comp;
        const double t = sum + yv;
        comp = (t - sum) - yv;
        sum = t;
    }
    g->weight_sum_ = sum;
    return g;
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw InvalidArgument("field requires a grid");
    values_.assign(grid_->size(), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("field requires a grid");
    if (values_.size() != grid_->size())
        throw GridMismatch("field has " + std::to_string(values_.size()) + " values, grid has " +
                           std::to_string(grid_->size()) + " nodes");
}

Field Field::from_function(GridPtr grid, const std::function<double(double, double)>& fn) {
    Field f(std::move(grid));
    const Grid& g = f.grid();
    for (std::size_t k = 0; k < g.size(); ++k) f.values_[k] = g.is_interior(k) ? fn(g.x(k), g.y(k)) : 0.0;
    return f;
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::size_t Field::argmax() const {
    return static_cast<std::size_t>(std::distance(values_.begin(), std::max_element(values_.begin(), values_.end())));
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Field::satisfies_boundary() const {
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (!grid_->is_interior(k) && values_[k] != 0.0) return false;
    return true;
}

void Field::pin_boundary() {
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (!grid_->is_interior(k)) values_[k] = 0.0;
}

void require_same_grid(const Field& a, const Field& b) {
    if (!a.same_grid(b)) throw GridMismatch("fields live on different grids");
}

}  // namespace mems
