#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mems {

// Geometry descriptors. Interval is [0, length], Rectangle is
// [0, lx] x [0, ly], disks are centred at the origin.
struct Interval {
    double length = 1.0;
};

/// Radially symmetric disk; the only coordinate is r in [0, radius].
struct RadialDisk {
    double radius = 1.0;
};

struct Rectangle {
    double lx = 1.0;
    double ly = 1.0;
};

/// Full 2D disk approximated on the square [-R, R]^2 with every node at
/// distance >= R from the centre pinned to zero (staircase boundary).
struct EmbeddedDisk {
    double radius = 1.0;
};

using Domain = std::variant<Interval, RadialDisk, Rectangle, EmbeddedDisk>;

/// |Omega| of the continuous domain.
double measure(const Domain& domain);
/// Spatial dimension N of Omega (RadialDisk is a 2D domain).
int dimension(const Domain& domain);
std::string describe(const Domain& domain);
/// Throws InvalidArgument on nonpositive or non-finite geometry.
void validate(const Domain& domain);

enum class Layout { Line, Radial, Plane };

/// Uniform finite-difference discretization of a Domain.
///
/// Nodes are stored x-fastest: node (i, j) has index j * nx() + i. Line and
/// radial grids have ny() == 1. Grids are immutable once built and are shared
/// between fields through GridPtr.
class Grid {
public:
    const Domain& domain() const noexcept { return domain_; }
    Layout layout() const noexcept { return layout_; }

    /// Node count per axis as requested at construction.
    std::size_t n() const noexcept { return nx_; }
    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return nx_ * ny_; }

    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }

    std::span<const double> axis_x() const noexcept { return axis_x_; }
    std::span<const double> axis_y() const noexcept { return axis_y_; }
    double x(std::size_t node) const noexcept { return axis_x_[node % nx_]; }
    double y(std::size_t node) const noexcept { return ny_ == 1 ? 0.0 : axis_y_[node / nx_]; }

    bool is_interior(std::size_t node) const noexcept { return interior_[node] != 0; }
    std::span<const double> weights() const noexcept { return weights_; }
    /// Sum of quadrature weights: |Omega| for the exact geometries, the
    /// staircase area for EmbeddedDisk.
    double weight_sum() const noexcept { return weight_sum_; }

    /// Interior (unknown) nodes in increasing index order.
    std::span<const std::size_t> interior_nodes() const noexcept { return interior_nodes_; }

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
    std::size_t nearest_node(double x, double y = 0.0) const;

private:
    friend std::shared_ptr<const Grid> build_grid(const Domain&, std::size_t);
    Grid() = default;

    Domain domain_;
    Layout layout_ = Layout::Line;
    std::size_t nx_ = 0;
    std::size_t ny_ = 1;
    double hx_ = 0.0;
    double hy_ = 0.0;
    std::vector<double> axis_x_;
    std::vector<double> axis_y_;
    std::vector<char> interior_;
    std::vector<double> weights_;
    std::vector<std::size_t> interior_nodes_;
    double weight_sum_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a uniform grid with n nodes per axis (n >= 3). Weights are
/// composite-trapezoid weights; radial weights carry the 2*pi*r factor.
GridPtr build_grid(const Domain& domain, std::size_t n);

/// Nodal values on a shared grid.
class Field {
public:
    explicit Field(GridPtr grid);
    Field(GridPtr grid, std::vector<double> values);

    /// Samples fn(x, y) at every node; boundary nodes are forced to zero.
    static Field from_function(GridPtr grid, const std::function<double(double, double)>& fn);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    double max() const;
    std::size_t argmax() const;
    bool all_finite() const;
    /// True iff every Dirichlet node holds exactly 0.
    bool satisfies_boundary() const;
    void pin_boundary();

    bool same_grid(const Field& other) const noexcept { return grid_ == other.grid_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Throws GridMismatch unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b);

}  // namespace mems
