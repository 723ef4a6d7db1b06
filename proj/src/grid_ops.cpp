#include "mems/grid_ops.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <numeric>

#include "mems/errors.hpp"

namespace mems {

namespace {

constexpr double kPlaneCgTolerance = 1e-12;

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Tridiagonal {
    std::vector<double> sub, diag, sup;
    std::vector<std::size_t> nodes;  // grid node of each row
};

// Rows of (diag - coeff * Laplacian_h) over the unknowns of a line/radial grid.
Tridiagonal assemble_tridiagonal(const Grid& g, std::span<const double> shift, double coeff) {
    Tridiagonal t;
    const double h = g.hx();
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t k : g.interior_nodes()) {
        double a = 0.0, b = shift[k], c = 0.0;
        if (g.layout() == Layout::Radial && k == 0) {
            b += 4.0 * coeff * inv_h2;
            c = -4.0 * coeff * inv_h2;
        } else if (g.layout() == Layout::Radial) {
            const double r = g.x(k);
            a = -coeff * (inv_h2 - 0.5 / (r * h));
            b += 2.0 * coeff * inv_h2;
            c = -coeff * (inv_h2 + 0.5 / (r * h));
        } else {
            a = -coeff * inv_h2;
            b += 2.0 * coeff * inv_h2;
            c = -coeff * inv_h2;
        }
        t.sub.push_back(a);
        t.diag.push_back(b);
        t.sup.push_back(c);
        t.nodes.push_back(k);
    }
    return t;
}

std::vector<std::ptrdiff_t> unknown_numbering(const Grid& g) {
    std::vector<std::ptrdiff_t> id(g.size(), -1);
    std::ptrdiff_t next = 0;
    for (std::size_t k : g.interior_nodes()) id[k] = next++;
    return id;
}

SparseMatrix assemble_plane(const Grid& g, std::span<const double> shift, double coeff,
                            const std::vector<std::ptrdiff_t>& id) {
    const double cx = coeff / (g.hx() * g.hx());
    const double cy = coeff / (g.hy() * g.hy());
    const auto nx = static_cast<std::ptrdiff_t>(g.nx());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(5 * g.interior_nodes().size());
    for (std::size_t k : g.interior_nodes()) {
        const std::ptrdiff_t row = id[k];
        triplets.emplace_back(row, row, shift[k] + 2.0 * cx + 2.0 * cy);
        const auto kk = static_cast<std::ptrdiff_t>(k);
        const std::ptrdiff_t neighbours[4] = {kk - 1, kk + 1, kk - nx, kk + nx};
        const double couplings[4] = {-cx, -cx, -cy, -cy};
        for (int m = 0; m < 4; ++m) {
            const std::ptrdiff_t col = id[static_cast<std::size_t>(neighbours[m])];
            if (col >= 0) triplets.emplace_back(row, col, couplings[m]);
        }
    }
    const auto n = static_cast<Eigen::Index>(g.interior_nodes().size());
    SparseMatrix a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return a;
}

Field solve_plane(const Grid& g, const GridPtr& gp, std::span<const double> shift, double coeff, const Field& rhs,
                  PlaneSolver solver, const Field* guess) {
    const auto id = unknown_numbering(g);
    const SparseMatrix a = assemble_plane(g, shift, coeff, id);
    const auto n = static_cast<Eigen::Index>(g.interior_nodes().size());
    Eigen::VectorXd b(n);
    for (std::size_t k : g.interior_nodes()) b[id[k]] = rhs[k];

    Eigen::VectorXd x;
    if (solver == PlaneSolver::ConjugateGradient) {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(kPlaneCgTolerance);
        cg.setMaxIterations(std::max<Eigen::Index>(1000, 4 * n));
        cg.compute(a);
        Eigen::VectorXd x0(n);
        const Field& start = guess ? *guess : rhs;
        for (std::size_t k : g.interior_nodes()) x0[id[k]] = start[k];
        x = cg.solveWithGuess(b, x0);
        if (cg.info() != Eigen::Success) throw SolverError("conjugate gradient did not converge", cg.error());
    } else {
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage(), NAN);
        x = lu.solve(b);
        if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed", NAN);
    }

    Field out(gp);
    for (std::size_t k : g.interior_nodes()) out[k] = x[id[k]];
    return out;
}

}  // namespace

double quadrature(const Field& f) {
    const auto w = f.grid().weights();
    const auto v = f.values();
    return std::inner_product(w.begin(), w.end(), v.begin(), 0.0);
}

Field laplacian_apply(const Field& f) {
    if (!f.satisfies_boundary()) throw InvalidArgument("laplacian_apply: field is nonzero on a Dirichlet node");
    return laplacian_stencil(f);
}

Field laplacian_stencil(const Field& f) {
    const Grid& g = f.grid();
    Field out(f.grid_ptr());
    switch (g.layout()) {
        case Layout::Line: {
            const double inv_h2 = 1.0 / (g.hx() * g.hx());
            for (std::size_t k : g.interior_nodes()) out[k] = (f[k - 1] - 2.0 * f[k] + f[k + 1]) * inv_h2;
            break;
        }
        case Layout::Radial: {
            const double h = g.hx();
            const double inv_h2 = 1.0 / (h * h);
            for (std::size_t k : g.interior_nodes()) {
                if (k == 0) {
                    // Symmetry limit: Laplacian at r=0 is 2 u_rr(0).
                    out[k] = 4.0 * (f[1] - f[0]) * inv_h2;
                } else {
                    const double r = g.x(k);
                    out[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) * inv_h2 + (f[k + 1] - f[k - 1]) / (2.0 * r * h);
                }
            }
            break;
        }
        case Layout::Plane: {
            const double ix = 1.0 / (g.hx() * g.hx());
            const double iy = 1.0 / (g.hy() * g.hy());
            const std::size_t nx = g.nx();
            for (std::size_t k : g.interior_nodes()) {
                out[k] = (f[k - 1] - 2.0 * f[k] + f[k + 1]) * ix + (f[k - nx] - 2.0 * f[k] + f[k + nx]) * iy;
            }
            break;
        }
    }
    return out;
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw InvalidArgument("solve_tridiagonal: inconsistent band sizes");
    if (n == 0) return {};
    std::vector<double> c_star(n), d_star(n), x(n);
    double m = diag[0];
    if (m == 0.0) throw SolverError("tridiagonal elimination hit a zero pivot", NAN);
    c_star[0] = sup[0] / m;
    d_star[0] = rhs[0] / m;
    for (std::size_t i = 1; i < n; ++i) {
        m = diag[i] - sub[i] * c_star[i - 1];
        if (m == 0.0) throw SolverError("tridiagonal elimination hit a zero pivot", NAN);
        c_star[i] = sup[i] / m;
        d_star[i] = (rhs[i] - sub[i] * d_star[i - 1]) / m;
    }
    x[n - 1] = d_star[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d_star[i] - c_star[i] * x[i + 1];
    return x;
}

Field solve_shifted_laplacian(const Field& diag, double coeff, const Field& rhs, PlaneSolver plane_solver,
                              const Field* guess) {
    require_same_grid(diag, rhs);
    const Grid& g = rhs.grid();
    if (g.layout() == Layout::Plane)
        return solve_plane(g, rhs.grid_ptr(), diag.values(), coeff, rhs, plane_solver, guess);

    const Tridiagonal t = assemble_tridiagonal(g, diag.values(), coeff);
    std::vector<double> b(t.nodes.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = rhs[t.nodes[i]];
    const auto x = solve_tridiagonal(t.sub, t.diag, t.sup, b);
    Field out(rhs.grid_ptr());
    for (std::size_t i = 0; i < x.size(); ++i) out[t.nodes[i]] = x[i];
    return out;
}

Field implicit_solve(double dt, const Field& rhs, const Field* guess) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("implicit_solve: dt must be positive");
    if (guess) require_same_grid(*guess, rhs);
    const Field ones(rhs.grid_ptr(), std::vector<double>(rhs.size(), 1.0));
    return solve_shifted_laplacian(ones, dt, rhs, PlaneSolver::ConjugateGradient, guess);
}

}  // namespace mems
