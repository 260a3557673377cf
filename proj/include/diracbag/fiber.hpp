#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace diracbag {

enum class Sign { plus, minus };
enum class Domain { half_line, whole_line };

inline const char* to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

/// Truncation and resolution used to build fiber grids.
struct FiberGrid {
    std::size_t n = 4001;
    double min_length = 20.0;
    double margin = 12.0;

    double length_for(double xi) const { return std::max(min_length, std::abs(xi) + margin); }
};

/// One fibered operator -d^2 + (t +- xi)^2 -+ 1, Robin u'(0) = (alpha - xi) u(0) on the half-line.
struct FiberSpec {
    Sign sign = Sign::minus;
    double alpha = 1.0;
    double xi = 0.0;
    Domain domain = Domain::half_line;
    Grid1D grid;

    static FiberSpec half_line(Sign s, double alpha, double xi, const FiberGrid& g = {}) {
        return FiberSpec{s, alpha, xi, Domain::half_line, Grid1D(0.0, g.length_for(xi), g.n)};
    }
    /// Whole line truncated to [-T, T] with Dirichlet ends; an odd n puts a node at 0.
    static FiberSpec whole_line(Sign s, double xi, double T = 12.0, std::size_t n = 8001) {
        return FiberSpec{s, 0.0, xi, Domain::whole_line, Grid1D(-T, T, n)};
    }

    void validate() const {
        if (grid.n < 3 || !(grid.x1 > grid.x0)) throw InvalidArgument("FiberSpec: bad grid");
        if (domain == Domain::half_line) {
            if (grid.x0 != 0.0) throw InvalidArgument("FiberSpec: half-line grid must start at 0");
            if (!(alpha > 0.0)) throw InvalidArgument("FiberSpec: alpha must be positive");
        }
        if (!std::isfinite(xi) || !std::isfinite(alpha)) throw InvalidArgument("FiberSpec: non-finite parameter");
    }
};

struct FiberEigen {
    std::vector<double> values;
    double u0 = 0.0;   // ground eigenfunction at t = 0
    double du0 = 0.0;  // its derivative at t = 0
    std::vector<std::vector<double>> functions;  // on every grid node, int u^2 = 1 (trapezoid)
    Grid1D grid;
};

/// Exact whole-line levels: 2(k-1) for plus, 2k for minus.
inline double whole_line_levels(Sign s, int k) {
    if (k < 1) throw InvalidArgument("whole_line_levels: k must be >= 1");
    return s == Sign::plus ? 2.0 * (k - 1) : 2.0 * k;
}

namespace detail {

struct FiberMatrix {
    TridiagSym t;
    std::vector<double> weights;  // quadrature weights of the unknowns (divided by step)
    std::size_t first = 0;        // grid index of the first unknown
};

inline FiberMatrix fiber_matrix(const FiberSpec& spec) {
    const Grid1D& g = spec.grid;
    const double h = g.step();
    const double ih2 = 1.0 / (h * h);
    const double pm = spec.sign == Sign::plus ? 1.0 : -1.0;
    auto potential = [&](double t) {
        const double s = t + pm * spec.xi;
        return s * s - pm;
    };
    FiberMatrix fm;
    if (spec.domain == Domain::half_line) {
        // unknowns: nodes 0..n-2 (Dirichlet at the last node)
        const std::size_t m = g.n - 1;
        fm.first = 0;
        fm.t.diag.resize(m);
        fm.t.off.assign(m - 1, -ih2);
        fm.weights.assign(m, 1.0);
        fm.weights[0] = 0.5;
        for (std::size_t i = 0; i < m; ++i) fm.t.diag[i] = 2.0 * ih2 + potential(g.at(i));
        // ghost node u_{-1} = u_1 - 2h(alpha - xi)u_0, symmetrized by the half weight at 0
        fm.t.diag[0] += 2.0 * (spec.alpha - spec.xi) / h;
        fm.t.off[0] = -std::sqrt(2.0) * ih2;
    } else {
        const std::size_t m = g.n - 2;
        fm.first = 1;
        fm.t.diag.resize(m);
        fm.t.off.assign(m - 1, -ih2);
        fm.weights.assign(m, 1.0);
        for (std::size_t i = 0; i < m; ++i) fm.t.diag[i] = 2.0 * ih2 + potential(g.at(i + 1));
    }
    return fm;
}

}  // namespace detail

/// The k lowest eigenvalues of a fiber operator; with `with_functions` the sampled
/// eigenfunctions and the ground-state traces are filled.
inline FiberEigen fiber_eigs(const FiberSpec& spec, int k, bool with_functions = true) {
    spec.validate();
    if (k < 1) throw InvalidArgument("fiber_eigs: k must be >= 1");
    const auto fm = detail::fiber_matrix(spec);
    if (static_cast<std::size_t>(k) > fm.t.size()) throw InvalidArgument("fiber_eigs: k exceeds grid size");
    const Grid1D& g = spec.grid;
    const double h = g.step();
    std::vector<double> w(fm.weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = fm.weights[i] * h;
    auto er = eig_sym_tridiag(fm.t, static_cast<std::size_t>(k), with_functions, w);
    FiberEigen out;
    out.values = std::move(er.values);
    out.grid = g;
    if (!with_functions) return out;
    for (auto& y : er.vectors) {
        std::vector<double> u(g.n, 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) u[i + fm.first] = y[i];
        std::size_t imax = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
        if (u[imax] < 0.0)
            for (double& x : u) x = -x;
        out.functions.push_back(std::move(u));
    }
    const auto& u = out.functions.front();
    if (spec.domain == Domain::half_line) {
        out.u0 = u[0];
        out.du0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    } else {
        // trace at t = 0 by linear interpolation
        const double pos = -g.x0 / h;
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double f = pos - static_cast<double>(i);
        out.u0 = (1.0 - f) * u[i] + f * u[i + 1];
        out.du0 = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    return out;
}

/// Ground eigenvalue only (no eigenvectors).
inline double fiber_ground(const FiberSpec& spec) { return fiber_eigs(spec, 1, false).values[0]; }

/// Eigenvalues on the given grid and on a grid with halved step; throws if they differ by more than tol.
inline FiberEigen fiber_eigs_checked(const FiberSpec& spec, int k, double tol) {
    auto coarse = fiber_eigs(spec, k);
    FiberSpec fine = spec;
    fine.grid = Grid1D(spec.grid.x0, spec.grid.x1, 2 * spec.grid.n - 1);
    const auto f = fiber_eigs(fine, k, false);
    for (int j = 0; j < k; ++j) {
        if (std::abs(f.values[j] - coarse.values[j]) > tol)
            throw RefinementNeeded("fiber_eigs: eigenvalue " + std::to_string(j + 1) + " moved by " +
                                       std::to_string(std::abs(f.values[j] - coarse.values[j])) +
                                       " under refinement (n=" + std::to_string(spec.grid.n) + ")",
                                   coarse.values[j], f.values[j]);
    }
    return coarse;
}

struct FiberDerivatives {
    double d_xi;
    double d_alpha;
};

/// Centered differences of the ground eigenvalue in xi and alpha; the grid is held fixed.
inline FiberDerivatives fiber_eig_derivatives(const FiberSpec& spec, double step = 1e-4) {
    spec.validate();
    if (!(step > 0.0)) throw InvalidArgument("fiber_eig_derivatives: step must be positive");
    auto at = [&](double a, double x) {
        FiberSpec s = spec;
        s.alpha = a;
        s.xi = x;
        return fiber_ground(s);
    };
    FiberDerivatives d{};
    d.d_xi = (at(spec.alpha, spec.xi + step) - at(spec.alpha, spec.xi - step)) / (2.0 * step);
    if (spec.domain == Domain::half_line)
        d.d_alpha = (at(spec.alpha + step, spec.xi) - at(spec.alpha - step, spec.xi)) / (2.0 * step);
    else
        d.d_alpha = 0.0;
    return d;
}

}  // namespace diracbag
