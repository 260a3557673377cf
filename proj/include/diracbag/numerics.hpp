#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace diracbag {

/// Uniform grid with n nodes on [x0, x1].
struct Grid1D {
    double x0 = 0.0;
    double x1 = 1.0;
    std::size_t n = 3;

    Grid1D() = default;
    Grid1D(double lo, double hi, std::size_t nodes) : x0(lo), x1(hi), n(nodes) {
        if (n < 3) throw InvalidArgument("Grid1D: need at least 3 nodes");
        if (!(x1 > x0)) throw InvalidArgument("Grid1D: need x1 > x0");
    }

    double step() const { return (x1 - x0) / static_cast<double>(n - 1); }
    double at(std::size_t i) const {
        return i + 1 == n ? x1 : x0 + static_cast<double>(i) * step();
    }
};

/// Real symmetric tridiagonal matrix.
struct TridiagSym {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }

    void validate() const {
        if (diag.empty()) throw InvalidArgument("TridiagSym: empty matrix");
        if (off.size() + 1 != diag.size())
            throw InvalidArgument("TridiagSym: off-diagonal length must be n-1");
    }
};

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
};

struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

namespace tol {
inline constexpr double eigenvalue = 1e-12;
inline constexpr double root = 1e-10;
inline constexpr double golden = 1e-8;
}  // namespace tol

namespace detail {

inline double pivot_floor(const TridiagSym& t) {
    double emax = 1.0;
    for (double e : t.off) emax = std::max(emax, e * e);
    return DBL_MIN * emax;
}

inline std::pair<double, double> gershgorin(const TridiagSym& t) {
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < n) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = 2.0 * DBL_EPSILON * std::max(std::abs(lo), std::abs(hi)) + DBL_MIN;
    return {lo - pad, hi + pad};
}

inline std::size_t sturm_count(const TridiagSym& t, double x, double pivmin) {
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
        q = t.diag[i] - x - (i > 0 ? e2 / q : 0.0);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

// Solves (T - shift) x = b by Gaussian elimination with partial pivoting.
inline void shifted_solve(const TridiagSym& t, double shift, std::vector<double>& b) {
    const std::size_t n = t.size();
    std::vector<double> d(n), du(n, 0.0), du2(n, 0.0), dl(n, 0.0);
    std::vector<char> swapped(n, 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        du[i] = t.off[i];
        dl[i] = t.off[i];
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]));
    for (double e : t.off) scale = std::max(scale, std::abs(e));
    const double tiny = std::max(scale, 1.0) * DBL_EPSILON;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - f * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (swapped[i]) std::swap(b[i], b[i + 1]);
        b[i + 1] -= dl[i] * b[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        if (ii + 1 < n) s -= du[ii] * b[ii + 1];
        if (ii + 2 < n) s -= du2[ii] * b[ii + 2];
        b[ii] = s / d[ii];
    }
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace detail

/// Number of eigenvalues of t strictly below x.
inline std::size_t sturm_count(const TridiagSym& t, double x) {
    t.validate();
    return detail::sturm_count(t, x, detail::pivot_floor(t));
}

/// Eigenvalue with 0-based ascending index j, by Sturm bisection.
/// Stops when the bracket is narrower than max(abs_tol, rel_tol * |value|).
inline double eigenvalue_by_index(const TridiagSym& t, std::size_t j, double abs_tol = tol::eigenvalue,
                                  double rel_tol = 0.0, double lo_hint = -INFINITY,
                                  double hi_hint = INFINITY) {
    t.validate();
    const std::size_t n = t.size();
    if (j >= n) throw InvalidArgument("eigenvalue_by_index: index out of range");
    for (double v : t.diag)
        if (!std::isfinite(v)) throw ConvergenceError("eigensolver: non-finite matrix entry", n);
    for (double v : t.off)
        if (!std::isfinite(v)) throw ConvergenceError("eigensolver: non-finite matrix entry", n);
    const double pivmin = detail::pivot_floor(t);
    auto [lo, hi] = detail::gershgorin(t);
    lo = std::max(lo, lo_hint);
    hi = std::min(hi, hi_hint);
    if (!(lo <= hi)) std::tie(lo, hi) = detail::gershgorin(t);
    constexpr int max_iter = 4000;
    for (int it = 0; it < max_iter; ++it) {
        const double width = hi - lo;
        const double scale = std::max(std::abs(lo), std::abs(hi));
        if (width <= std::max(abs_tol, rel_tol * scale)) return 0.5 * (lo + hi);
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        if (detail::sturm_count(t, mid, pivmin) > j)
            hi = mid;
        else
            lo = mid;
    }
    throw ConvergenceError("eigensolver: bisection iteration cap reached", n);
}

/// Eigenvector for an accurately known eigenvalue by inverse iteration.
/// `against` holds already computed vectors of nearby eigenvalues to orthogonalize against.
inline std::vector<double> inverse_iteration(const TridiagSym& t, double lambda,
                                             std::span<const std::vector<double>> against = {}) {
    const std::size_t n = t.size();
    std::vector<double> v(n);
    // deterministic, non-symmetric start vector
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + 3.0 * static_cast<double>(i));
    double prev = 0.0;
    for (int it = 0; it < 8; ++it) {
        for (const auto& w : against) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += w[i] * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * w[i];
        }
        detail::shifted_solve(t, lambda, v);
        const double nv = detail::norm2(v);
        if (!std::isfinite(nv) || nv == 0.0)
            throw ConvergenceError("inverse iteration: breakdown", n);
        for (double& x : v) x /= nv;
        if (it >= 2 && std::abs(nv - prev) <= 1e-10 * nv) break;
        prev = nv;
    }
    for (const auto& w : against) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += w[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * w[i];
    }
    const double nv = detail::norm2(v);
    for (double& x : v) x /= nv;
    return v;
}

/// The k smallest eigenvalues of a symmetric tridiagonal matrix, ascending.
/// With `vectors`, eigenvectors are returned normalized so that sum_i weights[i] * v_i^2 = 1
/// after the caller's back-transformation v_i = y_i / sqrt(weights[i]); empty weights mean the
/// Euclidean norm.
inline EigenResult eig_sym_tridiag(const TridiagSym& t, std::size_t k, bool vectors = false,
                                   std::span<const double> weights = {},
                                   double abs_tol = tol::eigenvalue) {
    t.validate();
    if (k == 0 || k > t.size()) throw InvalidArgument("eig_sym_tridiag: need 1 <= k <= n");
    if (!weights.empty() && weights.size() != t.size())
        throw InvalidArgument("eig_sym_tridiag: weight length mismatch");
    EigenResult out;
    out.values.reserve(k);
    double lo = -INFINITY;
    for (std::size_t j = 0; j < k; ++j) {
        const double v = eigenvalue_by_index(t, j, abs_tol, 0.0, lo);
        out.values.push_back(v);
        lo = v - abs_tol;
    }
    if (!vectors) return out;
    double scale = 0.0;
    for (double d : t.diag) scale = std::max(scale, std::abs(d));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::vector<double>> cluster;
        for (std::size_t i = 0; i < j; ++i)
            if (std::abs(out.values[i] - out.values[j]) < 1e-9 * std::max(1.0, scale))
                cluster.push_back(out.vectors[i]);
        auto y = inverse_iteration(t, out.values[j], cluster);
        if (!weights.empty()) {
            for (std::size_t i = 0; i < y.size(); ++i) y[i] /= std::sqrt(weights[i]);
        }
        out.vectors.push_back(std::move(y));
    }
    return out;
}

/// Smallest k singular values of an upper bidiagonal matrix (diagonal d, superdiagonal e),
/// ascending, to high relative accuracy. Uses bisection on the zero-diagonal Golub-Kahan
/// tridiagonal form, whose Sturm counts are relatively robust.
inline std::vector<double> bidiag_smallest_singular(std::span<const double> d, std::span<const double> e,
                                                    std::size_t k, double rel_tol = 8.0 * DBL_EPSILON) {
    const std::size_t n = d.size();
    if (n == 0 || e.size() + 1 != n) throw InvalidArgument("bidiagonal: inconsistent sizes");
    if (k == 0 || k > n) throw InvalidArgument("bidiagonal: need 1 <= k <= n");
    TridiagSym tgk;
    tgk.diag.assign(2 * n, 0.0);
    tgk.off.resize(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        tgk.off[2 * i] = d[i];
        if (i + 1 < n) tgk.off[2 * i + 1] = e[i];
    }
    std::vector<double> out;
    out.reserve(k);
    double lo = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double s = eigenvalue_by_index(tgk, n + j, 4.0 * DBL_MIN, rel_tol, lo);
        out.push_back(s);
        lo = s * (1.0 - 4.0 * rel_tol);
    }
    return out;
}

/// Validates and builds a bracket for f on [lo, hi].
template <class F>
Bracket make_bracket(F&& f, double lo, double hi) {
    if (!(lo < hi)) throw InvalidArgument("bracket: need lo < hi");
    Bracket b{lo, hi, f(lo), f(hi)};
    if (!(b.f_lo * b.f_hi < 0.0))
        throw BracketError("bracket: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    return b;
}

/// Root of f inside a sign-changing bracket; stops when the bracket is narrower than tol.
template <class F>
double bisect(F&& f, Bracket b, double tol = tol::root, double rel_tol = 0.0) {
    if (!(b.lo < b.hi) || !(b.f_lo * b.f_hi < 0.0))
        throw BracketError("bisect: invalid bracket");
    if (!(tol > 0.0) && !(rel_tol > 0.0)) throw InvalidArgument("bisect: tolerance must be positive");
    constexpr int max_iter = 2000;
    for (int it = 0; it < max_iter; ++it) {
        const double scale = std::max(std::abs(b.lo), std::abs(b.hi));
        if (b.hi - b.lo <= std::max(tol, rel_tol * scale)) break;
        const double mid = 0.5 * (b.lo + b.hi);
        if (mid <= b.lo || mid >= b.hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (b.f_lo < 0.0)) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    // linear interpolation inside the final bracket
    const double t = b.f_lo / (b.f_lo - b.f_hi);
    return b.lo + std::clamp(t, 0.0, 1.0) * (b.hi - b.lo);
}

/// Bracketed root by the Illinois variant of regula falsi; converges superlinearly on smooth f.
template <class F>
double illinois(F&& f, Bracket b, double tol = tol::root, int max_iter = 200) {
    if (!(b.lo < b.hi) || !(b.f_lo * b.f_hi < 0.0))
        throw BracketError("illinois: invalid bracket");
    int side = 0;
    double x = b.lo;
    for (int it = 0; it < max_iter; ++it) {
        x = (b.lo * b.f_hi - b.hi * b.f_lo) / (b.f_hi - b.f_lo);
        if (!(x > b.lo && x < b.hi)) x = 0.5 * (b.lo + b.hi);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (b.f_lo < 0.0)) {
            if (x - b.lo < tol) return x;
            b.lo = x;
            b.f_lo = fx;
            if (side == -1) b.f_hi *= 0.5;
            side = -1;
        } else {
            if (b.hi - x < tol) return x;
            b.hi = x;
            b.f_hi = fx;
            if (side == 1) b.f_lo *= 0.5;
            side = 1;
        }
        if (b.hi - b.lo < tol) return 0.5 * (b.lo + b.hi);
    }
    throw ConvergenceError("illinois: iteration cap reached");
}

struct MinResult {
    double argmin;
    double value;
};

/// Golden-section search for the minimizer of a unimodal function.
template <class F>
MinResult golden_min(F&& f, double lo, double hi, double tol = tol::golden) {
    if (!(lo < hi)) throw InvalidArgument("golden_min: need lo < hi");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = fc <= fd ? c : d;
    const double fx = fc <= fd ? fc : fd;
    return {x, fx};
}

enum class QuadRule { automatic, trapezoid, simpson };

/// Composite quadrature of sampled values; Simpson for an odd node count unless a rule is forced.
inline double integrate(std::span<const double> samples, const Grid1D& grid,
                        std::span<const double> weight = {}, QuadRule rule = QuadRule::automatic) {
    if (samples.size() != grid.n) throw InvalidArgument("integrate: samples length != grid.n");
    if (!weight.empty() && weight.size() != grid.n)
        throw InvalidArgument("integrate: weight length != grid.n");
    const std::size_t n = grid.n;
    auto val = [&](std::size_t i) { return weight.empty() ? samples[i] : samples[i] * weight[i]; };
    const bool simpson = rule == QuadRule::simpson || (rule == QuadRule::automatic && n % 2 == 1);
    if (simpson && n % 2 == 0) throw InvalidArgument("integrate: Simpson needs an odd node count");
    double s = 0.0;
    if (simpson) {
        for (std::size_t i = 0; i < n; ++i) {
            const double c = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            s += c * val(i);
        }
        return s * grid.step() / 3.0;
    }
    for (std::size_t i = 0; i < n; ++i) s += ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * val(i);
    return s * grid.step();
}

}  // namespace diracbag
