#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fiber.hpp"
#include "numerics.hpp"

namespace diracbag {

/// A point on a dispersion curve: theta > 0 with nu_k(theta, xi) = theta^2.
struct ThetaPoint {
    Sign sign = Sign::minus;
    int k = 1;
    double xi = 0.0;
    double theta = 0.0;
    double residual = 0.0;      // nu_k(theta, xi) - theta^2
    bool resolved = true;       // false when the root lies below the grid's resolution
};

namespace detail {
inline double fiber_value(Sign s, int k, double alpha, double xi, const FiberGrid& g) {
    const auto spec = FiberSpec::half_line(s, alpha, xi, g);
    if (k == 1) return fiber_ground(spec);
    return fiber_eigs(spec, k, false).values.back();
}
}  // namespace detail

inline ThetaPoint theta(Sign s, int k, double xi, const FiberGrid& g = {}) {
    if (k < 1) throw InvalidArgument("theta: k must be >= 1");
    auto F = [&](double a) { return detail::fiber_value(s, k, a, xi, g) - a * a; };
    constexpr double eps = 1e-6;
    ThetaPoint p{s, k, xi, 0.0, 0.0, true};
    const double f_lo = F(eps);
    if (f_lo <= 0.0) {
        // the discrete curve sits at or below eps^2: the root is not resolved by the grid
        p.theta = 0.0;
        p.residual = f_lo + eps * eps;
        p.resolved = false;
        return p;
    }
    double hi = std::sqrt(2.0 * k) + 1.0;
    double f_hi = F(hi);
    for (int i = 0; i < 12 && f_hi >= 0.0; ++i) {
        hi *= 2.0;
        f_hi = F(hi);
    }
    if (f_hi >= 0.0) throw BracketError("theta: no sign change up to alpha = " + std::to_string(hi));
    p.theta = bisect(F, Bracket{eps, hi, f_lo, f_hi}, tol::root);
    p.residual = F(p.theta);
    return p;
}

struct NuPoint {
    double alpha = 0.0;
    double nu = 0.0;
    double xi_alpha = 0.0;
    double u0sq = 0.0;
};

/// nu(alpha) = min over xi of the ground minus-fiber eigenvalue. `xi_hint` narrows the scan.
/// At the minimizer nu = 2 alpha xi - alpha^2 with 0 < nu < 2, so xi lies in [alpha/2, alpha/2 + 1/alpha];
/// searching only there keeps large alpha (where the curve is flat to grid accuracy) well posed.
inline NuPoint nu_of_alpha(double alpha, const FiberGrid& g = {}, std::optional<double> xi_hint = {}) {
    if (!(alpha > 0.0)) throw InvalidArgument("nu_of_alpha: alpha must be positive");
    auto nu = [&](double x) { return detail::fiber_value(Sign::minus, 1, alpha, x, g); };
    double lo = 0.5 * alpha - 0.05, hi = 0.5 * alpha + 1.0 / alpha + 0.05;
    if (xi_hint && *xi_hint > lo && *xi_hint < hi) {
        lo = std::max(lo, *xi_hint - 0.75);
        hi = std::min(hi, *xi_hint + 0.75);
    }
    constexpr int samples = 9;
    const double dx = (hi - lo) / (samples - 1);
    std::size_t i = 0;
    double best = INFINITY;
    for (int j = 0; j < samples; ++j) {
        const double v = nu(lo + dx * j);
        if (v < best) {
            best = v;
            i = static_cast<std::size_t>(j);
        }
    }
    const double a = lo + dx * static_cast<double>(i == 0 ? 0 : i - 1);
    const double b = lo + dx * static_cast<double>(std::min<std::size_t>(i + 1, samples - 1));
    const auto m = golden_min(nu, a, b, tol::golden);
    const auto fe = fiber_eigs(FiberSpec::half_line(Sign::minus, alpha, m.argmin, g), 1);
    return {alpha, fe.values[0], m.argmin, fe.u0 * fe.u0};
}

struct NuCurve {
    std::vector<double> alpha_grid;
    std::vector<double> nu;
    std::vector<double> xi_alpha;
    std::vector<double> u0sq;
};

inline NuCurve nu_curve(std::span<const double> alphas, const FiberGrid& g = {}) {
    NuCurve c;
    std::optional<double> hint;
    for (double a : alphas) {
        const auto p = nu_of_alpha(a, g, hint);
        hint = p.xi_alpha;
        c.alpha_grid.push_back(a);
        c.nu.push_back(p.nu);
        c.xi_alpha.push_back(p.xi_alpha);
        c.u0sq.push_back(p.u0sq);
    }
    return c;
}

struct A0Result {
    double a0 = 0.0;
    double u0sq = 0.0;
    double d2xi_nu = 0.0;
    double c0 = 0.0;
    double residual = 0.0;  // nu(a0) - a0^2
    FiberGrid grid;
};

/// Second xi-derivative of the ground minus-fiber eigenvalue by a centered difference.
inline double d2xi_fiber(double alpha, double xi, const FiberGrid& g = {}, double step = 5e-3) {
    auto nu = [&](double x) { return detail::fiber_value(Sign::minus, 1, alpha, x, g); };
    return (nu(xi + step) - 2.0 * nu(xi) + nu(xi - step)) / (step * step);
}

/// The gap constant a0 (unique root of nu(alpha) = alpha^2) and the derived coupling c0.
inline A0Result find_a0(const FiberGrid& g = {}) {
    // At the root the minimizer equals alpha, so nu_1(a, a) - a^2 has the same unique zero;
    // it gives a cheap bracket that is then refined on the true min-over-xi function.
    auto G = [&](double a) { return detail::fiber_value(Sign::minus, 1, a, a, g) - a * a; };
    const double coarse = bisect(G, make_bracket(G, 0.5, std::sqrt(2.0)), 1e-7);
    double hint = coarse;
    auto f = [&](double a) {
        const auto p = nu_of_alpha(a, g, hint);
        hint = p.xi_alpha;
        return p.nu - a * a;
    };
    double lo = coarse - 1e-4, hi = coarse + 1e-4;
    double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < 20 && flo * fhi >= 0.0; ++i) {
        lo -= 1e-3;
        hi += 1e-3;
        flo = f(lo);
        fhi = f(hi);
    }
    const double a0 = illinois(f, Bracket{lo, hi, flo, fhi}, tol::root);
    const auto p = nu_of_alpha(a0, g, hint);
    A0Result r;
    r.a0 = a0;
    r.u0sq = p.u0sq;
    r.residual = p.nu - a0 * a0;
    r.d2xi_nu = d2xi_fiber(a0, p.xi_alpha, g);
    r.c0 = a0 * r.u0sq / (2.0 * a0 - r.u0sq);
    r.grid = g;
    return r;
}

struct Momenta {
    std::array<double, 5> M{};
};

namespace detail {
inline double trapz(const std::vector<double>& v, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += ((i == 0 || i + 1 == v.size()) ? 0.5 : 1.0) * v[i];
    return s * h;
}
}  // namespace detail

/// M_j = int (xi - t)^j u^2 for the normalized ground minus-fiber eigenfunction.
inline Momenta momenta(double alpha, double xi, const FiberGrid& g = {}) {
    const auto fe = fiber_eigs(FiberSpec::half_line(Sign::minus, alpha, xi, g), 1);
    const auto& u = fe.functions[0];
    Momenta m;
    std::vector<double> w(u.size());
    for (int j = 0; j <= 4; ++j) {
        for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::pow(xi - fe.grid.at(i), j) * u[i] * u[i];
        m.M[j] = detail::trapz(w, fe.grid.step());
    }
    return m;
}

/// Closed forms of M_1..M_4 in terms of nu(alpha, xi) and u(0)^2 (general alpha, xi).
inline Momenta momenta_closed_form(double alpha, double xi, double nu, double u0sq) {
    const double d = alpha - xi;
    const double S = xi * xi + 1.0 - nu - d * d;
    Momenta m;
    m.M[0] = 1.0;
    m.M[1] = 0.5 * u0sq * S;
    m.M[2] = 0.5 * (nu - 1.0) + 0.25 * u0sq * (-d + xi * S);
    m.M[3] = u0sq / 12.0 * ((4.0 * nu - 4.0 + 2.0 * xi * xi) * S - 2.0 - 4.0 * xi * d);
    m.M[4] = 3.0 / 8.0 + 3.0 / 8.0 * (nu - 1.0) * (nu - 1.0) +
             u0sq / 16.0 * (-6.0 * xi + (3.0 * (1.0 - nu) - 6.0 * xi * xi) * d) +
             u0sq / 16.0 * (2.0 * xi * xi * xi + 3.0 * (nu - 1.0) * xi) * S;
    return m;
}

enum class CxiConvention { minus_xi, plus_xi };

inline const char* to_string(CxiConvention c) { return c == CxiConvention::minus_xi ? "minus_xi" : "plus_xi"; }

struct CxiPairings {
    double pair0 = 0.0;       // <C u, u> with the validated convention
    double dpair = 0.0;       // d/dxi <C u, u> at fixed alpha
    double final_sum = 0.0;   // <C u, k0> + <C2 u, u>
    double pair0_minus = 0.0;
    double pair0_plus = 0.0;
    double d2xi_nu = 0.0;
    CxiConvention convention = CxiConvention::minus_xi;
};

namespace detail {

struct GroundState {
    std::vector<double> t, u, du;
    double nu = 0.0;
    double h = 0.0;
};

inline GroundState ground_state(double alpha, double xi, const FiberGrid& g) {
    const auto fe = fiber_eigs(FiberSpec::half_line(Sign::minus, alpha, xi, g), 1);
    GroundState s;
    s.u = fe.functions[0];
    s.nu = fe.values[0];
    s.h = fe.grid.step();
    const std::size_t n = s.u.size();
    s.t.resize(n);
    s.du.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.t[i] = fe.grid.at(i);
    s.du[0] = (alpha - xi) * s.u[0];
    for (std::size_t i = 1; i + 1 < n; ++i) s.du[i] = (s.u[i + 1] - s.u[i - 1]) / (2.0 * s.h);
    s.du[n - 1] = (s.u[n - 1] - s.u[n - 2]) / s.h;
    return s;
}

// <C u, u> for an eigenfunction (M u = nu u); sign selects -xi or +xi in the operator.
inline double cxi_pair(const GroundState& s, double xi, double sign) {
    std::vector<double> v(s.u.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = s.t[i];
        const double cu = 2.0 * (s.nu * t * s.u[i] + sign * xi * s.u[i] - s.du[i] + t * t * (xi - t) * s.u[i]);
        v[i] = cu * s.u[i];
    }
    return trapz(v, s.h);
}

}  // namespace detail

/// Pairings of the curvature operator with the ground state at alpha = xi = a0.
inline CxiPairings cxi_pairings(const A0Result& at, double fd_step = 1e-3) {
    const double a = at.a0;
    const auto& g = at.grid;
    const auto s = detail::ground_state(a, a, g);
    CxiPairings r;
    r.pair0_minus = detail::cxi_pair(s, a, -1.0);
    r.pair0_plus = detail::cxi_pair(s, a, +1.0);
    r.convention = std::abs(r.pair0_minus) <= std::abs(r.pair0_plus) ? CxiConvention::minus_xi
                                                                      : CxiConvention::plus_xi;
    const double sign = r.convention == CxiConvention::minus_xi ? -1.0 : 1.0;
    r.pair0 = sign < 0 ? r.pair0_minus : r.pair0_plus;

    const auto sp = detail::ground_state(a, a + fd_step, g);
    const auto sm = detail::ground_state(a, a - fd_step, g);
    r.dpair = (detail::cxi_pair(sp, a + fd_step, sign) - detail::cxi_pair(sm, a - fd_step, sign)) / (2.0 * fd_step);

    const double xi = a;
    const std::size_t n = s.u.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s.t[i], u = s.u[i], du = s.du[i];
        const double p1 = xi - t, p2 = p1 * p1;
        const double cu = 2.0 * (s.nu * t * u + sign * xi * u - du + t * t * (xi - t) * u);
        const double k0 = (-xi / 2.0 + 2.0 / 3.0 * p1) * u + (2.0 / 3.0 * (1.0 - xi * xi) + xi * p1 - p2 / 3.0) * du;
        const double c2u = -4.0 * t * (du + (xi - t) * u) + 2.0 * t * t * s.nu * u +
                           8.0 / 3.0 * (xi - t) * t * t * t * u - 4.0 * t * t * u + t * t * t * t * u;
        v[i] = cu * k0 + c2u * u;
    }
    r.final_sum = detail::trapz(v, s.h);
    r.d2xi_nu = at.d2xi_nu;
    return r;
}

/// Lambda(a) = min(2 b0, b0' nu(a / sqrt(b0'))).
inline double lambda_cap(double a, double b0, double b0p, const FiberGrid& g = {}) {
    if (a < 0.0 || !(b0 > 0.0) || !(b0p > 0.0)) throw InvalidArgument("lambda_cap: bad arguments");
    if (a == 0.0) return 0.0;
    if (!std::isfinite(a)) return std::min(2.0 * b0, 2.0 * b0p);
    return std::min(2.0 * b0, b0p * nu_of_alpha(a / std::sqrt(b0p), g).nu);
}

/// Root c > 0 of nu(c * gamma) = c^2.
inline double c_gamma(double gamma, const FiberGrid& g = {}) {
    if (!(gamma > 0.0)) throw InvalidArgument("c_gamma: gamma must be positive");
    std::optional<double> hint;
    auto f = [&](double c) {
        const auto p = nu_of_alpha(c * gamma, g, hint);
        hint = p.xi_alpha;
        return p.nu - c * c;
    };
    const double hi = std::sqrt(2.0);
    double lo = 0.5;
    double flo = f(lo);
    for (int i = 0; i < 20 && flo <= 0.0; ++i) {
        lo *= 0.5;
        hint.reset();
        flo = f(lo);
    }
    hint.reset();
    const double fhi = f(hi);
    return bisect(f, Bracket{lo, hi, flo, fhi}, 1e-9);
}

struct FieldHessian {
    double d2s_mu = 0.0;
    double d2xi_mu = 0.0;
    double gap_prefactor = 0.0;
};

/// Second derivatives of the boundary band function at its minimum for a variable field
/// with boundary minimum b0p and curvature b2 = b''(s0).
inline FieldHessian variable_field_hessian(double b0p, double b2, double alpha, const FiberGrid& g = {},
                                           double step = 1e-3) {
    if (!(b0p > 0.0) || b2 < 0.0 || !(alpha > 0.0)) throw InvalidArgument("variable_field_hessian: bad arguments");
    const double a = alpha / std::sqrt(b0p);
    const auto mid = nu_of_alpha(a, g);
    FieldHessian r;
    if (b2 > 0.0) {
        const double np = nu_of_alpha(a + step, g, mid.xi_alpha).nu;
        const double nm = nu_of_alpha(a - step, g, mid.xi_alpha).nu;
        const double dnu = (np - nm) / (2.0 * step);
        r.d2s_mu = b2 * (mid.nu - 0.5 * a * dnu);
    }
    r.d2xi_mu = d2xi_fiber(a, mid.xi_alpha, g);
    r.gap_prefactor = std::sqrt(std::max(0.0, r.d2s_mu * r.d2xi_mu));
    return r;
}

/// sqrt(det Hess B) / B0 at an interior non-degenerate field minimum.
inline double interior_c0(const std::array<std::array<double, 2>, 2>& hess, double B0) {
    if (!(B0 > 0.0)) throw InvalidArgument("interior_c0: B0 must be positive");
    if (std::abs(hess[0][1] - hess[1][0]) > 1e-12 * (std::abs(hess[0][1]) + 1.0))
        throw InvalidArgument("interior_c0: Hessian must be symmetric");
    const double det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
    if (!(hess[0][0] > 0.0) || !(det > 0.0)) throw InvalidArgument("interior_c0: Hessian not positive definite");
    return std::sqrt(det) / B0;
}

}  // namespace diracbag
