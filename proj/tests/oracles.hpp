#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>

namespace oracle {

/// Shooting for -u'' + V u = E u on [0, T] with u decaying at T and u'(0) = beta u(0):
/// RK4 from T back to 0 starting on the decaying WKB branch; returns the Robin mismatch.
inline double shoot_mismatch(const std::function<double(double)>& V, double E, double beta, double T,
                             double step = 1e-3) {
    double t = T;
    double u = 1e-30;
    double du = -std::sqrt(std::max(V(T) - E, 1e-12)) * u;
    auto rhs = [&](double tt, double uu, double dd, double& fu, double& fd) {
        fu = dd;
        fd = (V(tt) - E) * uu;
    };
    const int n = static_cast<int>(std::ceil(T / step));
    const double hs = -T / n;
    for (int i = 0; i < n; ++i) {
        double k1u, k1d, k2u, k2d, k3u, k3d, k4u, k4d;
        rhs(t, u, du, k1u, k1d);
        rhs(t + hs / 2, u + hs / 2 * k1u, du + hs / 2 * k1d, k2u, k2d);
        rhs(t + hs / 2, u + hs / 2 * k2u, du + hs / 2 * k2d, k3u, k3d);
        rhs(t + hs, u + hs * k3u, du + hs * k3d, k4u, k4d);
        u += hs / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        du += hs / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
        t += hs;
        const double s = std::abs(u) + std::abs(du);
        if (s > 1e100) {
            u /= s;
            du /= s;
        }
    }
    const double s = std::abs(u) + std::abs(du);
    return (du - beta * u) / s;
}

/// Ground level of the fiber operator by bisection on the shooting mismatch inside [lo, hi]
/// (the bracket must enclose only the lowest eigenvalue).
inline double shoot_ground(const std::function<double(double)>& V, double beta, double T, double lo, double hi) {
    double flo = shoot_mismatch(V, lo, beta, T);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot_mismatch(V, mid, beta, T);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
