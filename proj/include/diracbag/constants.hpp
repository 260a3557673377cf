#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace diracbag {

using cplx = std::complex<double>;
using Sym2 = std::array<std::array<double, 2>, 2>;

/// Gaussian weight e^{-H(y, y)} on the plane, H the Hessian of the potential at its minimum.
struct BargmannWeight {
    Sym2 hess{{{0.5, 0.0}, {0.0, 0.5}}};

    static BargmannWeight isotropic(double b0) { return {Sym2{{{b0 / 2.0, 0.0}, {0.0, b0 / 2.0}}}}; }

    void validate() const {
        const auto& H = hess;
        if (std::abs(H[0][1] - H[1][0]) > 1e-12 * (std::abs(H[0][1]) + 1.0))
            throw InvalidArgument("BargmannWeight: Hessian must be symmetric");
        if (!(H[0][0] > 0.0) || !(H[0][0] * H[1][1] - H[0][1] * H[1][0] > 0.0))
            throw InvalidArgument("BargmannWeight: Hessian must be positive definite");
    }
};

/// Closed boundary curve sampled with trapezoid arclength weights.
struct BoundaryCurve {
    std::vector<cplx> points;
    std::vector<double> weights;
    cplx z_min{0.0, 0.0};

    /// From a 2pi-periodic parametrization and its derivative, N equispaced parameter samples.
    static BoundaryCurve from_parametrization(const std::function<cplx(double)>& gamma,
                                              const std::function<cplx(double)>& dgamma, std::size_t N,
                                              cplx z_min) {
        if (N < 8) throw InvalidArgument("BoundaryCurve: need at least 8 samples");
        BoundaryCurve c;
        c.z_min = z_min;
        const double dt = 2.0 * std::numbers::pi / static_cast<double>(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double t = dt * static_cast<double>(i);
            c.points.push_back(gamma(t));
            c.weights.push_back(std::abs(dgamma(t)) * dt);
        }
        return c;
    }

    static BoundaryCurve circle(double R, cplx center = {0.0, 0.0}, cplx z_min = {0.0, 0.0}, std::size_t N = 512) {
        if (!(R > 0.0)) throw InvalidArgument("BoundaryCurve: radius must be positive");
        return from_parametrization([=](double t) { return center + R * std::polar(1.0, t); },
                                    [=](double t) { return cplx(0.0, R) * std::polar(1.0, t); }, N, z_min);
    }

    /// Ellipse with semi-axes a, b centered at the origin.
    static BoundaryCurve ellipse(double a, double b, cplx z_min = {0.0, 0.0}, std::size_t N = 512) {
        return from_parametrization([=](double t) { return cplx(a * std::cos(t), b * std::sin(t)); },
                                    [=](double t) { return cplx(-a * std::sin(t), b * std::cos(t)); }, N, z_min);
    }

    double length() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

namespace detail {

// int_R x^n e^{-mu x^2} dx
inline double gauss_moment(int n, double mu) {
    if (n % 2) return 0.0;
    return std::tgamma((n + 1) / 2.0) / std::pow(mu, (n + 1) / 2.0);
}

inline double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

}  // namespace detail

/// Gram matrix <z^a, z^b> of the weight for a, b < k (analytic Gaussian moments).
inline Eigen::MatrixXcd bargmann_gram(int k, const BargmannWeight& w) {
    w.validate();
    const auto& H = w.hess;
    // rotate to the eigenbasis: H = Q diag(mu1, mu2) Q^T, Q a rotation by angle th
    const double th = 0.5 * std::atan2(2.0 * H[0][1], H[0][0] - H[1][1]);
    const double c = std::cos(th), s = std::sin(th);
    const double mu1 = c * c * H[0][0] + 2.0 * c * s * H[0][1] + s * s * H[1][1];
    const double mu2 = s * s * H[0][0] - 2.0 * c * s * H[0][1] + c * c * H[1][1];
    // z = e^{i th} zeta, zeta = w1 + i w2 with independent Gaussians
    // <z^a, z^b> = int z^a conj(z)^b = e^{i(a-b)th} int zeta^a conj(zeta)^b
    Eigen::MatrixXcd G(k, k);
    const cplx I(0.0, 1.0);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            cplx sum = 0.0;
            for (int p = 0; p <= a; ++p) {
                for (int q = 0; q <= b; ++q) {
                    const int n1 = p + q, n2 = (a - p) + (b - q);
                    if (n1 % 2 || n2 % 2) continue;
                    const cplx coef = detail::binom(a, p) * detail::binom(b, q) * std::pow(I, a - p) *
                                      std::pow(-I, b - q);
                    sum += coef * detail::gauss_moment(n1, mu1) * detail::gauss_moment(n2, mu2);
                }
            }
            G(b, a) = std::polar(1.0, (a - b) * th) * sum;  // G(row b, col a) = <z^a, z^b>
        }
    }
    return G;
}

/// Distance from z^{k-1} to polynomials of degree <= k-2 in the weighted norm.
inline double bargmann_distance(int k, const BargmannWeight& w) {
    if (k < 1) throw InvalidArgument("bargmann_distance: k must be >= 1");
    if (k > 12) throw ConvergenceError("bargmann_distance: Gram matrix too ill-conditioned for k > 12",
                                       static_cast<std::size_t>(k));
    const Eigen::MatrixXcd G = bargmann_gram(k, w);
    Eigen::LLT<Eigen::MatrixXcd> llt(G);
    if (llt.info() != Eigen::Success)
        throw ConvergenceError("bargmann_distance: Gram matrix not positive definite", static_cast<std::size_t>(k));
    const Eigen::MatrixXcd L = llt.matrixL();
    return std::abs(L(k - 1, k - 1).real());
}

struct HardyDistance {
    double value = 0.0;
    double delta = 0.0;  // relative change under n_basis -> n_basis + 8
    bool converged = false;
};

namespace detail {

inline double hardy_ls(int k, const BoundaryCurve& c, int n_basis) {
    const std::size_t N = c.points.size();
    const int ncol = n_basis - k;
    Eigen::MatrixXcd A(N, ncol);
    Eigen::VectorXcd b(N);
    for (std::size_t i = 0; i < N; ++i) {
        const cplx dz = c.points[i] - c.z_min;
        const double sw = std::sqrt(c.weights[i]);
        b(static_cast<Eigen::Index>(i)) = sw * std::pow(dz, k - 1);
        for (int j = 0; j < ncol; ++j) A(static_cast<Eigen::Index>(i), j) = sw * std::pow(dz, k + j);
    }
    // column normalization, then ridge-regularized normal equations
    Eigen::VectorXd scale(ncol);
    for (int j = 0; j < ncol; ++j) {
        scale(j) = A.col(j).norm();
        A.col(j) /= scale(j);
    }
    Eigen::MatrixXcd G = A.adjoint() * A;
    G.diagonal().array() += 1e-13;
    const Eigen::VectorXcd x = G.ldlt().solve(A.adjoint() * b);
    return (b - A * x).norm();
}

}  // namespace detail

/// Distance from (z - z_min)^{k-1} to the Hardy subspace vanishing to order k at z_min,
/// by least squares over (z - z_min)^j, k <= j < n_basis, in the boundary norm.
inline HardyDistance hardy_distance(int k, const BoundaryCurve& curve, int n_basis = 40, bool strict = true) {
    if (k < 1) throw InvalidArgument("hardy_distance: k must be >= 1");
    if (n_basis < k + 8) throw InvalidArgument("hardy_distance: need n_basis >= k + 8");
    if (curve.points.size() != curve.weights.size() || curve.points.size() < static_cast<std::size_t>(2 * n_basis + 16))
        throw InvalidArgument("hardy_distance: too few boundary samples for the basis size");
    HardyDistance out;
    out.value = detail::hardy_ls(k, curve, n_basis);
    const double more = detail::hardy_ls(k, curve, n_basis + 8);
    out.delta = std::abs(more - out.value) / more;
    out.converged = out.delta < 1e-8;
    if (strict && !out.converged)
        throw ConvergenceError("hardy_distance: truncation not converged (relative change " +
                                   std::to_string(out.delta) + ")",
                               static_cast<std::size_t>(n_basis));
    return out;
}

struct CkResult {
    int k = 1;
    double dist_H = 0.0;
    double dist_B = 0.0;
    double Ck = 0.0;
};

inline CkResult ck_constant(int k, const BargmannWeight& w, const BoundaryCurve& curve, int n_basis = 40) {
    CkResult r;
    r.k = k;
    r.dist_H = hardy_distance(k, curve, n_basis).value;
    r.dist_B = bargmann_distance(k, w);
    r.Ck = (r.dist_H / r.dist_B) * (r.dist_H / r.dist_B);
    return r;
}

/// Disk of radius R with radial field: B(0)^k / (k-1)! * (R^2/2)^{k-1} * R.
inline double disk_ck(int k, double b0, double R) {
    if (k < 1) throw InvalidArgument("disk_ck: k must be >= 1");
    return std::pow(b0, k) / std::tgamma(static_cast<double>(k)) * std::pow(R * R / 2.0, k - 1) * R;
}

/// Leading-order size of the k-th positive eigenvalue: C_k h^{1-k} e^{2 phi_min / h}.
inline double lambda_plus_prediction(const CkResult& ck, double phi_min, double h) {
    if (!(h > 0.0)) throw InvalidArgument("lambda_plus_prediction: h must be positive");
    return ck.Ck * std::pow(h, 1 - ck.k) * std::exp(2.0 * phi_min / h);
}

}  // namespace diracbag
