#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "dispersion.hpp"
#include "errors.hpp"

namespace diracbag {

/// Flux constant of the boundary operator: area/(h L) - a0/sqrt(h) + pi/L.
inline double flux_th(double area, double L, double h, double a0) {
    if (!(L > 0.0) || !(h > 0.0) || area < 0.0) throw InvalidArgument("flux_th: need L, h > 0 and area >= 0");
    return area / (h * L) - a0 / std::sqrt(h) + std::numbers::pi / L;
}

/// Curvature along the boundary, period L: constant, callable, or uniform samples.
struct Curvature {
    std::function<double(double)> fn;
    std::vector<double> samples;  // uniform on [0, L)

    static Curvature constant(double k) { return {[k](double) { return k; }, {}}; }
    static Curvature callable(std::function<double(double)> f) { return {std::move(f), {}}; }
    static Curvature sampled(std::vector<double> s) {
        if (s.size() < 4) throw InvalidArgument("Curvature: need at least 4 samples");
        return {{}, std::move(s)};
    }

    std::vector<double> sample(std::size_t N, double L) const {
        if (!samples.empty()) return samples;
        std::vector<double> out(N);
        for (std::size_t i = 0; i < N; ++i) out[i] = fn(L * static_cast<double>(i) / static_cast<double>(N));
        return out;
    }
};

struct EffSpec {
    double L = 2.0 * std::numbers::pi;
    double area = std::numbers::pi;
    double h = 0.1;
    double a0 = 1.31325;
    double t_h = 0.0;
    Curvature kappa = Curvature::constant(1.0);
    int cutoff = 0;  // 0 selects 4 * count + 16

    static EffSpec disk(double R, double h, double a0) {
        EffSpec s;
        s.L = 2.0 * std::numbers::pi * R;
        s.area = std::numbers::pi * R * R;
        s.h = h;
        s.a0 = a0;
        s.t_h = flux_th(s.area, s.L, h, a0);
        s.kappa = Curvature::constant(1.0 / R);
        return s;
    }
};

struct EffSpectrum {
    std::vector<double> values;
    std::vector<int> m_sequence;  // disk route only
};

/// Disk of radius R: (m/R + t_h)^2 - 1/(12 R^2) taken in the greedy order of |m + R t_h|,
/// ties going to the smaller m.
inline EffSpectrum qeff_disk(double t_h, double R, int count) {
    if (count < 1) throw InvalidArgument("qeff_disk: count must be >= 1");
    if (!(R > 0.0)) throw InvalidArgument("qeff_disk: R must be positive");
    const double c = -R * t_h;  // closest integers to c come first
    const auto base = static_cast<long long>(std::floor(c));
    // candidates around c, then a stable sort by distance with the smaller m winning ties
    std::vector<long long> cand;
    for (long long m = base - count - 1; m <= base + count + 1; ++m) cand.push_back(m);
    std::stable_sort(cand.begin(), cand.end(), [&](long long a, long long b) {
        const double da = std::abs(static_cast<double>(a) - c), db = std::abs(static_cast<double>(b) - c);
        if (da != db) return da < db;
        return a < b;
    });
    EffSpectrum out;
    for (int n = 0; n < count; ++n) {
        const double m = static_cast<double>(cand[static_cast<std::size_t>(n)]);
        const double q = m / R + t_h;
        out.values.push_back(q * q - 1.0 / (12.0 * R * R));
        out.m_sequence.push_back(static_cast<int>(cand[static_cast<std::size_t>(n)]));
    }
    return out;
}

namespace detail {

inline std::vector<double> qeff_galerkin(const EffSpec& spec, int count, int cutoff) {
    const double L = spec.L;
    const std::size_t N = std::max<std::size_t>(512, static_cast<std::size_t>(8 * cutoff + 64));
    auto ks = spec.kappa.sample(N, L);
    const std::size_t Ns = ks.size();
    // Fourier coefficients of kappa^2/12 on the sample grid
    const int J = 2 * cutoff;
    if (static_cast<std::size_t>(2 * J + 1) > Ns)
        throw InvalidArgument("qeff_general: too few curvature samples for the cutoff");
    std::vector<std::complex<double>> c(static_cast<std::size_t>(J + 1));
    for (int j = 0; j <= J; ++j) {
        std::complex<double> s = 0.0;
        for (std::size_t i = 0; i < Ns; ++i) {
            const double ang = -2.0 * std::numbers::pi * j * static_cast<double>(i) / static_cast<double>(Ns);
            s += (ks[i] * ks[i] / 12.0) * std::polar(1.0, ang);
        }
        c[static_cast<std::size_t>(j)] = s / static_cast<double>(Ns);
    }
    // basis centered on the mode closest to -t_h L / (2 pi), so a shift of t_h by 2pi/L only relabels it
    const double w = 2.0 * std::numbers::pi / L;
    const long long mc = std::llround(-spec.t_h / w);
    const int n = 2 * cutoff + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        const double q = w * static_cast<double>(mc + a - cutoff) + spec.t_h;
        A(a, a) = q * q - c[0].real();
        for (int b = a + 1; b < n; ++b) {
            const auto cj = c[static_cast<std::size_t>(b - a)];
            A(a, b) = -std::conj(cj);
            A(b, a) = -cj;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("qeff_general: eigensolver failed", static_cast<std::size_t>(n));
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return out;
}

}  // namespace detail

/// Fourier-Galerkin spectrum of (D_s + t_h)^2 - kappa^2/12 on the periodic interval of length L.
inline EffSpectrum qeff_general(const EffSpec& spec, int count) {
    if (count < 1) throw InvalidArgument("qeff_general: count must be >= 1");
    if (!(spec.L > 0.0)) throw InvalidArgument("qeff_general: L must be positive");
    const int cutoff = spec.cutoff > 0 ? spec.cutoff : 4 * count + 16;
    if (cutoff < 4 * count + 16) throw InvalidArgument("qeff_general: need cutoff >= 4 count + 16");
    EffSpectrum out;
    out.values = detail::qeff_galerkin(spec, count, cutoff);
    const auto more = detail::qeff_galerkin(spec, count, cutoff + 8);
    for (int i = 0; i < count; ++i) {
        const double a = out.values[static_cast<std::size_t>(i)], b = more[static_cast<std::size_t>(i)];
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)))
            throw ConvergenceError("qeff_general: eigenvalue " + std::to_string(i + 1) + " not converged in cutoff",
                                   static_cast<std::size_t>(cutoff));
    }
    return out;
}

/// a0 sqrt(h) + c0 h^{3/2} lambda_n of the effective operator.
inline double lambda_minus_prediction(int n, double h, double a0, double c0, const EffSpectrum& eff) {
    if (n < 1 || static_cast<std::size_t>(n) > eff.values.size())
        throw InvalidArgument("lambda_minus_prediction: n out of range");
    return a0 * std::sqrt(h) + c0 * std::pow(h, 1.5) * eff.values[static_cast<std::size_t>(n - 1)];
}

inline double lambda_minus_prediction(int n, double h, const A0Result& a, const EffSpectrum& eff) {
    return lambda_minus_prediction(n, h, a.a0, a.c0, eff);
}

}  // namespace diracbag
