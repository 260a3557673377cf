#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fiber.hpp"
#include "numerics.hpp"
#include "parallel.hpp"

namespace diracbag {

/// Radial magnetic field profile on the disk of radius R.
struct RadialField {
    std::function<double(double)> B;
    double R = 1.0;
    std::string label = "custom";

    static RadialField constant(double b, double R = 1.0) {
        return {[b](double) { return b; }, R, "const:" + std::to_string(b)};
    }
    /// B(r) = c0 + c2 r^2.
    static RadialField quadratic(double c0, double c2, double R = 1.0) {
        return {[c0, c2](double r) { return c0 + c2 * r * r; }, R,
                "quad:" + std::to_string(c0) + "," + std::to_string(c2)};
    }
    /// B(r) = c r^p.
    static RadialField power(double c, double p, double R = 1.0) {
        return {[c, p](double r) { return c * std::pow(r, p); }, R,
                "power:" + std::to_string(c) + "," + std::to_string(p)};
    }

    double at(double r) const { return B(r); }
    double boundary() const { return B(R); }
};

struct RadialGauge {
    Grid1D grid;
    std::vector<double> phi;
    std::vector<double> dphi;
    double phi_min = 0.0;  // phi(0)
    double hess = 0.0;     // B(0) / 2
    double flux = 0.0;     // integral of B over the disk
};

namespace detail {

inline constexpr std::array<double, 5> gl_x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> gl_w{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                            0.4786286704993665, 0.2369268850561891};

template <class F>
double gauss5(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 5; ++q) s += gl_w[q] * f(c + hw * gl_x[q]);
    return s * hw;
}

}  // namespace detail

/// Coulomb-gauge potential of a radial field: phi'' + phi'/r = B, phi(R) = 0.
inline RadialGauge radial_phi(const RadialField& field, const Grid1D& grid) {
    if (!field.B) throw InvalidArgument("radial_phi: missing field profile");
    if (!(field.R > 0.0)) throw InvalidArgument("radial_phi: R must be positive");
    if (grid.x0 < 0.0 || std::abs(grid.x1 - field.R) > 1e-12 * field.R)
        throw InvalidArgument("radial_phi: grid must lie in (0, R] and end at R");
    const std::size_t n = grid.n;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = field.at(grid.at(i));
        if (!(b > 0.0) || !std::isfinite(b))
            throw InvalidArgument("radial_phi: non-positive field sample at r = " + std::to_string(grid.at(i)));
    }
    auto sB = [&](double s) { return s * field.at(s); };
    RadialGauge g;
    g.grid = grid;
    g.phi.assign(n, 0.0);
    g.dphi.assign(n, 0.0);
    // S(r) = int_0^r s B(s) ds at the nodes
    std::vector<double> S(n);
    S[0] = grid.x0 > 0.0 ? detail::gauss5(sB, 0.0, grid.x0) : 0.0;
    for (std::size_t i = 1; i < n; ++i) S[i] = S[i - 1] + detail::gauss5(sB, grid.at(i - 1), grid.at(i));
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.at(i);
        g.dphi[i] = r > 0.0 ? S[i] / r : 0.0;
    }
    // phi'(t) = S(t)/t inside [a, b], with S(t) = S(a) + int_a^t sB
    auto seg = [&](double a, double Sa, double b) {
        return detail::gauss5(
            [&](double t) { return (Sa + (t > a ? detail::gauss5(sB, a, t) : 0.0)) / t; }, a, b);
    };
    g.phi[n - 1] = 0.0;
    for (std::size_t i = n - 1; i-- > 0;) g.phi[i] = g.phi[i + 1] - seg(grid.at(i), S[i], grid.at(i + 1));
    g.phi_min = grid.x0 > 0.0 ? g.phi[0] - seg(0.0, 0.0, grid.x0) : g.phi[0];
    g.hess = field.at(0.0) / 2.0;
    g.flux = 2.0 * std::numbers::pi * S[n - 1];
    return g;
}

enum class FieldSign { plus, minus };

/// Disk of radius field.R with semiclassical parameter h, angular modes [m_lo, m_hi] and
/// n radial nodes at r_j = (j + 1/2) dr, the last one on the boundary.
struct DiskSpec {
    RadialField field = RadialField::constant(1.0);
    double h = 0.1;
    int m_lo = 0;
    int m_hi = -1;  // m_hi < m_lo selects the default range
    std::size_t n = 4001;
    int orientation = +1;  // -1 flips the field B -> -B

    static DiskSpec make(RadialField f, double h, std::size_t n = 4001) {
        DiskSpec s;
        s.field = std::move(f);
        s.h = h;
        s.n = n;
        s.set_default_range();
        return s;
    }

    void set_default_range() {
        const int w = static_cast<int>(std::ceil(3.0 * field.R * field.R / h));
        m_lo = -w;
        m_hi = w;
    }

    Grid1D rgrid() const {
        const double dr = field.R / (static_cast<double>(n) - 0.5);
        return Grid1D(0.5 * dr, field.R, n);
    }

    void validate() const {
        if (!(h > 0.0)) throw InvalidArgument("DiskSpec: h must be positive");
        if (n < 16) throw InvalidArgument("DiskSpec: need at least 16 radial nodes");
        if (m_hi < m_lo) throw InvalidArgument("DiskSpec: empty angular mode range");
        if (orientation != 1 && orientation != -1) throw InvalidArgument("DiskSpec: orientation must be +-1");
    }
};

struct SpectrumEntry {
    double value;
    int m;
    int k;
};

struct DiracSpectrum {
    std::vector<double> pos;
    std::vector<double> neg;  // magnitudes of the negative eigenvalues, ascending
    std::vector<std::pair<int, int>> pos_modes;  // (m, k) per entry
    std::vector<std::pair<int, int>> neg_modes;
    int m_lo = 0;
    int m_hi = 0;
};

/// Quantities shared by every mode of a disk problem, sampled at nodes and cell faces.
struct DiskModel {
    double R = 1.0, h = 0.1, dr = 0.0;
    std::size_t n = 0;
    int orientation = 1;
    std::vector<double> r, rmid;        // nodes, faces (rmid[j] between r[j] and r[j+1])
    std::vector<double> phi, dphi, B;   // at nodes
    std::vector<double> phimid;         // at faces
    std::vector<double> cell;           // int r dr over each node's cell
    double phi_min = 0.0;
    double flux = 0.0;

    explicit DiskModel(const DiskSpec& spec) {
        spec.validate();
        R = spec.field.R;
        h = spec.h;
        n = spec.n;
        orientation = spec.orientation;
        const Grid1D g = spec.rgrid();
        dr = g.step();
        const Grid1D fine(g.x0, R, 2 * n - 1);
        const auto gauge = radial_phi(spec.field, fine);
        r.resize(n);
        phi.resize(n);
        dphi.resize(n);
        B.resize(n);
        cell.resize(n);
        rmid.resize(n - 1);
        phimid.resize(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = g.at(j);
            phi[j] = gauge.phi[2 * j];
            dphi[j] = gauge.dphi[2 * j];
            B[j] = spec.field.at(r[j]);
            cell[j] = r[j] * dr;
            if (j + 1 < n) {
                rmid[j] = fine.at(2 * j + 1);
                phimid[j] = gauge.phi[2 * j + 1];
            }
        }
        cell[n - 1] = 0.5 * (R * R - (R - 0.5 * dr) * (R - 0.5 * dr));
        phi_min = gauge.phi_min;
        flux = gauge.flux;
    }
};

namespace detail {

inline double sign_of(FieldSign fs, int orientation) {
    return (fs == FieldSign::plus ? 1.0 : -1.0) * static_cast<double>(orientation);
}

/// Radial problem of one angular mode, with the lambda dependence isolated in the boundary entry.
/// m >= 0: integrating-factor form f = r^m e^{-s phi/h} q, factored as B^T B with B upper bidiagonal.
/// m < 0: potential form with the centrifugal term, symmetric tridiagonal.
struct ModeOperator {
    bool factored = false;
    double h = 0.0;
    // factored form
    std::vector<double> d, e;  // bidiagonal without the boundary row
    double bnd_weight = 0.0;   // W(R) / M_last, multiplies h * lambda
    // potential form
    TridiagSym t;
    double bnd_mass_inv = 0.0;  // R / M_last, multiplies h * lambda
    bool dirichlet = false;

    std::size_t size() const { return factored ? d.size() : t.size(); }
};

inline ModeOperator build_mode(const DiskModel& md, int m, double s, bool dirichlet, bool potential_plus_hB = false) {
    const std::size_t n = md.n;
    const double h = md.h;
    ModeOperator op;
    op.h = h;
    op.dirichlet = dirichlet;
    const std::size_t N = dirichlet ? n - 1 : n;  // unknowns
    if (m >= 0 && !potential_plus_hB) {
        op.factored = true;
        const double pm = 2.0 * m + 1.0;
        auto logW = [&](double rr, double ph) { return pm * std::log(rr) - 2.0 * s * ph / h; };
        std::vector<double> lw(n), lwm(n - 1);
        double top = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            lw[j] = logW(md.r[j], md.phi[j]);
            top = std::max(top, lw[j]);
        }
        for (std::size_t j = 0; j + 1 < n; ++j) lwm[j] = logW(md.rmid[j], md.phimid[j]);
        // drop an inner region carrying a negligible share of the weight
        std::size_t j0 = 0;
        while (j0 + 8 < N && lw[j0] - top < -700.0) ++j0;
        const std::size_t M = N - j0;
        std::vector<double> lmass(M);
        for (std::size_t i = 0; i < M; ++i) {
            const std::size_t j = j0 + i;
            const double width = j + 1 == n ? md.R - (md.R - 0.5 * md.dr) : md.dr;
            lmass[i] = lw[j] + std::log(width * (j + 1 == n ? 1.0 : 1.0));
        }
        // kinetic weights h^2 W(face) / dr between unknowns i and i+1 (and toward the
        // Dirichlet node when present)
        auto lkin = [&](std::size_t j) { return 2.0 * std::log(h) + lwm[j] - std::log(md.dr); };
        op.d.assign(M, 0.0);
        op.e.assign(M > 0 ? M - 1 : 0, 0.0);
        for (std::size_t i = 0; i + 1 < M; ++i) {
            const std::size_t j = j0 + i;
            op.d[i] = -std::exp(0.5 * (lkin(j) - lmass[i]));
            op.e[i] = std::exp(0.5 * (lkin(j) - lmass[i + 1]));
        }
        if (dirichlet) {
            const std::size_t j = j0 + M - 1;  // face toward the boundary node
            op.d[M - 1] = -std::exp(0.5 * (lkin(j) - lmass[M - 1]));
        } else {
            op.bnd_weight = std::exp(lw[n - 1] - lmass[M - 1]);
        }
        return op;
    }
    // potential form
    const double hm = h * static_cast<double>(m);
    std::vector<double> kin(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) kin[j] = h * h * md.rmid[j] / md.dr;
    std::vector<double> diag(N, 0.0), off(N > 0 ? N - 1 : 0, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        const double a = hm / md.r[j] - s * md.dphi[j];
        const double V = a * a + (potential_plus_hB ? 1.0 : -1.0) * s * h * md.B[j];
        double dj = V * md.cell[j];
        if (j > 0) dj += kin[j - 1];
        if (j + 1 < n) dj += kin[j];
        diag[j] = dj;
        if (j + 1 < N) off[j] = -kin[j];
    }
    if (!dirichlet) {
        // boundary term h R c(R) |f(R)|^2 with c = -h m / r + s phi'
        diag[N - 1] += h * md.R * (-hm / md.R + s * md.dphi[n - 1]);
        op.bnd_mass_inv = md.R / md.cell[n - 1];
    }
    op.t.diag.resize(N);
    op.t.off.resize(N > 0 ? N - 1 : 0);
    for (std::size_t j = 0; j < N; ++j) op.t.diag[j] = diag[j] / md.cell[j];
    for (std::size_t j = 0; j + 1 < N; ++j) op.t.off[j] = off[j] / std::sqrt(md.cell[j] * md.cell[j + 1]);
    return op;
}

/// k-th (1-based) eigenvalue of the lambda-dependent part of the form (without -lambda^2).
inline double mode_gamma(const ModeOperator& op, double lambda, int k) {
    if (op.factored) {
        if (op.dirichlet || lambda == 0.0) {
            auto d = op.d;
            if (!op.dirichlet) d.back() = 0.0;
            const auto s = bidiag_smallest_singular(d, op.e, static_cast<std::size_t>(k));
            return s.back() * s.back();
        }
        auto d = op.d;
        d.back() = std::sqrt(op.h * lambda * op.bnd_weight);
        const auto s = bidiag_smallest_singular(d, op.e, static_cast<std::size_t>(k));
        return s.back() * s.back();
    }
    TridiagSym t = op.t;
    if (!op.dirichlet) t.diag.back() += op.h * lambda * op.bnd_mass_inv;
    double scale = 0.0;
    for (double v : t.diag) scale = std::max(scale, std::abs(v));
    return eigenvalue_by_index(t, static_cast<std::size_t>(k - 1), 1e-15 * std::max(1.0, lambda * lambda),
                               1e-15);
}

// g(lambda) = gamma_k(lambda)/lambda - lambda, strictly decreasing with root E_k.
inline double mode_g(const ModeOperator& op, double lambda, int k) {
    return mode_gamma(op, lambda, k) / lambda - lambda;
}

inline double mode_root(const ModeOperator& op, int k, double lo, double hi) {
    double glo = mode_g(op, lo, k);
    for (int i = 0; i < 400 && glo <= 0.0; ++i) {
        hi = lo;
        lo *= 0.5;
        glo = mode_g(op, lo, k);
    }
    if (glo <= 0.0) throw BracketError("mode_E: no lower bracket found");
    double ghi = mode_g(op, hi, k);
    for (int i = 0; i < 60 && ghi >= 0.0; ++i) {
        lo = hi;
        glo = ghi;
        hi *= 2.0;
        ghi = mode_g(op, hi, k);
    }
    if (ghi >= 0.0) throw BracketError("mode_E: no upper bracket found");
    auto g = [&](double x) { return mode_g(op, x, k); };
    // geometric bisection to a factor-two bracket, then regula falsi (g is nearly linear there)
    while (hi > 2.0 * lo) {
        const double mid = std::sqrt(lo * hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (gm > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    return illinois(g, Bracket{lo, hi, glo, ghi}, 1e-13 * lo);
}

inline std::pair<double, double> initial_bracket(FieldSign fs, double h) {
    if (fs == FieldSign::minus) return {0.5 * std::sqrt(h), 1.5 * std::sqrt(h)};
    return {0.25 * std::sqrt(h), 2.0 * std::sqrt(2.0 * h)};
}

}  // namespace detail

/// ell_1..ell_k at lambda for angular mode m.
inline std::vector<double> mode_ell(const DiskModel& md, int m, FieldSign fs, double lambda, int k) {
    if (!(lambda > 0.0)) throw InvalidArgument("mode_ell: lambda must be positive");
    if (k < 1) throw InvalidArgument("mode_ell: k must be >= 1");
    const auto op = detail::build_mode(md, m, detail::sign_of(fs, md.orientation), false);
    std::vector<double> out;
    for (int j = 1; j <= k; ++j) out.push_back(detail::mode_gamma(op, lambda, j) - lambda * lambda);
    return out;
}

inline std::vector<double> mode_ell(const DiskSpec& spec, int m, FieldSign fs, double lambda, int k) {
    return mode_ell(DiskModel(spec), m, fs, lambda, k);
}

/// E_k of mode m: the unique positive root of ell_k.
inline double mode_E(const DiskModel& md, int m, FieldSign fs, int k) {
    if (k < 1) throw InvalidArgument("mode_E: k must be >= 1");
    const auto op = detail::build_mode(md, m, detail::sign_of(fs, md.orientation), false);
    const auto [lo, hi] = detail::initial_bracket(fs, md.h);
    return detail::mode_root(op, k, lo, hi);
}

inline double mode_E(const DiskSpec& spec, int m, FieldSign fs, int k) {
    return mode_E(DiskModel(spec), m, fs, k);
}

namespace detail {

// Ordering key putting the modes most likely to host low eigenvalues first.
inline double mode_key(const DiskModel& md, int m, double s) {
    if (s > 0.0) return m >= 0 ? static_cast<double>(m) : 1e6 - m;
    const double bR = md.dphi.back() / md.R * 2.0;  // equals B(R) for constant fields
    const double t = md.flux / (2.0 * std::numbers::pi * md.h) - 1.3133 * md.R * std::sqrt(std::abs(bR) / md.h);
    return std::abs(m + t);
}

struct BranchResult {
    std::vector<SpectrumEntry> entries;
};

template <class RootFn>
std::vector<SpectrumEntry> branch_merge(const DiskModel& md, int m_lo, int m_hi, double s, int count,
                                        unsigned workers, RootFn&& per_mode) {
    std::vector<int> modes;
    for (int m = m_lo; m <= m_hi; ++m) modes.push_back(m);
    std::stable_sort(modes.begin(), modes.end(),
                     [&](int a, int b) { return mode_key(md, a, s) < mode_key(md, b, s); });
    // seed threshold: first eigenvalue of the `count` most promising modes
    const std::size_t nseed = std::min<std::size_t>(modes.size(), static_cast<std::size_t>(count));
    std::vector<double> seeds(nseed);
    parallel_for(nseed, workers, [&](std::size_t i) { seeds[i] = per_mode(modes[i], 1, INFINITY).front().value; });
    double threshold = INFINITY;
    if (nseed == static_cast<std::size_t>(count))
        threshold = *std::max_element(seeds.begin(), seeds.end()) * (1.0 + 1e-9);
    std::vector<std::vector<SpectrumEntry>> found(modes.size());
    parallel_for(modes.size(), workers, [&](std::size_t i) { found[i] = per_mode(modes[i], count, threshold); });
    std::vector<SpectrumEntry> all;
    for (auto& f : found) all.insert(all.end(), f.begin(), f.end());
    std::sort(all.begin(), all.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.m != b.m) return a.m < b.m;
        return a.k < b.k;
    });
    if (all.size() > static_cast<std::size_t>(count)) all.resize(static_cast<std::size_t>(count));
    return all;
}

}  // namespace detail

/// All E_k < threshold for one mode (at most kmax of them); with an infinite threshold only E_1..E_kmax.
inline std::vector<SpectrumEntry> mode_roots_below(const DiskModel& md, int m, FieldSign fs, int kmax,
                                                   double threshold) {
    const double s = detail::sign_of(fs, md.orientation);
    const auto op = detail::build_mode(md, m, s, false);
    const auto [lo, hi] = detail::initial_bracket(fs, md.h);
    std::vector<SpectrumEntry> out;
    for (int k = 1; k <= kmax; ++k) {
        if (std::isfinite(threshold) && detail::mode_g(op, threshold, k) >= 0.0) break;
        const double top = std::isfinite(threshold) ? threshold : hi;
        const double bottom = std::min(k == 1 ? lo : std::max(lo, out.back().value), 0.5 * top);
        const double e = detail::mode_root(op, k, bottom, top);
        out.push_back({e, m, k});
    }
    return out;
}

/// Signed Dirac spectrum near zero: `count` smallest positive eigenvalues and `count`
/// negative ones (stored as magnitudes), merged over the angular modes.
inline DiracSpectrum dirac_spectrum(const DiskSpec& spec_in, int count, unsigned workers = 1,
                                    int max_extensions = 3) {
    if (count < 1) throw InvalidArgument("dirac_spectrum: count must be >= 1");
    DiskSpec spec = spec_in;
    if (spec.m_hi < spec.m_lo) spec.set_default_range();
    const DiskModel md(spec);
    DiracSpectrum out;
    for (int ext = 0;; ++ext) {
        auto run = [&](FieldSign fs) {
            const double s = detail::sign_of(fs, md.orientation);
            return detail::branch_merge(md, spec.m_lo, spec.m_hi, s, count, workers,
                                        [&](int m, int kmax, double thr) {
                                            return mode_roots_below(md, m, fs, kmax, thr);
                                        });
        };
        const auto pos = run(FieldSign::plus);
        const auto neg = run(FieldSign::minus);
        bool edge = false;
        for (const auto* v : {&pos, &neg})
            for (const auto& e : *v)
                if (e.m == spec.m_lo || e.m == spec.m_hi) edge = true;
        if (!edge) {
            out.pos.clear();
            out.neg.clear();
            out.pos_modes.clear();
            out.neg_modes.clear();
            for (const auto& e : pos) {
                out.pos.push_back(e.value);
                out.pos_modes.emplace_back(e.m, e.k);
            }
            for (const auto& e : neg) {
                out.neg.push_back(e.value);
                out.neg_modes.emplace_back(e.m, e.k);
            }
            out.m_lo = spec.m_lo;
            out.m_hi = spec.m_hi;
            return out;
        }
        if (ext == max_extensions) {
            const int w = 2 * (spec.m_hi - spec.m_lo);
            throw ConvergenceError("dirac_spectrum: edge modes still contribute; try m range [" +
                                   std::to_string(spec.m_lo - w / 2) + ", " + std::to_string(spec.m_hi + w / 2) +
                                   "]");
        }
        const int w = spec.m_hi - spec.m_lo;
        spec.m_lo -= w / 2 + 1;
        spec.m_hi += w / 2 + 1;
    }
}

/// Hardy-ratio upper bounds nu_1(h)..nu_kmax(h): h R^{2n+1} / int_0^R r^{2n+1} e^{-2 phi/h} dr,
/// sorted over n >= 0. Evaluated for |B|.
inline std::vector<double> hardy_nu_k(const DiskSpec& spec, int kmax, std::size_t quad_nodes = 20001) {
    spec.validate();
    if (kmax < 1) throw InvalidArgument("hardy_nu_k: kmax must be >= 1");
    if (quad_nodes % 2 == 0) ++quad_nodes;
    const double R = spec.field.R, h = spec.h;
    // the gauge on a grid including r = 0 (phi(0) = phi_min)
    const Grid1D g(0.0, R, quad_nodes);
    const Grid1D inner(g.step(), R, quad_nodes - 1);
    const auto gauge = radial_phi(spec.field, inner);
    std::vector<double> phi(quad_nodes);
    phi[0] = gauge.phi_min;
    for (std::size_t i = 1; i < quad_nodes; ++i) phi[i] = gauge.phi[i - 1];
    const double pmin = gauge.phi_min;
    std::vector<double> ratios;
    const int nmax = kmax + 40;
    std::vector<double> f(quad_nodes);
    for (int p = 0; p <= nmax; ++p) {
        for (std::size_t i = 0; i < quad_nodes; ++i) {
            const double r = g.at(i);
            const double lr = r > 0.0 ? (2.0 * p + 1.0) * std::log(r / R) : -INFINITY;
            f[i] = std::exp(lr - 2.0 * (phi[i] - pmin) / h);
        }
        const double I = integrate(f, g);
        // nu = h R^{2p+1} / (R^{2p+1} e^{-2 pmin / h} I)
        ratios.push_back(h * std::exp(2.0 * pmin / h) / I);
    }
    std::sort(ratios.begin(), ratios.end());
    ratios.resize(static_cast<std::size_t>(kmax));
    return ratios;
}

enum class ZigzagBranch { plus, minus };

/// Radial Dirichlet spectra of |p - A|^2 +- hB, merged over modes and sorted.
inline std::vector<double> zigzag_spectrum(const DiskSpec& spec_in, ZigzagBranch branch, int count) {
    if (count < 1) throw InvalidArgument("zigzag_spectrum: count must be >= 1");
    DiskSpec spec = spec_in;
    if (spec.m_hi < spec.m_lo) spec.set_default_range();
    const DiskModel md(spec);
    const double s = static_cast<double>(md.orientation);
    std::vector<SpectrumEntry> all;
    double threshold = INFINITY;
    auto kth = [&](int m, int k) {
        const auto op = detail::build_mode(md, m, s, true, branch == ZigzagBranch::plus);
        if (op.factored) {
            const auto sv = bidiag_smallest_singular(op.d, op.e, static_cast<std::size_t>(k));
            return sv.back() * sv.back();
        }
        return eigenvalue_by_index(op.t, static_cast<std::size_t>(k - 1), 1e-14, 1e-14);
    };
    std::vector<int> modes;
    for (int m = spec.m_lo; m <= spec.m_hi; ++m) modes.push_back(m);
    std::stable_sort(modes.begin(), modes.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
    for (int m : modes) {
        for (int k = 1; k <= count; ++k) {
            const double v = kth(m, k);
            if (v >= threshold) break;
            all.push_back({v, m, k});
            std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
            if (all.size() > static_cast<std::size_t>(count)) all.resize(static_cast<std::size_t>(count));
            if (all.size() == static_cast<std::size_t>(count)) threshold = all.back().value;
        }
    }
    std::vector<double> out;
    for (const auto& e : all) out.push_back(e.value);
    return out;
}

struct RadialDiracResult {
    std::vector<double> values;  // ascending signed eigenvalues
    std::vector<std::vector<double>> f;  // upper component on the f-nodes (if requested)
    std::vector<std::vector<double>> g;  // lower component (g = -i ghat) on the g-nodes
    std::vector<double> f_nodes, g_nodes;
    std::vector<std::string> warnings;
};

/// First-order radial Dirac system of mode m on a staggered grid: f on r_j = j dr, ghat on
/// (j + 1/2) dr, exponentially fitted differences, MIT coupling ghat(R) = -f(R) in weak form.
/// Returns up to `count` eigenvalues on each side of zero.
inline RadialDiracResult dirac_radial_direct(const DiskSpec& spec, int m, int count, bool vectors = false) {
    spec.validate();
    if (count < 1) throw InvalidArgument("dirac_radial_direct: count must be >= 1");
    const double R = spec.field.R, h = spec.h;
    const std::size_t N = spec.n - 1;
    const double dr = R / static_cast<double>(N);
    const double s = static_cast<double>(spec.orientation);
    // gauge on the staggered fine grid dr/2, dr, 3dr/2, ..., R
    const Grid1D fine(0.5 * dr, R, 2 * N);
    const auto gauge = radial_phi(spec.field, fine);
    auto phi_at_half = [&](std::size_t twice) {  // r = twice * dr / 2, twice >= 1
        return gauge.phi[twice - 1];
    };
    const double md = static_cast<double>(m);
    auto logpsi = [&](std::size_t twice) {
        const double r = 0.5 * dr * static_cast<double>(twice);
        return md * std::log(r) - s * phi_at_half(twice) / h;
    };
    const double logpsi0 = -s * gauge.phi_min / h;  // m = 0 at r = 0
    // unknown layout
    const std::size_t jf0 = m == 0 ? 0 : 1;   // first f node
    const std::size_t jg0 = m >= 1 ? 1 : 0;   // first g cell
    std::vector<double> mf, mg;
    for (std::size_t j = jf0; j <= N; ++j) {
        const double r = dr * static_cast<double>(j);
        double cellw = r * dr;
        if (j == 0) cellw = dr * dr / 8.0;
        if (j == N) cellw = 0.5 * (R * R - (R - 0.5 * dr) * (R - 0.5 * dr));
        mf.push_back(cellw);
    }
    for (std::size_t j = jg0; j < N; ++j) mg.push_back((static_cast<double>(j) + 0.5) * dr * dr);
    // interleaved order
    struct Node {
        bool is_f;
        std::size_t j;
    };
    std::vector<Node> order;
    {
        std::size_t jf = jf0, jg = jg0;
        bool take_f = jf0 <= jg0;
        while (jf <= N || jg < N) {
            if (take_f && jf <= N) order.push_back({true, jf++});
            else if (!take_f && jg < N) order.push_back({false, jg++});
            take_f = !take_f;
        }
    }
    const std::size_t S = order.size();
    TridiagSym t;
    t.diag.assign(S, 0.0);
    t.off.assign(S - 1, 0.0);
    auto lpsi_f = [&](std::size_t j) { return j == 0 ? logpsi0 : logpsi(2 * j); };
    for (std::size_t i = 0; i + 1 < S; ++i) {
        const Node a = order[i], b = order[i + 1];
        const Node f = a.is_f ? a : b;
        const Node g = a.is_f ? b : a;
        if (f.is_f == g.is_f) throw ConvergenceError("dirac_radial_direct: layout error", S);
        // L_{g, f}: + (h/dr) psi_g/psi_f if f is the right neighbour, - if left
        const double lg = logpsi(2 * g.j + 1);
        const double coef = (h / dr) * std::exp(lg - lpsi_f(f.j));
        const double L = f.j == g.j + 1 ? coef : -coef;
        const double wf = mf[f.j - jf0], wg = mg[g.j - jg0];
        t.off[i] = L * std::sqrt(wg / wf);
    }
    t.diag[S - 1] = h * R / mf.back();
    RadialDiracResult out;
    const std::size_t nneg = sturm_count(t, 0.0);
    std::vector<std::size_t> idx;
    for (int c = count; c >= 1; --c)
        if (nneg >= static_cast<std::size_t>(c)) idx.push_back(nneg - static_cast<std::size_t>(c));
    for (int c = 0; c < count; ++c)
        if (nneg + static_cast<std::size_t>(c) < S) idx.push_back(nneg + static_cast<std::size_t>(c));
    std::vector<double> vals;
    for (std::size_t j : idx) vals.push_back(eigenvalue_by_index(t, j, 1e-15, 1e-14));
    for (std::size_t j = jf0; j <= N; ++j) out.f_nodes.push_back(dr * static_cast<double>(j));
    for (std::size_t j = jg0; j < N; ++j) out.g_nodes.push_back(dr * (static_cast<double>(j) + 0.5));
    for (double v : vals) {
        const auto y = inverse_iteration(t, v);
        std::vector<double> fv(mf.size()), gv(mg.size());
        for (std::size_t i = 0; i < S; ++i) {
            if (order[i].is_f)
                fv[order[i].j - jf0] = y[i] / std::sqrt(mf[order[i].j - jf0]);
            else
                gv[order[i].j - jg0] = y[i] / std::sqrt(mg[order[i].j - jg0]);
        }
        // doubler signature: sign alternation of f across most of its support
        double fmax = 0.0;
        for (double x : fv) fmax = std::max(fmax, std::abs(x));
        std::size_t flips = 0, support = 0;
        for (std::size_t i = 0; i + 1 < fv.size(); ++i) {
            if (std::abs(fv[i]) < 1e-3 * fmax) continue;
            ++support;
            if (fv[i] * fv[i + 1] < 0.0) ++flips;
        }
        if (support > 16 && flips > support / 4) {
            out.warnings.push_back("filtered oscillating eigenvector at " + std::to_string(v));
            continue;
        }
        out.values.push_back(v);
        if (vectors) {
            out.f.push_back(std::move(fv));
            out.g.push_back(std::move(gv));
        }
    }
    return out;
}

}  // namespace diracbag
