// Command-line front end: dispersion curves, the half-plane constant, disk spectra and
// their asymptotic comparisons, semiclassical constants and the boundary operator.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diracbag/constants.hpp"
#include "diracbag/disk.hpp"
#include "diracbag/dispersion.hpp"
#include "diracbag/effective.hpp"
#include "diracbag/fiber.hpp"
#include "diracbag/parallel.hpp"
#include "diracbag/report.hpp"

using namespace diracbag;
using report::Cell;
using report::Table;

namespace {

constexpr int exit_config = 2;
constexpr int exit_convergence = 3;
constexpr int exit_check = 4;

struct CheckFailed : Error {
    using Error::Error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw InvalidArgument("");
        return v;
    } catch (...) {
        throw InvalidArgument("not a number: '" + s + "'");
    }
}

int to_int(const std::string& s) {
    const double v = to_double(s);
    if (v != std::floor(v)) throw InvalidArgument("not an integer: '" + s + "'");
    return static_cast<int>(v);
}

/// "1..4", "3" or "1,2,5".
std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split(s, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(part));
        } else {
            const int a = to_int(part.substr(0, dots)), b = to_int(part.substr(dots + 2));
            if (b < a) throw InvalidArgument("empty range '" + part + "'");
            for (int i = a; i <= b; ++i) out.push_back(i);
        }
    }
    if (out.empty()) throw InvalidArgument("empty integer list");
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_double(part));
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

/// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_sweep(const std::string& s) {
    const auto p = split(s, ':');
    if (p.size() == 1) return {to_double(p[0])};
    if (p.size() != 3) throw InvalidArgument("sweep must be lo:hi:step, got '" + s + "'");
    const double lo = to_double(p[0]), hi = to_double(p[1]), step = to_double(p[2]);
    if (!(step > 0.0) || hi < lo) throw InvalidArgument("bad sweep '" + s + "'");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    return out;
}

RadialField parse_field(const std::string& s, double R) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const auto args = colon == std::string::npos ? std::vector<double>{} : parse_doubles(s.substr(colon + 1));
    RadialField f;
    if (kind == "const" && args.size() == 1) f = RadialField::constant(args[0], R);
    else if (kind == "quad" && args.size() == 2) f = RadialField::quadratic(args[0], args[1], R);
    else if (kind == "power" && args.size() == 2) f = RadialField::power(args[0], args[1], R);
    else throw InvalidArgument("field must be const:b, quad:c0,c2 or power:c,p; got '" + s + "'");
    f.label = s;
    return f;
}

std::optional<double> constant_value(const std::string& s) {
    if (s.rfind("const:", 0) != 0) return std::nullopt;
    return to_double(s.substr(6));
}

/// Options of a subcommand with their effective values, in declaration order.
std::vector<std::pair<std::string, std::string>> collect_config(const CLI::App& sub) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("command", sub.get_name());
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "out" || name == "workers" || name == "config") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
            if (value.empty()) value = "true";
        } else {
            value = opt->get_default_str();
            if (value.empty() && opt->get_expected_min() == 0) value = "false";
        }
        out.emplace_back(name, value);
    }
    return out;
}

struct Output {
    std::string path;
    std::string format = "csv";

    void write(const Table& t) const {
        const auto text = report::render(t, format == "json" ? report::Format::json : report::Format::csv);
        if (path.empty() || path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write '" + path + "'");
        f << text;
    }
};

FiberGrid fiber_grid(std::size_t n, double length) {
    FiberGrid g;
    g.n = n;
    g.min_length = length;
    return g;
}

// ---------------------------------------------------------------- dispersion

struct DispersionOpts {
    std::string branch = "nu-minus";
    double alpha = 2.0;
    std::string k = "1..4";
    std::string xi = "-2:8:0.1";
    std::size_t n = 4001;
    double length = 20.0;
};

Table run_dispersion(const DispersionOpts& o, unsigned workers) {
    const auto ks = parse_ints(o.k);
    const auto xis = parse_sweep(o.xi);
    const FiberGrid g = fiber_grid(o.n, o.length);
    const int kmax = *std::max_element(ks.begin(), ks.end());
    if (ks.front() < 1) throw InvalidArgument("k must be >= 1");
    Table t;
    t.columns.push_back("xi");
    std::vector<std::vector<Cell>> rows(xis.size());
    if (o.branch == "nu-minus" || o.branch == "nu-plus") {
        const Sign s = o.branch == "nu-minus" ? Sign::minus : Sign::plus;
        for (int k : ks) t.columns.push_back(std::string(o.branch == "nu-minus" ? "nu_minus_" : "nu_plus_") + std::to_string(k));
        parallel_for(xis.size(), workers, [&](std::size_t i) {
            try {
                const auto fe = fiber_eigs(FiberSpec::half_line(s, o.alpha, xis[i], g), kmax, false);
                std::vector<Cell> row{xis[i]};
                for (int k : ks) row.emplace_back(fe.values[static_cast<std::size_t>(k - 1)]);
                rows[i] = std::move(row);
            } catch (const std::exception& e) {
                throw ConvergenceError("at xi = " + report::format_double(xis[i]) + ": " + e.what());
            }
        });
    } else if (o.branch == "theta") {
        for (int k : ks) {
            t.columns.push_back("theta_minus_" + std::to_string(k));
            t.columns.push_back("theta_plus_" + std::to_string(k));
            t.columns.push_back("theta_plus_resolved_" + std::to_string(k));
        }
        parallel_for(xis.size(), workers, [&](std::size_t i) {
            try {
                std::vector<Cell> row{xis[i]};
                for (int k : ks) {
                    const auto m = theta(Sign::minus, k, xis[i], g);
                    const auto p = theta(Sign::plus, k, xis[i], g);
                    row.emplace_back(m.theta);
                    row.emplace_back(p.theta);
                    row.emplace_back(p.resolved);
                }
                rows[i] = std::move(row);
            } catch (const std::exception& e) {
                throw ConvergenceError("at xi = " + report::format_double(xis[i]) + ": " + e.what());
            }
        });
    } else {
        throw InvalidArgument("branch must be nu-minus, nu-plus or theta");
    }
    for (auto& r : rows) t.add_row(std::move(r));
    return t;
}

// ---------------------------------------------------------------- a0, momenta

struct A0Opts {
    std::size_t n = 4001;
    double length = 20.0;
    bool refine = false;
};

Table run_a0(const A0Opts& o) {
    const auto res = find_a0(fiber_grid(o.n, o.length));
    const auto cx = cxi_pairings(res);
    Table t;
    t.columns = {"a0", "u0sq", "c0", "d2xi_nu", "residual", "grid_n", "grid_length", "cxi_convention", "cxi_pair0"};
    std::vector<Cell> row{res.a0,
                          res.u0sq,
                          res.c0,
                          res.d2xi_nu,
                          res.residual,
                          static_cast<long long>(o.n),
                          o.length,
                          std::string(to_string(cx.convention)),
                          cx.pair0};
    if (o.refine) {
        const auto fine = find_a0(fiber_grid(2 * o.n - 1, o.length));
        t.columns.insert(t.columns.end(), {"a0_fine", "a0_richardson"});
        row.emplace_back(fine.a0);
        row.emplace_back(fine.a0 + (fine.a0 - res.a0) / 3.0);
    }
    t.add_row(std::move(row));
    return t;
}

struct MomentaOpts {
    std::optional<double> alpha, xi;
    std::size_t n = 4001;
};

Table run_momenta(const MomentaOpts& o) {
    const FiberGrid g = fiber_grid(o.n, 20.0);
    double alpha = 0.0, xi = 0.0;
    if (o.alpha && o.xi) {
        alpha = *o.alpha;
        xi = *o.xi;
    } else {
        const auto res = find_a0(g);
        alpha = o.alpha.value_or(res.a0);
        xi = o.xi.value_or(res.a0);
    }
    const auto fe = fiber_eigs(FiberSpec::half_line(Sign::minus, alpha, xi, g), 1);
    const auto num = momenta(alpha, xi, g);
    const auto cf = momenta_closed_form(alpha, xi, fe.values[0], fe.u0 * fe.u0);
    Table t;
    t.columns = {"alpha", "xi", "j", "numeric", "closed_form", "rel_dev"};
    for (int j = 0; j <= 4; ++j) {
        const double a = num.M[static_cast<std::size_t>(j)], b = cf.M[static_cast<std::size_t>(j)];
        t.add_row({alpha, xi, static_cast<long long>(j), a, b, std::abs(a - b) / std::max(std::abs(b), 1e-300)});
    }
    return t;
}

// ---------------------------------------------------------------- disk, compare

struct DiskOpts {
    std::string field = "const:1";
    double R = 1.0;
    std::string h = "0.2,0.1,0.05";
    int neg = 4;
    int pos = 2;
    std::size_t n = 4001;
    std::string m_range;
    int orientation = 1;
    bool zigzag = false;
    bool oracle = false;
    bool check = false;
};

Table run_disk(const DiskOpts& o, unsigned workers) {
    const auto hs = parse_doubles(o.h);
    const RadialField field = parse_field(o.field, o.R);
    if (o.neg < 1 || o.pos < 1) throw InvalidArgument("--neg and --pos must be >= 1");
    const auto a0r = find_a0();
    const auto bconst = constant_value(o.field);
    Table t;
    t.columns = {"h", "quantity", "index", "mode", "direct", "prediction", "abs_dev", "rel_dev", "formula", "converged",
                 "check"};
    auto row = [&](double h, const std::string& q, int idx, long long mode, double direct, double pred,
                   const std::string& formula, bool converged, const std::string& check) {
        const double ad = std::isfinite(pred) ? std::abs(direct - pred) : NAN;
        const double rd = std::isfinite(pred) && pred != 0.0 ? ad / std::abs(pred) : NAN;
        t.add_row({h, q, static_cast<long long>(idx), mode, direct, pred, ad, rd, formula, converged, check});
    };
    for (double h : hs) {
        try {
            DiskSpec spec = DiskSpec::make(field, h, o.n);
            spec.orientation = o.orientation;
            if (!o.m_range.empty()) {
                const auto p = split(o.m_range, ':');
                if (p.size() != 2) throw InvalidArgument("--m-range must be lo:hi");
                spec.m_lo = to_int(p[0]);
                spec.m_hi = to_int(p[1]);
            }
            const int count = std::max(o.neg, o.pos);
            const auto sp = dirac_spectrum(spec, count, workers);
            const DiskModel md(spec);
            const double phi_min = md.phi_min;
            const double b_center = field.at(0.0);
            // the small-eigenvalue side follows the orientation
            const auto& small = o.orientation > 0 ? sp.pos : sp.neg;
            const auto& small_modes = o.orientation > 0 ? sp.pos_modes : sp.neg_modes;
            const auto& large = o.orientation > 0 ? sp.neg : sp.pos;
            const auto& large_modes = o.orientation > 0 ? sp.neg_modes : sp.pos_modes;
            const std::string sname = o.orientation > 0 ? "lambda_plus" : "lambda_minus";
            const std::string lname = o.orientation > 0 ? "lambda_minus" : "lambda_plus";
            // boundary gap branch
            std::optional<EffSpectrum> eff;
            if (bconst && *bconst == 1.0)
                eff = qeff_disk(flux_th(std::numbers::pi * o.R * o.R, 2.0 * std::numbers::pi * o.R, h, a0r.a0), o.R,
                                o.neg);
            for (int n = 1; n <= o.neg; ++n) {
                const double v = large[static_cast<std::size_t>(n - 1)];
                double pred = NAN;
                std::string formula = "none";
                if (eff) {
                    pred = lambda_minus_prediction(n, h, a0r, *eff);
                    formula = "a0*sqrt(h)+c0*h^1.5*qeff_n";
                } else if (bconst) {
                    pred = a0r.a0 * std::sqrt(*bconst * h);
                    formula = "a0*sqrt(b*h)";
                }
                row(h, lname, n, large_modes[static_cast<std::size_t>(n - 1)].first, v, pred, formula, true, "");
            }
            {
                const double b = bconst.value_or(field.boundary());
                row(h, "e1", 1, large_modes[0].first, large[0] / std::sqrt(h), a0r.a0 * std::sqrt(b), "a0*sqrt(B(R))",
                    true, "");
            }
            // exponentially small branch and its bounds
            const auto nu = hardy_nu_k(spec, o.pos);
            for (int k = 1; k <= o.pos; ++k) {
                const double v = small[static_cast<std::size_t>(k - 1)];
                CkResult ck;
                ck.k = k;
                ck.Ck = disk_ck(k, b_center, o.R);
                row(h, sname, k, small_modes[static_cast<std::size_t>(k - 1)].first, v,
                    lambda_plus_prediction(ck, phi_min, h), "C_k*h^(1-k)*exp(2*phi_min/h)", true, "");
                row(h, "hardy_bound", k, small_modes[static_cast<std::size_t>(k - 1)].first, v,
                    nu[static_cast<std::size_t>(k - 1)], "nu_k", true,
                    v <= nu[static_cast<std::size_t>(k - 1)] + 1e-12 ? "pass" : "fail");
            }
            const double gap = std::min(sp.pos.front(), sp.neg.front());
            row(h, "min_abs_eigenvalue", 1, 0, gap, 1e-6, "threshold", true, gap > 1e-6 ? "pass" : "fail");
            if (o.zigzag) {
                const double b0 = bconst.value_or(std::min(field.at(0.0), field.boundary()));
                const auto zp = zigzag_spectrum(spec, ZigzagBranch::plus, 1);
                const auto zm = zigzag_spectrum(spec, ZigzagBranch::minus, 1);
                row(h, "zigzag_plus", 1, 0, zp[0], 2.0 * b0 * h, "2*b0*h", true,
                    zp[0] >= 2.0 * b0 * h * (1.0 - 1e-3) ? "pass" : "fail");
                row(h, "zigzag_minus", 1, 0, zm[0], std::exp(2.0 * phi_min / h), "exp(2*phi_min/h)", true, "");
            }
            if (o.oracle) {
                auto compare = [&](const std::string& q, double value, int m, int k, bool positive) {
                    const int mode = positive ? m : -(m + 1);
                    const auto d = dirac_radial_direct(spec, mode, k);
                    double ref = NAN;
                    int seen = 0;
                    if (positive) {
                        for (double x : d.values)
                            if (x > 0.0 && ++seen == k) ref = x;
                    } else {
                        for (auto it = d.values.rbegin(); it != d.values.rend(); ++it)
                            if (*it < 0.0 && ++seen == k) ref = -*it;
                    }
                    const bool ok = std::isfinite(ref) && std::abs(value - ref) <= 1e-4 * std::abs(ref);
                    row(h, q, k, m, value, ref, "staggered_radial_oracle", d.warnings.empty(), ok ? "pass" : "fail");
                };
                for (std::size_t i = 0; i < sp.pos.size(); ++i)
                    compare("oracle_plus", sp.pos[i], sp.pos_modes[i].first, sp.pos_modes[i].second, true);
                for (std::size_t i = 0; i < sp.neg.size(); ++i)
                    compare("oracle_minus", sp.neg[i], sp.neg_modes[i].first, sp.neg_modes[i].second, false);
            }
        } catch (const InvalidArgument&) {
            throw;
        } catch (const std::exception& e) {
            // row-level isolation: record the failure and continue with the next h
            t.add_row({h, std::string("error"), 0LL, 0LL, NAN, NAN, NAN, NAN, std::string(e.what()), false,
                       std::string("fail")});
        }
    }
    return t;
}

// ---------------------------------------------------------------- constants

struct ConstantsOpts {
    bool disk = false;
    double B = 1.0;
    double R = 1.0;
    std::string k = "1..4";
    std::string ellipse;
    std::string zmin = "0,0";
    std::string hess;
    std::size_t samples = 512;
    int basis = 40;
};

Table run_constants(const ConstantsOpts& o) {
    const auto ks = parse_ints(o.k);
    const auto zp = parse_doubles(o.zmin);
    if (zp.size() != 2) throw InvalidArgument("--zmin must be x,y");
    const cplx z0(zp[0], zp[1]);
    BoundaryCurve curve;
    BargmannWeight w = BargmannWeight::isotropic(o.B);
    if (!o.hess.empty()) {
        const auto hv = parse_doubles(o.hess);
        if (hv.size() != 3) throw InvalidArgument("--hess must be h11,h12,h22");
        w = BargmannWeight{Sym2{{{hv[0], hv[1]}, {hv[1], hv[2]}}}};
    }
    if (o.disk || o.ellipse.empty()) {
        curve = BoundaryCurve::circle(o.R, {0.0, 0.0}, z0, o.samples);
    } else {
        const auto ab = parse_doubles(o.ellipse);
        if (ab.size() != 2) throw InvalidArgument("--ellipse must be a,b");
        curve = BoundaryCurve::ellipse(ab[0], ab[1], z0, o.samples);
    }
    const bool closed = (o.disk || o.ellipse.empty()) && o.hess.empty() && z0 == cplx(0.0, 0.0);
    Table t;
    t.columns = {"k", "dist_H", "dist_B", "Ck", "closed_form", "rel_dev", "hardy_truncation_delta"};
    for (int k : ks) {
        const auto hd = hardy_distance(k, curve, o.basis);
        const double dB = bargmann_distance(k, w);
        const double ck = (hd.value / dB) * (hd.value / dB);
        const double cf = closed ? disk_ck(k, o.B, o.R) : NAN;
        t.add_row({static_cast<long long>(k), hd.value, dB, ck, cf, closed ? std::abs(ck - cf) / cf : NAN, hd.delta});
    }
    return t;
}

// ---------------------------------------------------------------- effective

struct EffectiveOpts {
    bool disk = false;
    double R = 1.0;
    std::string h = "0.1";
    std::optional<double> a0;
    int count = 5;
    std::string kappa_file;
    std::optional<double> L, area, t_h;
    int cutoff = 0;
};

std::vector<double> read_samples(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot read '" + path + "'");
    std::vector<double> out;
    std::string line;
    while (std::getline(f, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto cell = split(line.substr(first), ',').front();
        try {
            out.push_back(to_double(cell));
        } catch (const InvalidArgument&) {
            if (out.empty()) continue;  // header row
            throw;
        }
    }
    return out;
}

Table run_effective(const EffectiveOpts& o) {
    const double a0 = o.a0 ? *o.a0 : find_a0().a0;
    Table t;
    t.columns = {"h", "t_h", "n", "m", "value", "check_value", "abs_dev", "note"};
    for (double h : parse_doubles(o.h)) {
        if (o.disk || o.kappa_file.empty()) {
            EffSpec es = EffSpec::disk(o.R, h, a0);
            if (o.t_h) es.t_h = *o.t_h;
            es.cutoff = o.cutoff;
            const auto d = qeff_disk(es.t_h, o.R, o.count);
            const auto g = qeff_general(es, o.count);
            for (int n = 0; n < o.count; ++n) {
                const auto i = static_cast<std::size_t>(n);
                t.add_row({h, es.t_h, static_cast<long long>(n + 1), static_cast<long long>(d.m_sequence[i]),
                           d.values[i], g.values[i], std::abs(d.values[i] - g.values[i]),
                           std::string("closed form vs Fourier-Galerkin")});
            }
        } else {
            if (!o.L) throw InvalidArgument("--L is required with --kappa");
            EffSpec es;
            es.L = *o.L;
            es.h = h;
            es.a0 = a0;
            es.kappa = Curvature::sampled(read_samples(o.kappa_file));
            es.cutoff = o.cutoff;
            if (o.t_h) es.t_h = *o.t_h;
            else if (o.area) es.t_h = flux_th(*o.area, es.L, h, a0);
            else throw InvalidArgument("--area or --t-h is required with --kappa");
            const auto g = qeff_general(es, o.count);
            EffSpec shifted = es;
            shifted.t_h += 2.0 * std::numbers::pi / es.L;
            const auto gs = qeff_general(shifted, o.count);
            double worst = 0.0;
            for (int n = 0; n < o.count; ++n) {
                const auto i = static_cast<std::size_t>(n);
                worst = std::max(worst, std::abs(g.values[i] - gs.values[i]));
                t.add_row({h, es.t_h, static_cast<long long>(n + 1), 0LL, g.values[i], gs.values[i],
                           std::abs(g.values[i] - gs.values[i]), std::string("t_h vs t_h + 2pi/L")});
            }
            t.add_row({h, es.t_h, 0LL, 0LL, worst, 1e-10, worst, std::string(worst <= 1e-10 ? "gauge_check pass" : "gauge_check fail")});
        }
    }
    return t;
}

// ---------------------------------------------------------------- check

Table run_check(unsigned workers) {
    Table t;
    t.columns = {"check", "value", "target", "pass"};
    auto add = [&](const std::string& name, double v, double target, bool ok) {
        t.add_row({name, v, target, ok});
        std::cerr << (ok ? "PASS " : "FAIL ") << name << ": " << report::format_double(v) << "\n";
    };
    const auto a0r = find_a0();
    add("a0 within 2e-3 of 1.31236", a0r.a0, 1.31236, std::abs(a0r.a0 - 1.31236) <= 2e-3);
    for (int k = 1; k <= 3; ++k) {
        const auto m = fiber_eigs(FiberSpec::whole_line(Sign::minus, 0.0), k, false).values.back();
        add("whole-line minus level " + std::to_string(k), m, 2.0 * k, std::abs(m - 2.0 * k) <= 1e-4);
    }
    auto spec = DiskSpec::make(RadialField::constant(1.0), 0.1, 2001);
    const auto sp = dirac_spectrum(spec, 3, workers);
    const auto nu = hardy_nu_k(spec, 3);
    for (int k = 0; k < 3; ++k)
        add("hardy bound k=" + std::to_string(k + 1), sp.pos[static_cast<std::size_t>(k)],
            nu[static_cast<std::size_t>(k)], sp.pos[static_cast<std::size_t>(k)] <= nu[static_cast<std::size_t>(k)] + 1e-12);
    add("no zero modes", std::min(sp.pos[0], sp.neg[0]), 1e-6, std::min(sp.pos[0], sp.neg[0]) > 1e-6);
    for (int k = 1; k <= 4; ++k) {
        const auto r = ck_constant(k, BargmannWeight::isotropic(1.0), BoundaryCurve::circle(1.0));
        add("disk C_" + std::to_string(k), r.Ck, disk_ck(k, 1.0, 1.0), std::abs(r.Ck - disk_ck(k, 1.0, 1.0)) <= 1e-6 * disk_ck(k, 1.0, 1.0));
    }
    EffSpec es = EffSpec::disk(1.0, 0.1, a0r.a0);
    es.kappa = Curvature::callable([](double s) { return 1.0 + 0.2 * std::cos(2.0 * s); });
    const auto g1 = qeff_general(es, 5);
    es.t_h += 1.0;
    const auto g2 = qeff_general(es, 5);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(g1.values[static_cast<std::size_t>(i)] - g2.values[static_cast<std::size_t>(i)]));
    add("gauge periodicity", worst, 1e-10, worst <= 1e-10);
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral computations for magnetic Dirac operators with infinite-mass boundary conditions"};
    app.set_help_flag("--help", "print help and exit");
    app.fallthrough();
    app.set_config("--config", "", "key=value config file; sections name subcommands; flags override");
    app.require_subcommand(1);
    Output out;
    unsigned workers = workers_from_env();
    app.add_option("-o,--out", out.path, "output file (default stdout)");
    app.add_option("-f,--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("-j,--workers", workers, "worker threads (default DIRACBAG_WORKERS or 1)")->check(CLI::PositiveNumber);

    DispersionOpts dopt;
    auto* dsp = app.add_subcommand("dispersion", "fiber eigenvalue curves nu_k(alpha, xi) or dispersion curves theta_k(xi)");
    dsp->add_option("--branch", dopt.branch, "nu-minus, nu-plus or theta")->capture_default_str();
    dsp->add_option("--alpha", dopt.alpha, "Robin parameter")->capture_default_str();
    dsp->add_option("--k", dopt.k, "levels, e.g. 1..4")->capture_default_str();
    dsp->add_option("--xi", dopt.xi, "lo:hi:step")->capture_default_str();
    dsp->add_option("--n", dopt.n, "fiber grid nodes")->capture_default_str();
    dsp->add_option("--length", dopt.length, "minimal fiber truncation length")->capture_default_str();

    A0Opts aopt;
    auto* a0c = app.add_subcommand("a0", "half-plane gap constant and its companions");
    a0c->add_option("--n", aopt.n, "fiber grid nodes")->capture_default_str();
    a0c->add_option("--length", aopt.length, "fiber truncation length")->capture_default_str();
    a0c->add_flag("--refine", aopt.refine, "repeat on a doubled grid and extrapolate");

    MomentaOpts mopt;
    auto* mom = app.add_subcommand("momenta", "moments of the ground fiber state against closed forms");
    mom->add_option("--alpha", mopt.alpha, "Robin parameter (default a0)");
    mom->add_option("--xi", mopt.xi, "fiber parameter (default a0)");
    mom->add_option("--n", mopt.n, "fiber grid nodes")->capture_default_str();

    DiskOpts kopt;
    auto add_disk_options = [&](CLI::App* c) {
        c->add_option("--B", kopt.field, "const:b, quad:c0,c2 or power:c,p")->capture_default_str();
        c->add_option("--R", kopt.R, "disk radius")->capture_default_str();
        c->add_option("--h", kopt.h, "comma-separated h values")->capture_default_str();
        c->add_option("--neg", kopt.neg, "negative eigenvalues per h")->capture_default_str();
        c->add_option("--pos", kopt.pos, "positive eigenvalues per h")->capture_default_str();
        c->add_option("--n", kopt.n, "radial nodes")->capture_default_str();
        c->add_option("--m-range", kopt.m_range, "angular modes lo:hi (default +-ceil(3R^2/h))");
        c->add_option("--orientation", kopt.orientation, "+1 or -1 (flip the field)")->capture_default_str();
        c->add_flag("--check", kopt.check, "exit with status 4 if any check column fails");
    };
    auto* dsk = app.add_subcommand("disk", "disk spectra with comparison report");
    add_disk_options(dsk);
    dsk->add_flag("--zigzag", kopt.zigzag, "add zigzag bound rows");
    dsk->add_flag("--oracle", kopt.oracle, "add staggered radial oracle rows");
    auto* cmp = app.add_subcommand("compare", "disk spectra against every prediction, oracle and bound");
    add_disk_options(cmp);

    ConstantsOpts copt;
    auto* cst = app.add_subcommand("constants", "Hardy and Bargmann distances and the constants C_k");
    cst->add_flag("--disk", copt.disk, "disk domain (default)");
    cst->add_option("--B", copt.B, "field at the minimum (isotropic weight)")->capture_default_str();
    cst->add_option("--R", copt.R, "disk radius")->capture_default_str();
    cst->add_option("--k", copt.k, "k values, e.g. 1..4")->capture_default_str();
    cst->add_option("--ellipse", copt.ellipse, "ellipse semi-axes a,b instead of a disk");
    cst->add_option("--zmin", copt.zmin, "minimum location x,y")->capture_default_str();
    cst->add_option("--hess", copt.hess, "Hessian h11,h12,h22 instead of the isotropic weight");
    cst->add_option("--samples", copt.samples, "boundary samples")->capture_default_str();
    cst->add_option("--basis", copt.basis, "Hardy basis size")->capture_default_str();

    EffectiveOpts eopt;
    auto* eff = app.add_subcommand("effective", "flux constant and boundary operator spectra");
    eff->add_flag("--disk", eopt.disk, "disk closed form with a Fourier-Galerkin cross-check (default)");
    eff->add_option("--R", eopt.R, "disk radius")->capture_default_str();
    eff->add_option("--h", eopt.h, "comma-separated h values")->capture_default_str();
    eff->add_option("--a0", eopt.a0, "gap constant (default: computed)");
    eff->add_option("--count", eopt.count, "eigenvalues")->capture_default_str();
    eff->add_option("--kappa", eopt.kappa_file, "curvature samples, uniform in arclength");
    eff->add_option("--L", eopt.L, "boundary length for --kappa");
    eff->add_option("--area", eopt.area, "enclosed area for --kappa");
    eff->add_option("--t-h", eopt.t_h, "override the flux constant");
    eff->add_option("--cutoff", eopt.cutoff, "Fourier cutoff (default 4 count + 16)");

    auto* chk = app.add_subcommand("check", "quick self-check; exit status 4 on failure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        Table t;
        CLI::App* used = app.get_subcommands().front();
        bool check_mode = false;
        if (used == dsp) t = run_dispersion(dopt, workers);
        else if (used == a0c) t = run_a0(aopt);
        else if (used == mom) t = run_momenta(mopt);
        else if (used == dsk || used == cmp) {
            if (used == cmp) kopt.zigzag = kopt.oracle = true;
            t = run_disk(kopt, workers);
            check_mode = kopt.check;
        } else if (used == cst) t = run_constants(copt);
        else if (used == eff) t = run_effective(eopt);
        else if (used == chk) {
            t = run_check(workers);
            check_mode = true;
        }
        auto cfg = collect_config(*used);
        cfg.insert(cfg.end(), t.config.begin(), t.config.end());
        t.config = std::move(cfg);
        out.write(t);
        if (check_mode) {
            bool failed = false;
            const auto it = std::find(t.columns.begin(), t.columns.end(), used == chk ? "pass" : "check");
            const auto col = static_cast<std::size_t>(it - t.columns.begin());
            for (const auto& r : t.rows) {
                if (used == chk) failed |= !std::get<bool>(r[col]);
                else failed |= std::get<std::string>(r[col]) == "fail";
            }
            if (failed) throw CheckFailed("one or more checks failed");
        }
        return 0;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return exit_check;
    } catch (const InvalidArgument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver did not converge: " << e.what() << "\n";
        return exit_convergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_convergence;
    }
}
