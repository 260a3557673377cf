#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "diracbag/numerics.hpp"

using namespace diracbag;

namespace {

// 1D Dirichlet Laplacian stencil [-1, 2, -1]: eigenvalues 2 - 2 cos(j pi / (n + 1)).
TridiagSym laplacian(std::size_t n) {
    TridiagSym t;
    t.diag.assign(n, 2.0);
    t.off.assign(n - 1, -1.0);
    return t;
}

double laplacian_eig(std::size_t n, std::size_t j) {
    return 2.0 - 2.0 * std::cos(static_cast<double>(j + 1) * std::numbers::pi / static_cast<double>(n + 1));
}

}  // namespace

TEST(Grid, StepAndNodes) {
    Grid1D g(0.0, 2.0, 5);
    EXPECT_DOUBLE_EQ(g.step(), 0.5);
    EXPECT_DOUBLE_EQ(g.at(4), 2.0);
    EXPECT_THROW(Grid1D(1.0, 0.0, 5), InvalidArgument);
    EXPECT_THROW(Grid1D(0.0, 1.0, 1), InvalidArgument);
}

TEST(Tridiagonal, SturmCountMatchesKnownSpectrum) {
    const auto t = laplacian(50);
    for (std::size_t j : {0u, 10u, 49u}) {
        const double e = laplacian_eig(50, j);
        EXPECT_EQ(sturm_count(t, e - 1e-9), j);
        EXPECT_EQ(sturm_count(t, e + 1e-9), j + 1);
    }
}

TEST(Tridiagonal, EigenvaluesByIndex) {
    const auto t = laplacian(200);
    for (std::size_t j : {0u, 1u, 57u, 199u})
        EXPECT_NEAR(eigenvalue_by_index(t, j, 1e-14), laplacian_eig(200, j), 1e-13);
    EXPECT_THROW(eigenvalue_by_index(t, 200), InvalidArgument);
}

TEST(Tridiagonal, NonFiniteEntryIsAConvergenceError) {
    auto t = laplacian(10);
    t.diag[3] = NAN;
    try {
        eigenvalue_by_index(t, 0);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.size(), 10u);
    }
}

TEST(Tridiagonal, ResidualOfComputedEigenpairs) {
    const auto t = laplacian(300);
    const auto r = eig_sym_tridiag(t, 4, true);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& v = r.vectors[k];
        double res = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double tv = t.diag[i] * v[i];
            if (i > 0) tv += t.off[i - 1] * v[i - 1];
            if (i + 1 < v.size()) tv += t.off[i] * v[i + 1];
            res = std::max(res, std::abs(tv - r.values[k] * v[i]));
        }
        EXPECT_LT(res, 1e-10);
    }
}

TEST(Tridiagonal, WeightedVectorsAreNormalized) {
    const auto t = laplacian(100);
    std::vector<double> w(100, 0.25);
    const auto r = eig_sym_tridiag(t, 2, true, w);
    for (const auto& v : r.vectors) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Bidiagonal, SingularValuesOfIdentityShift) {
    // d = 1, e = 0 gives singular values all equal to one
    std::vector<double> d(20, 1.0), e(19, 0.0);
    const auto s = bidiag_smallest_singular(d, e, 3);
    for (double v : s) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(Bidiagonal, TinySingularValueToRelativeAccuracy) {
    // graded bidiagonal: product of singular values equals |det| = prod |d|
    const std::size_t n = 12;
    std::vector<double> d(n), e(n - 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::pow(10.0, -static_cast<double>(i));
    const auto s = bidiag_smallest_singular(d, e, n);
    double logprod = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        logprod += std::log(s[i]);
        logdet += std::log(d[i]);
    }
    EXPECT_NEAR(logprod, logdet, 1e-10);
    EXPECT_GT(s[0], 0.0);
    EXPECT_LT(s[0], 1e-60);
}

TEST(Bidiagonal, RejectsInconsistentSizes) {
    std::vector<double> d(3, 1.0), e(3, 1.0);
    EXPECT_THROW(bidiag_smallest_singular(d, e, 1), InvalidArgument);
}

TEST(Roots, BisectAndIllinoisAgree) {
    auto f = [](double x) { return std::cos(x) - x; };
    const auto b = make_bracket(f, 0.0, 1.0);
    const double r1 = bisect(f, b, 1e-13);
    const double r2 = illinois(f, b, 1e-14);
    EXPECT_NEAR(r1, 0.7390851332151607, 1e-12);
    EXPECT_NEAR(r2, 0.7390851332151607, 1e-12);
}

TEST(Roots, MissingSignChangeIsABracketError) {
    auto f = [](double x) { return x * x + 1.0; };
    EXPECT_THROW(make_bracket(f, -1.0, 1.0), BracketError);
}

TEST(Minimize, GoldenSectionFindsParabolaVertex) {
    const auto m = golden_min([](double x) { return (x - 0.3) * (x - 0.3) + 2.0; }, -1.0, 2.0, 1e-10);
    // a flat minimum pins the argument only to about sqrt(eps)
    EXPECT_NEAR(m.argmin, 0.3, 1e-7);
    EXPECT_NEAR(m.value, 2.0, 1e-14);
}

TEST(Quadrature, SimpsonIsExactOnCubics) {
    Grid1D g(0.0, 2.0, 11);
    std::vector<double> f(g.n);
    for (std::size_t i = 0; i < g.n; ++i) f[i] = std::pow(g.at(i), 3) - g.at(i);
    EXPECT_NEAR(integrate(f, g, {}, QuadRule::simpson), 4.0 - 2.0, 1e-13);
}

TEST(Quadrature, TrapezoidConvergesSecondOrder) {
    auto err = [](std::size_t n) {
        Grid1D g(0.0, 1.0, n);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(g.at(i));
        return std::abs(integrate(f, g, {}, QuadRule::trapezoid) - (std::exp(1.0) - 1.0));
    };
    EXPECT_NEAR(err(101) / err(201), 4.0, 0.05);
}
