#include <gtest/gtest.h>

#include <cmath>

#include "diracbag/fiber.hpp"
#include "oracles.hpp"

using namespace diracbag;

namespace {

// the bracket only has to isolate the ground level; the gap to the next level exceeds 1
double minus_shoot(double alpha, double xi, double near) {
    auto V = [xi](double t) { return (t - xi) * (t - xi) + 1.0; };
    return oracle::shoot_ground(V, alpha - xi, std::max(20.0, xi + 12.0), near - 0.3, near + 0.3);
}

}  // namespace

TEST(Fiber, WholeLineLandauLevels) {
    for (int k = 1; k <= 3; ++k) {
        const auto m = fiber_eigs(FiberSpec::whole_line(Sign::minus, 0.0), k, false).values.back();
        const auto p = fiber_eigs(FiberSpec::whole_line(Sign::plus, 0.0), k, false).values.back();
        EXPECT_NEAR(m, whole_line_levels(Sign::minus, k), 1e-4);
        EXPECT_NEAR(p, whole_line_levels(Sign::plus, k), 1e-4);
    }
}

TEST(Fiber, WholeLineLevelsDoNotDependOnXi) {
    const double a = fiber_ground(FiberSpec::whole_line(Sign::minus, 0.0));
    const double b = fiber_ground(FiberSpec::whole_line(Sign::minus, 1.5));
    EXPECT_NEAR(a, b, 1e-5);
}

TEST(Fiber, GroundLevelMatchesParabolicCylinderRoot) {
    // root of the Robin condition on D_p((t - xi) sqrt 2), evaluated at 30 digits
    const auto spec = FiberSpec::half_line(Sign::minus, 1.31236, 1.31236);
    EXPECT_NEAR(fiber_ground(spec), 1.72427377610759, 2e-6);
}

TEST(Fiber, GroundLevelMatchesShootingOracle) {
    for (double alpha : {0.5, 2.0})
        for (double xi : {-1.0, 0.5, 2.0}) {
            FiberGrid fine;
            fine.n = 2 * fine.n - 1;
            const double fd = fiber_ground(FiberSpec::half_line(Sign::minus, alpha, xi));
            const double fd2 = fiber_ground(FiberSpec::half_line(Sign::minus, alpha, xi, fine));
            const double extrapolated = (4.0 * fd2 - fd) / 3.0;
            const double ref = minus_shoot(alpha, xi, fd);
            EXPECT_NEAR(extrapolated, ref, 5e-6) << "alpha=" << alpha << " xi=" << xi;
            // default grid: second order, worst for strongly negative Robin parameters
            EXPECT_NEAR(fd, ref, 1e-4) << "alpha=" << alpha << " xi=" << xi;
        }
}

TEST(Fiber, EigenvaluesAscendAndIncreaseWithAlpha) {
    const auto lo = fiber_eigs(FiberSpec::half_line(Sign::minus, 1.0, 0.5), 4, false).values;
    const auto hi = fiber_eigs(FiberSpec::half_line(Sign::minus, 1.5, 0.5), 4, false).values;
    for (std::size_t j = 0; j < 4; ++j) {
        if (j > 0) {
            EXPECT_LT(lo[j - 1], lo[j]);
        }
        EXPECT_LT(lo[j], hi[j]);
    }
}

TEST(Fiber, AlphaDerivativeIsTheSquaredTrace) {
    for (Sign s : {Sign::minus, Sign::plus}) {
        const auto spec = FiberSpec::half_line(s, 2.0, 1.0);
        const auto d = fiber_eig_derivatives(spec);
        const auto fe = fiber_eigs(spec, 1);
        EXPECT_NEAR(d.d_alpha / (fe.u0 * fe.u0), 1.0, 1e-4) << to_string(s);
    }
}

TEST(Fiber, FunctionsAreNormalizedWithPositivePeak) {
    const auto fe = fiber_eigs(FiberSpec::half_line(Sign::minus, 1.0, 1.0), 2);
    for (const auto& u : fe.functions) {
        double s = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            s += ((i == 0 || i + 1 == u.size()) ? 0.5 : 1.0) * u[i] * u[i];
            if (std::abs(u[i]) > std::abs(peak)) peak = u[i];
        }
        EXPECT_NEAR(s * fe.grid.step(), 1.0, 1e-12);
        EXPECT_GT(peak, 0.0);
    }
}

TEST(Fiber, RobinTraceRelation) {
    const auto fe = fiber_eigs(FiberSpec::half_line(Sign::minus, 1.7, 0.4), 1);
    EXPECT_NEAR(fe.du0, (1.7 - 0.4) * fe.u0, 1e-4);
}

TEST(Fiber, RefinementGuardFlagsCoarseGrids) {
    FiberGrid coarse;
    coarse.n = 41;
    EXPECT_THROW(fiber_eigs_checked(FiberSpec::half_line(Sign::minus, 1.0, 1.0, coarse), 1, 1e-6), RefinementNeeded);
    EXPECT_NO_THROW(fiber_eigs_checked(FiberSpec::half_line(Sign::minus, 1.0, 1.0), 1, 1e-4));
}

TEST(Fiber, InvalidSpecsAreRejected) {
    EXPECT_THROW(fiber_eigs(FiberSpec::half_line(Sign::minus, -1.0, 0.0), 1), InvalidArgument);
    EXPECT_THROW(fiber_eigs(FiberSpec::half_line(Sign::minus, 1.0, NAN), 1), InvalidArgument);
    EXPECT_THROW(fiber_eigs(FiberSpec::half_line(Sign::minus, 1.0, 0.0), 0), InvalidArgument);
    EXPECT_THROW(whole_line_levels(Sign::plus, 0), InvalidArgument);
}
