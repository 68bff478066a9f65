#include "support.hpp"

#include "mixedgreen/manufactured.hpp"

#include <gtest/gtest.h>

namespace mixedgreen {
namespace {

TEST(Exact, LoadsMatchFiniteDifferences) {
    const ExactSolution e = trigonometric_solution();
    const double d = 1e-5;
    for (const Vec2 y : {Vec2(0.3, 0.7), Vec2(0.1, 0.2), Vec2(0.85, 0.4)}) {
        Mat2 fd;
        for (int j = 0; j < 2; ++j) {
            const Vec2 step = d * Vec2::Unit(j);
            fd.col(j) = (e.u(y + step) - e.u(y - step)) / (2 * d);
        }
        EXPECT_LT((fd - e.grad_u(y)).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_NEAR(e.divergence(y), -e.grad_u(y).trace(), 1e-14);
        EXPECT_NEAR(e.divergence(y), 0.0, 1e-14);
        // −div 2ε(u) = −Δu for divergence-free u; the Laplacian of each component is −2π² u.
        const Vec2 expected = 2 * kPi * kPi * e.u(y) + Vec2(kPi * std::cos(kPi * y.x()), 0.0);
        EXPECT_LT((e.body_force(y) - expected).norm(), 1e-12);
    }
}

TEST(Rate, FitRecoversPowerLaw) {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> err;
    for (const double x : h) err.push_back(3.0 * x * x);
    EXPECT_NEAR(fitted_rate(h, err), 2.0, 1e-12);
    EXPECT_THROW((void)fitted_rate({0.1}, {0.2}), InvalidInput);
}

TEST(Rate, TaylorHoodConvergesAtSecondOrder) {
    const ExactSolution exact = trigonometric_solution();
    std::vector<double> h, eu, ep;
    for (const double target : {0.25, 0.125, 0.0625}) {
        const auto s = testing::unit_square({0, 3}, target);
        const StokesSolution sol = StokesProblem(s.space).solve(exact_loads(exact));
        const DiscretizationErrors e = discretization_errors(sol, exact);
        h.push_back(s.space->mesh().h());
        eu.push_back(e.velocity_h1);
        ep.push_back(e.pressure_l2);
        EXPECT_LT(e.velocity_l2, e.velocity_h1);
    }
    EXPECT_GE(fitted_rate(h, eu), 1.8);
    EXPECT_GE(fitted_rate(h, ep), 1.5);
}

}  // namespace
}  // namespace mixedgreen
