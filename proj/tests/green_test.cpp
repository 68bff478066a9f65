#include "support.hpp"

#include "mixedgreen/studies.hpp"

#include <gtest/gtest.h>

namespace mixedgreen {
namespace {

/// D = top and bottom; poles at the center and two off-center points.
struct Fixture {
    testing::Setup setup = testing::from_file("domains/square_top_bottom.json", 0.0);
    GreenFunction green{setup.dec(), {Vec2(0.5, 0.5), Vec2(0.25, 0.75), Vec2(0.75, 0.3)}, GreenOptions{1.0 / 32, 2, 2.0}};
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

TEST(GreenColumn, LoadIsNormalized) {
    const GreenFunction& g = fixture().green;
    for (std::size_t pole = 0; pole < g.poles().size(); ++pole)
        for (int alpha = 0; alpha < 2; ++alpha) {
            const GreenColumn& c = g.column(pole, alpha);
            EXPECT_NEAR(c.load_integral, 1.0, 1e-12);
            EXPECT_EQ(c.alpha, alpha);
            EXPECT_NEAR(c.rho, g.mollifier_radius(pole), 1e-15);
            EXPECT_FALSE(c.near_boundary);
        }
    EXPECT_NEAR(g.mollifier_radius(0), 2.0 * g.local_h(0), 1e-15);
}

TEST(GreenColumn, RejectsBadPoleAndComponent) {
    const Fixture& f = fixture();
    const StokesProblem& problem = f.green.problem();
    EXPECT_THROW((void)build_green_column(problem, f.setup.dom(), {0.5, 0.01}, 0, 0.05), InvalidInput);
    EXPECT_THROW((void)build_green_column(problem, f.setup.dom(), {0.5, 0.5}, 2, 0.05), InvalidInput);
}

TEST(GreenColumn, VanishesOnDirichletNodes) {
    const GreenFunction& g = fixture().green;
    const FESpace& space = g.space();
    for (int alpha = 0; alpha < 2; ++alpha) {
        const Vector& c = g.column(0, alpha).G.coefficients();
        for (Index n = 0; n < space.num_velocity_nodes(); ++n) {
            if (!space.dirichlet_node(n)) continue;
            EXPECT_EQ(c[2 * n], 0.0);
            EXPECT_EQ(c[2 * n + 1], 0.0);
        }
    }
}

TEST(GreenFunction, OffDiagonalIsOddUnderReflection) {
    // The domain and D are symmetric about y1 = 1/2, so G12(x, ·) is odd there for the center pole.
    const GreenFunction& g = fixture().green;
    double defect = 0.0, scale = 0.0;
    for (const double y1 : {0.1, 0.2, 0.3, 0.4})
        for (const double y2 : {0.1, 0.3, 0.6, 0.9}) {
            const Mat2 a = g.evaluate(0, {y1, y2});
            const Mat2 b = g.evaluate(0, {1 - y1, y2});
            defect = std::max(defect, std::abs(a(0, 1) + b(0, 1)));
            scale = std::max(scale, a.cwiseAbs().maxCoeff());
        }
    EXPECT_LT(defect, 1e-3 * scale);
}

TEST(GreenFunction, DifferenceFromStokesletStaysBounded) {
    const GreenFunction& g = fixture().green;
    const Vec2 x = g.poles()[0];
    double lo = kInfinity, hi = -kInfinity;
    for (const double r : {0.2, 0.1, 0.05, 0.025})
        for (int k = 0; k < 8; ++k) {
            const Vec2 w = r * Vec2(std::cos(k * kPi / 4 + 0.1), std::sin(k * kPi / 4 + 0.1));
            const Mat2 d = g.evaluate(0, x + w) - stokeslet(w);
            lo = std::min(lo, d.minCoeff());
            hi = std::max(hi, d.maxCoeff());
        }
    // Over this range the Stokeslet itself changes by log(8)/4π ≈ 0.165.
    EXPECT_LT(hi - lo, 0.25);
}

TEST(GreenFunction, SymmetricInPoleAndArgument) {
    const GreenFunction& g = fixture().green;
    const auto [abs, rel] = g.symmetry_defect(1, 2);
    EXPECT_LT(rel, 0.05);
    EXPECT_LT(abs, 1e-3);
    EXPECT_THROW((void)g.symmetry_defect(1, 1), InvalidInput);
}

TEST(GreenFunction, FiniteAtResolvedProbes) {
    const GreenFunction& g = fixture().green;
    for (std::size_t pole = 0; pole < g.poles().size(); ++pole) {
        const std::vector<Vec2> probes = default_probes(g, pole);
        ASSERT_FALSE(probes.empty());
        for (const GreenSample& s : sample_green(g, pole, probes)) {
            EXPECT_TRUE(s.G.allFinite());
            EXPECT_TRUE(s.Pi.allFinite());
            EXPECT_GE(s.r, 4 * g.local_h(pole) * (1 - 1e-12));
        }
    }
}

TEST(Representation, ZeroDataGiveZero) {
    for (const Vec2& u : representation_solve(fixture().green, {})) EXPECT_EQ(u.norm(), 0.0);
}

TEST(Representation, LinearInTheData) {
    const GreenFunction& g = fixture().green;
    RepresentationData one, two;
    one.body_force = [](const Vec2& y) { return Vec2(std::sin(3 * y.x()), y.y()); };
    two.body_force = [](const Vec2& y) { return Vec2(2 * std::sin(3 * y.x()), 2 * y.y()); };
    const auto a = representation_solve(g, one);
    const auto b = representation_solve(g, two);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT((b[i] - 2 * a[i]).norm(), 1e-13 * (1 + a[i].norm()));
}

TEST(Representation, MatchesDirectSolve) {
    const GreenFunction& g = fixture().green;
    EXPECT_LT(representation_check(g, RepresentationLoad::BodyForce, {0.4, 0.6}).relative_l2, 0.05);
    EXPECT_LT(representation_check(g, RepresentationLoad::Divergence, {0.4, 0.6}).relative_l2, 0.05);
}

TEST(GreenFunction, GradientAwayFromPoleIsStable) {
    const auto s = testing::from_file("domains/square_top_bottom.json", 0.0);
    const double rho = std::sqrt(2.0) / 8;
    std::vector<double> norms;
    for (const double h : {1.0 / 16, 1.0 / 32}) {
        const GreenFunction g(s.dec(), {Vec2(0.5, 0.5)}, GreenOptions{h, 2, 2.0});
        norms.push_back(green_gradient_away(g, 0, 2.2, rho));
        EXPECT_TRUE(std::isfinite(norms.back()));
    }
    EXPECT_NEAR(norms[1] / norms[0], 1.0, 0.1);
}

TEST(GreenFunction, WeakNormsFinite) {
    const GreenLorentzNorms n = green_weak_norms(fixture().green, 0);
    EXPECT_GT(n.gradient, 0.0);
    EXPECT_GT(n.pressure, 0.0);
    EXPECT_TRUE(std::isfinite(n.gradient) && std::isfinite(n.pressure));
}

TEST(Stokeslet, LogarithmicProfile) {
    const Mat2 a = stokeslet({0.1, 0.0});
    const Mat2 b = stokeslet({0.2, 0.0});
    EXPECT_NEAR(a(0, 0) - b(0, 0), std::log(2.0) / (4 * kPi), 1e-15);
    EXPECT_NEAR(a(0, 1), 0.0, 1e-16);
    EXPECT_NEAR(stokeslet({0.0, 0.3})(0, 0), -std::log(0.3) / (4 * kPi), 1e-15);
}

}  // namespace
}  // namespace mixedgreen
