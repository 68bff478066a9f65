#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace mixedgreen {
namespace {

using testing::unit_square;

TEST(AhlforsDavid, FlatBoundaryArcIsTwoRho) {
    const auto s = unit_square({0}, 0.0);
    // D = the bottom-edge midpoint, so it is the only sample.
    const std::vector<LabeledInterval> mid{{0, 0.5, 0.5, BoundaryLabel::Dirichlet}};
    const BoundaryDecomposition point(s.dom(), mid);
    const std::vector<double> scales{0.1};
    const AhlforsDavidReport r = ahlfors_david_check(s.dom(), point, scales);
    EXPECT_NEAR(r.min_ratio, 2.0, 1e-12);
    EXPECT_NEAR(r.max_ratio, 2.0, 1e-12);
    EXPECT_NEAR(s.dom().pieces_length(s.dom().boundary_interval(s.dom().boundary_point(0, 0.5), 0.1)), 0.2, 1e-12);
}

TEST(AhlforsDavid, CornerRatioBetweenOneAndFour) {
    const auto s = unit_square({0}, 0.0);
    const double len = s.dom().pieces_length(s.dom().boundary_interval(s.dom().boundary_point(0, 0.0), 0.1));
    EXPECT_GE(len / 0.1, 1.0);
    EXPECT_LE(len / 0.1, 4.0);
}

TEST(AhlforsDavid, RejectsScaleAtR0AndEmptyD) {
    const auto s = unit_square({0}, 0.0);
    const std::vector<double> at_r0{s.dom().scale_R0()};
    EXPECT_THROW((void)ahlfors_david_check(s.dom(), s.dec(), at_r0), InvalidInput);
    const auto none = BoundaryDecomposition::uniform(s.dom(), BoundaryLabel::Neumann);
    const std::vector<double> ok{0.1};
    EXPECT_THROW((void)ahlfors_david_check(s.dom(), none, ok), InvalidInput);
}

TEST(AhlforsDavid, DyadicRatiosWithinMOnShippedDomains) {
    for (const auto& name : testing::shipped_domains()) {
        const auto s = testing::from_file(name, 0.0);
        const auto scales = default_ahlfors_david_scales(s.dom());
        ASSERT_EQ(scales.size(), 8u);
        const AhlforsDavidReport r = ahlfors_david_check(s.dom(), s.dec(), scales);
        const double M = s.dom().lipschitz_M();
        EXPECT_TRUE(r.pass) << name;
        EXPECT_GE(r.min_ratio, 1.0 / M) << name;
        EXPECT_LE(r.max_ratio, M) << name;
    }
}

TEST(Opening, SquareWithBottomDirichletIsOpenBothWays) {
    const auto s = unit_square({0}, 0.0);
    const OpeningReport r = opening_check(s.dom(), s.dec());
    EXPECT_TRUE(r.d_open());
    EXPECT_TRUE(r.n_open());
    EXPECT_NEAR(r.dirichlet.radius, 0.125, 1e-15);
    EXPECT_NEAR(s.dom().pieces_length(r.dirichlet.interval), 0.25, 1e-12);
}

TEST(Opening, AllDirichletHasNoNeumannInterval) {
    const auto s = unit_square({0, 1, 2, 3}, 0.0);
    const OpeningReport r = opening_check(s.dom(), s.dec());
    EXPECT_TRUE(r.d_open());
    EXPECT_FALSE(r.n_open());
    EXPECT_EQ(r.neumann.largest_run, 0.0);
}

TEST(Opening, SinglePointDirichletIsNotOpen) {
    const auto s = unit_square({}, 0.0);
    const std::vector<LabeledInterval> pt{{0, 0.5, 0.5, BoundaryLabel::Dirichlet}};
    const BoundaryDecomposition dec(s.dom(), pt);
    EXPECT_TRUE(dec.has_dirichlet());
    EXPECT_EQ(dec.dirichlet_measure(), 0.0);
    const OpeningReport r = opening_check(s.dom(), dec);
    EXPECT_FALSE(r.d_open());
    EXPECT_TRUE(r.n_open());
}

TEST(LocalDomain, InteriorDiskArea) {
    const auto s = unit_square({0}, 0.0);
    const LocalDomain d = local_domain(s.dom(), {0.5, 0.5}, 0.2);
    EXPECT_EQ(d.kind(), LocalDomainKind::InteriorDisk);
    EXPECT_NEAR(d.area(), kPi * 0.04, 1e-12);
}

TEST(LocalDomain, BoundaryCylinderIsClippedRectangle) {
    const auto s = unit_square({0}, 0.0);
    const LocalDomain d = local_domain(s.dom(), {0.5, 0.05}, 0.2);
    ASSERT_EQ(d.kind(), LocalDomainKind::BoundaryCylinder);
    ASSERT_TRUE(d.anchor().has_value());
    EXPECT_NEAR(d.anchor()->point.x(), 0.5, 1e-15);
    EXPECT_NEAR(d.anchor()->point.y(), 0.0, 1e-15);
    const double top = std::min(1.0, s.dom().cylinder_aspect() * 0.2);
    const auto box = d.bounding_box();
    EXPECT_NEAR(box[0].x(), 0.3, 1e-12);
    EXPECT_NEAR(box[1].x(), 0.7, 1e-12);
    EXPECT_NEAR(box[0].y(), 0.0, 1e-12);
    EXPECT_NEAR(box[1].y(), top, 1e-12);
    EXPECT_NEAR(d.area(), 0.4 * top, 1e-12);
}

TEST(LocalDomain, RejectsOutsidePointsAndBadRadius) {
    const auto s = unit_square({0}, 0.0);
    EXPECT_THROW((void)local_domain(s.dom(), {1.5, 0.5}, 0.1), InvalidInput);
    EXPECT_THROW((void)local_domain(s.dom(), {0.5, 0.5}, 0.0), InvalidInput);
}

TEST(LocalDomain, RegionsAreStarShapedAboutAComparableDisk) {
    for (const auto& name : testing::shipped_domains()) {
        const auto s = testing::from_file(name, 0.0);
        const double R0 = s.dom().scale_R0();
        std::mt19937_64 rng(7);
        const auto box = s.dom().bounding_box();
        std::uniform_real_distribution<double> ux(box[0].x(), box[1].x()), uy(box[0].y(), box[1].y());
        int tested = 0;
        while (tested < 40) {
            const Vec2 x(ux(rng), uy(rng));
            if (!s.dom().contains(x)) continue;
            const double rho = R0 * std::exp2(-static_cast<int>(rng() % 4));
            const LocalDomain d = local_domain(s.dom(), x, rho);
            EXPECT_GE(d.kernel_inradius(), 0.1 * rho) << name << " at (" << x.x() << ", " << x.y() << ")";
            ++tested;
        }
    }
}

void expect_nested(const LocalDomain& small, const LocalDomain& large, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto box = small.bounding_box();
    for (int k = 0; k < 200; ++k) {
        const Vec2 y(box[0].x() + u01(rng) * (box[1].x() - box[0].x()),
                     box[0].y() + u01(rng) * (box[1].y() - box[0].y()));
        if (small.contains(y)) EXPECT_TRUE(large.contains(y));
    }
}

TEST(LocalDomain, NestedInRadius) {
    const auto s = testing::from_file("domains/l_shape.json", 0.0);
    const double R0 = s.dom().scale_R0();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Vec2 x(u01(rng), u01(rng));
        if (!s.dom().contains(x)) continue;
        const LocalDomain small = local_domain(s.dom(), x, 0.25 * R0);
        const LocalDomain large = small.scaled(2.0);
        if (small.kind() != large.kind()) continue;
        expect_nested(small, large, rng);
    }
    for (std::size_t e = 0; e < s.dom().num_edges(); ++e) {
        const BoundaryPoint anchor = s.dom().boundary_point(e, 0.3);
        expect_nested(LocalDomain(s.dom(), anchor, 0.25 * R0), LocalDomain(s.dom(), anchor, 0.5 * R0), rng);
    }
}

TEST(Lipschitz, SquareAndHexagonHaveUnitConstant) {
    const auto square = testing::unit_square_vertices();
    EXPECT_NEAR(estimate_lipschitz_character(square).M, 1.0, 1e-12);
    EXPECT_LE(estimate_lipschitz_character(square).R0, 1.0 / 400.0 + 1e-15);
    std::vector<Vec2> hex;
    for (int k = 0; k < 6; ++k) hex.emplace_back(std::cos(k * kPi / 3), std::sin(k * kPi / 3));
    EXPECT_NEAR(estimate_lipschitz_character(hex).M, 1.0, 1e-12);
    EXPECT_NEAR(PolygonalDomain(hex).interior_angle(0), 2 * kPi / 3, 1e-12);
}

TEST(Lipschitz, RejectsSlitAndSelfIntersection) {
    const std::vector<Vec2> slit{{0, 0}, {1, 0}, {1, 1}, {0.5, 1}, {0.5, 0.5}, {0.5, 1}, {0, 1}};
    EXPECT_THROW((void)PolygonalDomain(slit), InvalidInput);
    const std::vector<Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    EXPECT_THROW((void)PolygonalDomain(bowtie), InvalidInput);
}

TEST(Lipschitz, RejectsMBelowGraphConstant) {
    // A 30° wedge needs M = cot(15°) > 1.
    const std::vector<Vec2> wedge{{0, 0}, {1, 0}, {std::cos(kPi / 6), std::sin(kPi / 6)}};
    const double M = estimate_lipschitz_character(wedge).M;
    EXPECT_GT(M, 1.0);
    EXPECT_THROW((void)PolygonalDomain(wedge, 1.0), InvalidInput);
    EXPECT_NO_THROW((void)PolygonalDomain(wedge, M + 1.0));
}

TEST(Decomposition, TransitionPointsBelongToD) {
    const auto s = unit_square({}, 0.0);
    const std::vector<LabeledInterval> seg{{1, 0.0, 0.3, BoundaryLabel::Dirichlet}};
    const BoundaryDecomposition dec(s.dom(), seg);
    EXPECT_EQ(dec.label_at(1, 0.3), BoundaryLabel::Dirichlet);
    EXPECT_EQ(dec.label_at(1, 0.31), BoundaryLabel::Neumann);
    EXPECT_NEAR(dec.dirichlet_measure(), 0.3, 1e-15);
    EXPECT_NEAR(dec.neumann_measure(), 3.7, 1e-15);
    const auto tp = dec.transition_points();
    ASSERT_EQ(tp.size(), 1u);
    EXPECT_NEAR(tp[0].point.y(), 0.3, 1e-15);
}

TEST(Decomposition, SwapExchangesMeasures) {
    const auto s = testing::from_file("domains/hexagon.json", 0.0);
    const BoundaryDecomposition sw = s.dec().swapped();
    EXPECT_NEAR(sw.dirichlet_measure(), s.dec().neumann_measure(), 1e-12);
    EXPECT_NEAR(sw.neumann_measure(), s.dec().dirichlet_measure(), 1e-12);
}

TEST(PolygonUtilities, ClipAndArea) {
    const std::vector<Vec2> sq = testing::unit_square_vertices();
    const std::vector<Vec2> half{{0.5, -1}, {2, -1}, {2, 2}, {0.5, 2}};
    EXPECT_NEAR(signed_area(clip_polygon(sq, half)), 0.5, 1e-15);
    EXPECT_TRUE(point_in_polygon(sq, {0.25, 0.75}));
    EXPECT_FALSE(point_in_polygon(sq, {1.25, 0.75}));
    EXPECT_NEAR(point_segment_distance({2, 1}, {0, 0}, {1, 0}), std::sqrt(2.0), 1e-15);
}

}  // namespace
}  // namespace mixedgreen
