#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace mixedgreen {
namespace {

using testing::unit_square;

double integral(const BogovskiiSolver& solver, const Vector& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < solver.quadrature().size(); ++k) s += solver.quadrature().weight[k] * f[static_cast<Index>(k)];
    return s;
}

double l2(const BogovskiiSolver& solver, const Vector& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < solver.quadrature().size(); ++k)
        s += solver.quadrature().weight[k] * f[static_cast<Index>(k)] * f[static_cast<Index>(k)];
    return std::sqrt(s);
}

/// Unit square with N = top edge only.
testing::Setup top_neumann(double h) { return unit_square({0, 1, 3}, h); }

TEST(Chain, UnitSquareWithTopNeumann) {
    const auto s = top_neumann(1.0 / 16);
    const ChainCover chain = build_chain(*s.space, s.dec(), 0.25);
    EXPECT_LE(chain.links.size(), 40u);
    EXPECT_GE(chain.links.size(), 2u);
    EXPECT_NEAR(chain.flux_radius, 0.25 / (2 * s.dom().lipschitz_M()), 1e-15);
    EXPECT_EQ(chain.flux_anchor.edge, 2u);
    EXPECT_NEAR(chain.flux_anchor.point.y(), 1.0, 1e-15);
    EXPECT_GT(chain.min_overlap_ratio(), 0.0);
    const BogovskiiSolver solver(s.space, s.dec(), 0.25);
    EXPECT_GT(solver.chain().flux_window, 0.0);
}

TEST(Chain, CoresCoverAndOverlapsAreComparable) {
    for (const auto& name : testing::shipped_domains()) {
        const auto s = testing::from_file(name, 1.0 / 16);
        const double R0 = s.dom().scale_R0();
        const ChainCover chain = build_chain(*s.space, s.dec(), R0);
        std::set<Index> covered, seen;
        for (std::size_t k = 0; k < chain.links.size(); ++k) {
            const ChainLink& link = chain.links[k];
            covered.insert(link.core.begin(), link.core.end());
            if (k > 0) {
                // Each link meets the union of the previous ones in area ~ R0².
                EXPECT_GE(link.overlap_area, 0.01 * R0 * R0) << name << " link " << k;
                bool meets = false;
                for (const Index t : link.triangles) meets = meets || seen.count(t) > 0;
                EXPECT_TRUE(meets) << name << " link " << k;
            }
            seen.insert(link.triangles.begin(), link.triangles.end());
        }
        EXPECT_EQ(static_cast<Index>(covered.size()), s.space->mesh().num_triangles()) << name;
    }
}

TEST(Chain, SmallSquareIsOneLink) {
    testing::Setup s;
    s.domain = std::make_unique<PolygonalDomain>(
        std::vector<Vec2>{{0, 0}, {0.1, 0}, {0.1, 0.1}, {0, 0.1}}, 4.0, 0.14);
    const std::vector<std::size_t> d{0};
    s.decomposition = std::make_unique<BoundaryDecomposition>(BoundaryDecomposition::from_edges(*s.domain, d));
    s.space = testing::make_space(s.dom(), s.dec(), 0.02);
    EXPECT_EQ(build_chain(*s.space, s.dec(), 0.14).links.size(), 1u);
}

TEST(Chain, NoNeumannNamesTheHypothesis) {
    const auto s = unit_square({0, 1, 2, 3}, 0.125);
    try {
        (void)build_chain(*s.space, s.dec(), 0.25);
        FAIL() << "expected NumericalFailure";
    } catch (const NumericalFailure& e) {
        EXPECT_EQ(e.hypothesis(), "NOpen");
    }
}

class BogovskiiSquare : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        setup_ = new testing::Setup(top_neumann(1.0 / 16));
        solver_ = new BogovskiiSolver(setup_->space, setup_->dec(), 0.25);
    }
    static void TearDownTestSuite() {
        delete solver_;
        delete setup_;
    }
    static testing::Setup* setup_;
    static BogovskiiSolver* solver_;
};
testing::Setup* BogovskiiSquare::setup_ = nullptr;
BogovskiiSolver* BogovskiiSquare::solver_ = nullptr;

TEST_F(BogovskiiSquare, DecompositionReconstructsAndIsMeanZero) {
    const Vector f = solver_->sample([](const Vec2& y) { return 1.0 + std::sin(5 * y.x()) * y.y(); });
    const std::vector<Vector> parts = solver_->decompose(f);
    ASSERT_EQ(parts.size(), solver_->chain().links.size());
    Vector sum = Vector::Zero(f.size());
    for (const Vector& p : parts) sum += p;
    EXPECT_LT((sum - f).cwiseAbs().maxCoeff(), 1e-12);
    for (std::size_t j = 1; j < parts.size(); ++j) EXPECT_LT(std::abs(integral(*solver_, parts[j])), 1e-12) << j;
    EXPECT_NEAR(integral(*solver_, parts[0]), integral(*solver_, f), 1e-12);
    double decomposition = 0.0;
    for (const Vector& p : parts) decomposition += l2(*solver_, p);
    EXPECT_LT(decomposition / l2(*solver_, f), 50.0);
}

TEST_F(BogovskiiSquare, UnitDatumPutsTotalMassOnTheRoot) {
    const Vector one = solver_->sample([](const Vec2&) { return 1.0; });
    const std::vector<Vector> parts = solver_->decompose(one);
    EXPECT_NEAR(integral(*solver_, parts[0]), 1.0, 1e-12);
    for (std::size_t j = 1; j < parts.size(); ++j) EXPECT_LT(std::abs(integral(*solver_, parts[j])), 1e-12);
}

TEST_F(BogovskiiSquare, DatumInsideRootCoreStaysThere) {
    const ChainLink& root = solver_->chain().links.front();
    const std::set<Index> core(root.core.begin(), root.core.end());
    ASSERT_FALSE(core.empty());
    Vector f = Vector::Zero(static_cast<Index>(solver_->quadrature().size()));
    for (std::size_t k = 0; k < solver_->quadrature().size(); ++k)
        if (core.count(solver_->quadrature().triangle[k])) f[static_cast<Index>(k)] = 1.0 + solver_->quadrature().point[k].x();
    const std::vector<Vector> parts = solver_->decompose(f);
    EXPECT_LT((parts[0] - f).cwiseAbs().maxCoeff(), 1e-14);
    for (std::size_t j = 1; j < parts.size(); ++j) EXPECT_EQ(parts[j].cwiseAbs().maxCoeff(), 0.0) << j;
}

TEST_F(BogovskiiSquare, LocalSolveContracts) {
    const Index n = static_cast<Index>(solver_->quadrature().size());
    EXPECT_EQ(solver_->local_solve(1, Vector::Zero(n)).coefficients().cwiseAbs().maxCoeff(), 0.0);

    // ±1 on the left/right halves of the link, balanced to mean zero.
    const std::size_t link = solver_->chain().links.size() / 2;
    const ChainLink& L = solver_->chain().links[link];
    const double xc = L.region.center().x();
    Vector f = Vector::Zero(n);
    std::set<Index> tris(L.triangles.begin(), L.triangles.end());
    double plus = 0.0, minus = 0.0;
    for (Index k = 0; k < n; ++k) {
        if (!tris.count(solver_->quadrature().triangle[static_cast<std::size_t>(k)])) continue;
        const bool left = solver_->quadrature().point[static_cast<std::size_t>(k)].x() < xc;
        f[k] = left ? 1.0 : -1.0;
        (left ? plus : minus) += solver_->quadrature().weight[static_cast<std::size_t>(k)];
    }
    for (Index k = 0; k < n; ++k)
        if (f[k] < 0) f[k] *= plus / minus;
    const VelocityField u = solver_->local_solve(link, f);

    // Zero outside the link: every node off its triangles vanishes.
    std::set<Index> link_nodes;
    for (const Index t : L.triangles)
        for (const Index v : setup_->space->velocity_nodes(t)) link_nodes.insert(v);
    for (Index v = 0; v < setup_->space->num_velocity_nodes(); ++v)
        if (!link_nodes.count(v)) {
            EXPECT_EQ(u.coefficients()[2 * v], 0.0);
            EXPECT_EQ(u.coefficients()[2 * v + 1], 0.0);
        }

    // Flux through the vertical cut at the center carries the left mass.
    const auto box = L.region.bounding_box();
    double flux = 0.0;
    const int samples = 2000;
    for (int i = 0; i < samples; ++i) {
        const Vec2 y(xc, box[0].y() + (i + 0.5) * (box[1].y() - box[0].y()) / samples);
        if (setup_->dom().contains(y)) flux += u.value(y).x() * (box[1].y() - box[0].y()) / samples;
    }
    EXPECT_NEAR(flux, plus, 0.05 * plus);

    Vector biased = f;
    for (Index k = 0; k < n; ++k)
        if (tris.count(solver_->quadrature().triangle[static_cast<std::size_t>(k)])) biased[k] += 0.1;
    EXPECT_THROW((void)solver_->local_solve(link, biased), InvalidInput);
}

TEST_F(BogovskiiSquare, ZeroDatumGivesZeroField) {
    const Vector zero = Vector::Zero(static_cast<Index>(solver_->quadrature().size()));
    EXPECT_EQ(solver_->solve(zero).coefficients().cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(BogovskiiSquare, UnitDatumFluxEqualsArea) {
    const Vector one = solver_->sample([](const Vec2&) { return 1.0; });
    const BogovskiiReport r = solver_->check(one);
    EXPECT_NEAR(r.neumann_flux, 1.0, 1e-8);
    EXPECT_LE(r.divergence_residual, 1e-8);
    EXPECT_LE(r.dirichlet_trace, 1e-12);
}

TEST_F(BogovskiiSquare, BumpPairResidual) {
    const auto bump = [](const Vec2& y, const Vec2& c) { return std::exp(-100 * (y - c).squaredNorm()); };
    const Vector f = solver_->sample([&](const Vec2& y) { return bump(y, {0.3, 0.4}) - bump(y, {0.7, 0.6}); });
    const BogovskiiReport r = solver_->check(f);
    EXPECT_LE(r.divergence_residual, 1e-8);
    EXPECT_LE(r.dirichlet_trace, 1e-12);
    EXPECT_NEAR(r.neumann_flux, integral(*solver_, f), 1e-8);
}

TEST_F(BogovskiiSquare, Linear) {
    const Vector f = solver_->sample([](const Vec2& y) { return y.x() * y.y(); });
    const Vector g = solver_->sample([](const Vec2& y) { return std::cos(4 * y.y()); });
    const Vector lhs = solver_->solve(Vector(2.0 * f - 3.0 * g)).coefficients();
    const Vector rhs = 2.0 * solver_->solve(f).coefficients() - 3.0 * solver_->solve(g).coefficients();
    EXPECT_LT((lhs - rhs).norm(), 1e-10 * rhs.norm());
}

TEST_F(BogovskiiSquare, StagesSumToSolution) {
    const Vector f = solver_->sample([](const Vec2& y) { return 2.0 - y.x(); });
    Vector sum = Vector::Zero(setup_->space->num_velocity_dofs());
    for (const VelocityField& s : solver_->stages(f)) sum += s.coefficients();
    EXPECT_LT((sum - solver_->solve(f).coefficients()).norm(), 1e-14 * sum.norm());
}

TEST(Bogovskii, FluxFieldCarriesUnitDivergence) {
    const auto s = testing::from_file("domains/hexagon.json", 1.0 / 16);
    const BogovskiiSolver solver(s.space, s.dec(), s.dom().scale_R0());
    const VelocityField& eta = solver.flux_field();
    for (Index n = 0; n < s.space->num_velocity_nodes(); ++n)
        if (s.space->dirichlet_node(n)) EXPECT_EQ(eta.coefficients().segment(2 * n, 2).norm(), 0.0);
    // −B η = ∫ q div η; summed over the partition of unity it is ∫ div η = 1.
    const StokesProblem problem(s.space);
    EXPECT_NEAR(-(problem.divergence() * eta.coefficients()).sum(), 1.0, 1e-10);
}

TEST(Bogovskii, ShippedDomainsMeetContracts) {
    for (const auto& name : testing::shipped_domains()) {
        const auto s = testing::from_file(name, 1.0 / 16);
        const BogovskiiSolver solver(s.space, s.dec(), s.dom().scale_R0());
        const Vector f = solver.sample([](const Vec2& y) { return 1.0 + std::sin(3 * y.x()) - y.y(); });
        const BogovskiiReport r = solver.check(f);
        EXPECT_LE(r.divergence_residual, 1e-8) << name;
        EXPECT_LE(r.dirichlet_trace, 1e-12) << name;
        EXPECT_NEAR(r.neumann_flux, integral(solver, f), 1e-8) << name;
        EXPECT_TRUE(std::isfinite(r.stability)) << name;
    }
}

}  // namespace
}  // namespace mixedgreen
