#include "support.hpp"

#include "mixedgreen/quadrature.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

namespace mixedgreen {
namespace {

using testing::unit_square;

TriangleMesh two_triangle_square() {
    std::vector<Vec2> nodes{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<Index, 3>> tris{{0, 1, 2}, {0, 2, 3}};
    std::vector<BoundaryEdge> bnd{{{0, 1}, BoundaryLabel::Dirichlet, 0},
                                  {{1, 2}, BoundaryLabel::Neumann, 1},
                                  {{2, 3}, BoundaryLabel::Neumann, 2},
                                  {{3, 0}, BoundaryLabel::Neumann, 3}};
    return {std::move(nodes), std::move(tris), std::move(bnd)};
}

/// Every interior edge has two triangles, every boundary edge one, and the
/// boundary-edge list matches the single-triangle edges.
void expect_conforming(const TriangleMesh& mesh) {
    std::map<std::pair<Index, Index>, int> count;
    for (const auto& t : mesh.triangles())
        for (int k = 0; k < 3; ++k) {
            const Index a = t[k], b = t[(k + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::size_t single = 0;
    for (const auto& [e, c] : count) {
        ASSERT_LE(c, 2);
        if (c == 1) ++single;
    }
    EXPECT_EQ(single, mesh.boundary_edges().size());
    for (const auto& b : mesh.boundary_edges())
        EXPECT_EQ((count[{std::min(b.nodes[0], b.nodes[1]), std::max(b.nodes[0], b.nodes[1])}]), 1);
    for (Index t = 0; t < mesh.num_triangles(); ++t) EXPECT_GT(mesh.area(t), 0.0);
}

TEST(Triangulate, CoarseSquare) {
    const auto s = unit_square({0}, 0.0);
    const TriangleMesh m = triangulate(s.dom(), s.dec(), 0.5);
    EXPECT_LE(m.h(), 0.5);
    EXPECT_GE(m.num_triangles(), 8);
    expect_conforming(m);
}

TEST(Triangulate, TransitionPointIsANode) {
    const auto s = unit_square({}, 0.0);
    const std::vector<LabeledInterval> seg{{1, 0.0, 0.3, BoundaryLabel::Dirichlet}};
    const BoundaryDecomposition dec(s.dom(), seg);
    const TriangleMesh m = triangulate(s.dom(), dec, 0.1);
    bool found = false;
    for (const Vec2& p : m.nodes()) found = found || (p - Vec2(1.0, 0.3)).norm() < 1e-14;
    EXPECT_TRUE(found);
}

TEST(Triangulate, RejectsNonPositiveSizeAndBudget) {
    const auto s = unit_square({0}, 0.0);
    EXPECT_THROW((void)triangulate(s.dom(), s.dec(), 0.0), InvalidInput);
    EXPECT_THROW((void)triangulate(s.dom(), s.dec(), 1e-5), InvalidInput);
}

TEST(Triangulate, AreaSumAndInteriorVertexOnShippedDomains) {
    for (const auto& name : testing::shipped_domains()) {
        const auto s = testing::from_file(name, 0.0);
        for (const double h : {0.25, 0.0625}) {
            const TriangleMesh m = triangulate(s.dom(), s.dec(), h);
            EXPECT_NEAR(m.total_area() / s.dom().area(), 1.0, 1e-12) << name;
            EXPECT_LE(m.h(), h * (1 + 1e-12)) << name;
            EXPECT_GE(m.min_angle_degrees(), 20.0) << name;
            expect_conforming(m);
            std::vector<std::uint8_t> on_boundary(static_cast<std::size_t>(m.num_nodes()), 0);
            for (const auto& b : m.boundary_edges()) on_boundary[b.nodes[0]] = on_boundary[b.nodes[1]] = 1;
            for (const auto& t : m.triangles())
                EXPECT_FALSE(on_boundary[t[0]] && on_boundary[t[1]] && on_boundary[t[2]]) << name;
        }
    }
}

TEST(Triangulate, DirichletLabelsFollowTheDecomposition) {
    const auto s = testing::from_file("domains/hexagon.json", 0.0);
    const TriangleMesh m = triangulate(s.dom(), s.dec(), 0.05);
    double d_len = 0.0, n_len = 0.0;
    for (const auto& b : m.boundary_edges()) {
        const double len = (m.nodes()[b.nodes[1]] - m.nodes()[b.nodes[0]]).norm();
        (b.label == BoundaryLabel::Dirichlet ? d_len : n_len) += len;
    }
    EXPECT_NEAR(d_len, s.dec().dirichlet_measure(), 1e-12);
    EXPECT_NEAR(n_len, s.dec().neumann_measure(), 1e-12);
}

TEST(Refine, TwoTrianglesBecomeEight) {
    const TriangleMesh m = two_triangle_square();
    const TriangleMesh r = refine(m);
    EXPECT_EQ(r.num_triangles(), 8);
    EXPECT_NEAR(r.h(), 0.5 * m.h(), 1e-15);
    expect_conforming(r);
}

TEST(Refine, BoundaryEdgesSplitWithTheirLabel) {
    const TriangleMesh m = two_triangle_square();
    const TriangleMesh r = refine(m);
    ASSERT_EQ(r.boundary_edges().size(), 2 * m.boundary_edges().size());
    std::map<std::size_t, int> dirichlet_children, children;
    for (const auto& b : r.boundary_edges()) {
        ++children[b.polygon_edge];
        if (b.label == BoundaryLabel::Dirichlet) ++dirichlet_children[b.polygon_edge];
    }
    for (std::size_t e = 0; e < 4; ++e) EXPECT_EQ(children[e], 2);
    EXPECT_EQ(dirichlet_children[0], 2);
    EXPECT_EQ(dirichlet_children.size(), 1u);
}

TEST(Refine, HalvesTriangulatedMesh) {
    const auto s = unit_square({0, 3}, 0.0);
    const TriangleMesh m = triangulate(s.dom(), s.dec(), 0.25);
    const TriangleMesh r = refine(m);
    EXPECT_NEAR(r.h(), 0.5 * m.h(), 1e-15);
    EXPECT_EQ(r.num_triangles(), 4 * m.num_triangles());
    EXPECT_NEAR(r.total_area(), 1.0, 1e-13);
}

TEST(GradedRefine, LocalSizeHalvesPerLevel) {
    const auto s = unit_square({0}, 0.0);
    const TriangleMesh base = triangulate(s.dom(), s.dec(), 1.0 / 8);
    const Vec2 x(0.4, 0.6);
    const double h0 = PointLocator(base).local_h(x);
    Index previous = base.num_triangles();
    for (int levels = 1; levels <= 3; ++levels) {
        const TriangleMesh g = graded_refine_toward(base, x, levels);
        EXPECT_GT(g.num_triangles(), previous);
        previous = g.num_triangles();
        EXPECT_LE(PointLocator(g).local_h(x), h0 * std::exp2(-levels) * (1 + 1e-12));
        EXPECT_NEAR(g.total_area(), 1.0, 1e-13);
        expect_conforming(g);
        // Far from the point the mesh is untouched.
        EXPECT_NEAR(PointLocator(g).local_h({0.95, 0.05}), PointLocator(base).local_h({0.95, 0.05}), 1e-15);
    }
}

TEST(Mesh, TextRoundTrip) {
    const auto s = testing::from_file("domains/l_shape.json", 0.0);
    const TriangleMesh m = triangulate(s.dom(), s.dec(), 0.2);
    std::stringstream io;
    m.write(io);
    const std::string text = io.str();
    EXPECT_NE(text.find("NODES"), std::string::npos);
    EXPECT_NE(text.find("TRIANGLES"), std::string::npos);
    EXPECT_NE(text.find("BOUNDARY"), std::string::npos);
    const TriangleMesh back = TriangleMesh::read(io);
    ASSERT_EQ(back.num_nodes(), m.num_nodes());
    ASSERT_EQ(back.num_triangles(), m.num_triangles());
    ASSERT_EQ(back.boundary_edges().size(), m.boundary_edges().size());
    for (Index i = 0; i < m.num_nodes(); ++i) EXPECT_EQ(back.nodes()[i], m.nodes()[i]);
    EXPECT_EQ(back.triangles(), m.triangles());
    EXPECT_EQ(back.dirichlet_vertex(), m.dirichlet_vertex());
}

TEST(PointLocator, FindsCentroidsAndRejectsOutside) {
    const auto s = testing::from_file("domains/l_shape.json", 0.0);
    const TriangleMesh m = triangulate(s.dom(), s.dec(), 0.1);
    const PointLocator loc(m);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto c = m.corners(t);
        const Location l = loc.locate((c[0] + c[1] + c[2]) / 3.0);
        ASSERT_EQ(l.triangle, t);
        EXPECT_NEAR(l.bary[0], 1.0 / 3, 1e-12);
    }
    EXPECT_EQ(loc.locate({2.0, 2.0}).triangle, -1);
}

// ∫_T λ0^a λ1^b λ2^c = 2|T| a! b! c! / (a + b + c + 2)!.
double exact_monomial(int a, int b, int c) {
    return 2.0 * std::tgamma(a + 1) * std::tgamma(b + 1) * std::tgamma(c + 1) / std::tgamma(a + b + c + 3);
}

TEST(Quadrature, TriangleRuleExactForQuartics) {
    const TriangleQuadrature q = triangle_rule_degree4();
    double wsum = 0.0;
    for (const double w : q.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
            for (int c = 0; a + b + c <= 4; ++c) {
                double sum = 0.0;
                for (std::size_t i = 0; i < q.weights.size(); ++i)
                    sum += q.weights[i] * std::pow(q.points[i][0], a) * std::pow(q.points[i][1], b) *
                           std::pow(q.points[i][2], c);
                EXPECT_NEAR(sum, exact_monomial(a, b, c), 1e-15) << a << b << c;
            }
}

TEST(Quadrature, LineRuleExactToDegreeFive) {
    const LineQuadrature q = line_rule_degree5();
    for (int k = 0; k <= 5; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < q.weights.size(); ++i) sum += q.weights[i] * std::pow(q.points[i], k);
        EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-15) << k;
    }
}

TEST(Quadrature, RandomQuarticOnMesh) {
    const auto s = testing::from_file("domains/l_shape.json", 0.0);
    const auto space = testing::make_space(s.dom(), s.dec(), 0.1);
    const RegionQuadrature quad = domain_quadrature(*space);
    EXPECT_NEAR(quad.measure(), s.dom().area(), 1e-12);
    // ∫ x^4 + x^2 y^2 over [0,1]^2 minus the quadrant [0.5,1]^2.
    auto mono = [](double x0, double x1, double y0, double y1, int a, int b) {
        return (std::pow(x1, a + 1) - std::pow(x0, a + 1)) / (a + 1) *
               (std::pow(y1, b + 1) - std::pow(y0, b + 1)) / (b + 1);
    };
    auto poly = [&](double x0, double x1, double y0, double y1) {
        return mono(x0, x1, y0, y1, 4, 0) + mono(x0, x1, y0, y1, 2, 2);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const Vec2& y = quad.point[i];
        sum += quad.weight[i] * (std::pow(y.x(), 4) + y.x() * y.x() * y.y() * y.y());
    }
    EXPECT_NEAR(sum, poly(0, 1, 0, 1) - poly(0.5, 1, 0.5, 1), 1e-14);
}

}  // namespace
}  // namespace mixedgreen
