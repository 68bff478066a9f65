#pragma once

/// @file mesh.hpp
/// @brief Conforming triangulations with D/N boundary tags, uniform red
/// refinement, graded longest-edge bisection, and point location.

#include "mixedgreen/geometry.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace mixedgreen {

struct BoundaryEdge {
    std::array<Index, 2> nodes{};
    BoundaryLabel label = BoundaryLabel::Neumann;
    std::size_t polygon_edge = 0;
};

/// Largest node count any mesh operation may produce.
inline constexpr Index kMaxMeshNodes = 1'500'000;

class TriangleMesh {
public:
    TriangleMesh() = default;
    /// `dirichlet_vertex` flags nodes lying on closed D; when empty it is
    /// derived from the endpoints of D-labeled boundary edges.
    TriangleMesh(std::vector<Vec2> nodes, std::vector<std::array<Index, 3>> triangles,
                 std::vector<BoundaryEdge> boundary, std::vector<std::uint8_t> dirichlet_vertex = {});

    [[nodiscard]] const std::vector<Vec2>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<std::array<Index, 3>>& triangles() const noexcept { return triangles_; }
    [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_; }
    [[nodiscard]] const std::vector<std::uint8_t>& dirichlet_vertex() const noexcept { return dirichlet_vertex_; }
    [[nodiscard]] Index num_nodes() const noexcept { return static_cast<Index>(nodes_.size()); }
    [[nodiscard]] Index num_triangles() const noexcept { return static_cast<Index>(triangles_.size()); }

    [[nodiscard]] std::array<Vec2, 3> corners(Index t) const;
    [[nodiscard]] double area(Index t) const;
    [[nodiscard]] double diameter(Index t) const;
    [[nodiscard]] double min_angle(Index t) const;
    /// Max triangle diameter.
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double min_angle_degrees() const;
    [[nodiscard]] double total_area() const;

    /// Text dump with NODES / TRIANGLES / BOUNDARY sections.
    void write(std::ostream& out) const;
    [[nodiscard]] static TriangleMesh read(std::istream& in);

private:
    std::vector<Vec2> nodes_;
    std::vector<std::array<Index, 3>> triangles_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<std::uint8_t> dirichlet_vertex_;
    double h_ = 0.0;
};

/// Mesh of the polygon with h ≤ target_h, polygon vertices and D/N transition
/// points as nodes. Axis-aligned rectangles whose transitions fall on the grid
/// get a symmetric union-jack grid; everything else goes through Delaunay
/// refinement followed by red refinement. Every triangle has a vertex off the boundary.
[[nodiscard]] TriangleMesh triangulate(const PolygonalDomain& domain, const BoundaryDecomposition& decomposition,
                                       double target_h);

/// Uniform red refinement: every triangle splits into four, h halves.
[[nodiscard]] TriangleMesh refine(const TriangleMesh& mesh);

/// `levels` rounds of longest-edge bisection; round k bisects elements meeting
/// B(point, 4 h_k) until their diameter is at most h_0 2^{-k}, with h_0 the
/// local size at `point`.
[[nodiscard]] TriangleMesh graded_refine_toward(const TriangleMesh& mesh, const Vec2& point, int levels);
/// Same with several centers handled together.
[[nodiscard]] TriangleMesh graded_refine_toward(const TriangleMesh& mesh, std::span<const Vec2> points, int levels);

struct Location {
    Index triangle = -1;
    std::array<double, 3> bary{};
};

/// Bucket-grid point location.
class PointLocator {
public:
    explicit PointLocator(const TriangleMesh& mesh);
    /// Containing triangle (with a small tolerance); triangle = -1 when outside.
    [[nodiscard]] Location locate(const Vec2& p) const;
    /// Max diameter over triangles meeting the closed disk B(p, radius).
    [[nodiscard]] double local_h(const Vec2& p, double radius = 0.0) const;
    /// Triangles whose bounding boxes meet the given box.
    [[nodiscard]] std::vector<Index> candidates(const Vec2& lo, const Vec2& hi) const;

private:
    [[nodiscard]] std::array<int, 2> cell(const Vec2& p) const;

    const TriangleMesh* mesh_;
    Vec2 lo_;
    Vec2 cell_size_;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<Index>> buckets_;
};

[[nodiscard]] std::array<double, 3> barycentric(const std::array<Vec2, 3>& tri, const Vec2& p);

}  // namespace mixedgreen
