#pragma once

/// @file geometry.hpp
/// @brief Polygonal Lipschitz domains, the D/N boundary decomposition, and
/// the multiscale probes built on coordinate cylinders: boundary intervals
/// Delta_rho(x) = Z_rho(x) ∩ ∂Ω and local domains Omega_rho(x).

#include "mixedgreen/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace mixedgreen {

enum class BoundaryLabel : std::uint8_t { Dirichlet, Neumann };

[[nodiscard]] char label_char(BoundaryLabel label);

/// A point on the polygon boundary, parameterized along one edge by t ∈ [0, 1].
struct BoundaryPoint {
    std::size_t edge = 0;
    double t = 0.0;
    Vec2 point = Vec2::Zero();
};

/// A closed sub-interval [t0, t1] of one polygon edge.
struct EdgePiece {
    std::size_t edge = 0;
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Rotated coordinate system. `e2` points into the domain.
struct Frame {
    Vec2 origin = Vec2::Zero();
    Vec2 e1 = Vec2::UnitX();
    Vec2 e2 = Vec2::UnitY();

    [[nodiscard]] Vec2 to_local(const Vec2& y) const { return {(y - origin).dot(e1), (y - origin).dot(e2)}; }
    [[nodiscard]] Vec2 to_global(const Vec2& l) const { return origin + l.x() * e1 + l.y() * e2; }
};

struct LipschitzCharacter {
    double M = 1.0;
    double R0 = 0.0;
};

/// Graph-Lipschitz constant M (max over vertices of |cot(θ/2)| in the bisector
/// frame, clamped to ≥ 1) and a scale R0 small enough that every window
/// Z_{200 R0}(x) meets ∂Ω in a single graph. Rejects cusps and self-intersections.
[[nodiscard]] LipschitzCharacter estimate_lipschitz_character(std::span<const Vec2> vertices);

class PolygonalDomain {
public:
    /// Vertices in counterclockwise order. `M` and `R0` override the estimated
    /// Lipschitz character; an override of M below the graph constant is rejected.
    explicit PolygonalDomain(std::vector<Vec2> vertices,
                             std::optional<double> M = std::nullopt,
                             std::optional<double> R0 = std::nullopt);

    [[nodiscard]] const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] std::size_t num_edges() const noexcept { return vertices_.size(); }

    [[nodiscard]] const Vec2& edge_start(std::size_t e) const { return vertices_[e]; }
    [[nodiscard]] const Vec2& edge_end(std::size_t e) const { return vertices_[(e + 1) % vertices_.size()]; }
    [[nodiscard]] Vec2 edge_point(std::size_t e, double t) const { return (1.0 - t) * edge_start(e) + t * edge_end(e); }
    [[nodiscard]] double edge_length(std::size_t e) const { return (edge_end(e) - edge_start(e)).norm(); }
    [[nodiscard]] Vec2 edge_tangent(std::size_t e) const { return (edge_end(e) - edge_start(e)).normalized(); }
    [[nodiscard]] Vec2 outward_normal(std::size_t e) const;
    [[nodiscard]] Vec2 inward_normal(std::size_t e) const { return -outward_normal(e); }

    /// Interior angle at vertex v, in (0, 2π).
    [[nodiscard]] double interior_angle(std::size_t v) const;

    [[nodiscard]] double diameter() const noexcept { return diameter_; }
    [[nodiscard]] double area() const noexcept { return area_; }
    [[nodiscard]] double perimeter() const noexcept { return perimeter_; }
    [[nodiscard]] double lipschitz_M() const noexcept { return M_; }
    [[nodiscard]] double scale_R0() const noexcept { return R0_; }
    /// The estimated graph constant and single-graph scale, before overrides.
    [[nodiscard]] const LipschitzCharacter& estimated_character() const noexcept { return estimated_; }
    [[nodiscard]] std::array<Vec2, 2> bounding_box() const;

    /// Closed-set membership with a relative tolerance.
    [[nodiscard]] bool contains(const Vec2& p) const;
    [[nodiscard]] double distance_to_boundary(const Vec2& p) const;
    [[nodiscard]] BoundaryPoint closest_boundary_point(const Vec2& p) const;
    [[nodiscard]] BoundaryPoint boundary_point(std::size_t edge, double t) const { return {edge, t, edge_point(edge, t)}; }

    /// Canonical cylinder frame at a boundary point: the bisector frame of the
    /// nearest vertex inside the vertex zone, otherwise the edge frame.
    [[nodiscard]] Frame boundary_frame(const BoundaryPoint& bp) const;
    [[nodiscard]] Frame vertex_frame(std::size_t v) const;
    [[nodiscard]] double vertex_zone() const noexcept { return vertex_zone_; }

    /// Half-height factor of coordinate cylinders: Z_rho = {|y1| < rho, |y2| < (4M+2) rho}.
    [[nodiscard]] double cylinder_aspect() const noexcept { return 4.0 * M_ + 2.0; }
    [[nodiscard]] bool in_cylinder(const Frame& frame, double rho, const Vec2& y) const;

    /// Z_rho ∩ ∂Ω as a list of closed edge pieces of positive length (exact clipping).
    [[nodiscard]] std::vector<EdgePiece> clip_boundary(const Frame& frame, double rho) const;
    /// Delta_rho(x): the connected component of Z_rho(x) ∩ ∂Ω through x, in the canonical frame.
    [[nodiscard]] std::vector<EdgePiece> boundary_interval(const BoundaryPoint& x, double rho) const;
    [[nodiscard]] double pieces_length(std::span<const EdgePiece> pieces) const;

private:
    std::vector<Vec2> vertices_;
    double diameter_ = 0.0;
    double area_ = 0.0;
    double perimeter_ = 0.0;
    double M_ = 1.0;
    double R0_ = 0.0;
    double vertex_zone_ = 0.0;
    LipschitzCharacter estimated_{};
};

struct LabeledInterval {
    std::size_t edge = 0;
    double t0 = 0.0;
    double t1 = 1.0;
    BoundaryLabel label = BoundaryLabel::Dirichlet;
};

/// ∂Ω = D ∪ N. D is stored per edge as a sorted set of closed, possibly
/// degenerate intervals; N is the complement. Transition points belong to D.
class BoundaryDecomposition {
public:
    /// Segments are painted in order over an edge set initialized to `fill`.
    BoundaryDecomposition(const PolygonalDomain& domain, std::span<const LabeledInterval> segments,
                          BoundaryLabel fill = BoundaryLabel::Neumann);

    [[nodiscard]] static BoundaryDecomposition uniform(const PolygonalDomain& domain, BoundaryLabel label);
    /// Label whole edges; edges not listed get `fill`.
    [[nodiscard]] static BoundaryDecomposition from_edges(const PolygonalDomain& domain,
                                                          std::span<const std::size_t> dirichlet_edges);

    [[nodiscard]] std::size_t num_edges() const noexcept { return dirichlet_.size(); }
    [[nodiscard]] const std::vector<std::array<double, 2>>& dirichlet_intervals(std::size_t edge) const {
        return dirichlet_[edge];
    }
    /// Open N intervals on an edge (complement of D within [0, 1]).
    [[nodiscard]] std::vector<std::array<double, 2>> neumann_intervals(std::size_t edge) const;

    [[nodiscard]] BoundaryLabel label_at(std::size_t edge, double t) const;
    /// True when the closed piece lies in D.
    [[nodiscard]] bool piece_in_dirichlet(const EdgePiece& piece) const;
    /// True when the open piece avoids D.
    [[nodiscard]] bool piece_in_neumann(const EdgePiece& piece) const;
    /// Arc length of D within a closed piece.
    [[nodiscard]] double dirichlet_length(const EdgePiece& piece, double edge_length) const;

    [[nodiscard]] bool has_dirichlet() const;
    [[nodiscard]] bool has_neumann() const;
    [[nodiscard]] double dirichlet_measure() const;
    [[nodiscard]] double neumann_measure() const;
    /// D interval endpoints in edge interiors (includes degenerate D points).
    [[nodiscard]] std::vector<BoundaryPoint> transition_points() const;

    /// D' = closure(N), N' = ∂Ω \ D'.
    [[nodiscard]] BoundaryDecomposition swapped() const;

    [[nodiscard]] const PolygonalDomain& domain() const noexcept { return *domain_; }

private:
    BoundaryDecomposition(const PolygonalDomain& domain, std::vector<std::vector<std::array<double, 2>>> d)
        : domain_(&domain), dirichlet_(std::move(d)) {}

    const PolygonalDomain* domain_;
    std::vector<std::vector<std::array<double, 2>>> dirichlet_;
};

// -- admissibility checks --------------------------------------------------

struct AhlforsDavidScale {
    double rho = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    /// min over samples of σ(Delta_rho(x) ∩ D)/rho.
    double min_dirichlet_ratio = 0.0;
};

struct AhlforsDavidReport {
    double M = 1.0;
    std::size_t samples = 0;
    std::vector<AhlforsDavidScale> scales;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double min_dirichlet_ratio = 0.0;
    bool pass = false;
};

/// Sample points on D: endpoints, quarter points and midpoints of every D interval.
[[nodiscard]] std::vector<BoundaryPoint> dirichlet_samples(const BoundaryDecomposition& decomposition);
/// Dyadic scales R0 2^{-k}, k = 1..8.
[[nodiscard]] std::vector<double> default_ahlfors_david_scales(const PolygonalDomain& domain);

/// Extremal ratios σ(Delta_rho(x))/rho over x ∈ D. Passes when they lie in
/// [1/M, M] and the D-portion ratio stays ≥ 1/M. Throws InvalidInput when a
/// scale is outside (0, R0) or D is empty.
[[nodiscard]] AhlforsDavidReport ahlfors_david_check(const PolygonalDomain& domain,
                                                     const BoundaryDecomposition& decomposition,
                                                     std::span<const double> scales);

struct OpeningWitness {
    bool found = false;
    BoundaryPoint center{};
    double radius = 0.0;
    std::vector<EdgePiece> interval;
    /// Longest single-edge run of the label; reported on failure.
    double largest_run = 0.0;
};

struct OpeningReport {
    OpeningWitness dirichlet;
    OpeningWitness neumann;
    [[nodiscard]] bool d_open() const noexcept { return dirichlet.found; }
    [[nodiscard]] bool n_open() const noexcept { return neumann.found; }
};

/// Searches x with Delta_radius(x) contained in the labeled set.
[[nodiscard]] OpeningWitness find_open_interval(const PolygonalDomain& domain,
                                                const BoundaryDecomposition& decomposition,
                                                BoundaryLabel label, double radius);
/// Both opening conditions at radius R0/M.
[[nodiscard]] OpeningReport opening_check(const PolygonalDomain& domain, const BoundaryDecomposition& decomposition);

// -- local domains -----------------------------------------------------------

enum class LocalDomainKind : std::uint8_t { InteriorDisk, BoundaryCylinder };

class LocalDomain {
public:
    LocalDomain(const PolygonalDomain& domain, Vec2 center, double radius);
    /// Cylinder anchored directly at a boundary point.
    LocalDomain(const PolygonalDomain& domain, const BoundaryPoint& anchor, double radius);

    [[nodiscard]] const PolygonalDomain& domain() const noexcept { return *domain_; }
    [[nodiscard]] const Vec2& center() const noexcept { return center_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] LocalDomainKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::optional<BoundaryPoint>& anchor() const noexcept { return anchor_; }
    [[nodiscard]] const Frame& frame() const noexcept { return frame_; }
    /// Ω ∩ Z_rho(anchor) for cylinders; empty for disks.
    [[nodiscard]] const std::vector<Vec2>& region() const noexcept { return region_; }

    [[nodiscard]] bool contains(const Vec2& y) const;
    [[nodiscard]] double area() const;
    [[nodiscard]] std::array<Vec2, 2> bounding_box() const;
    /// True when the closure meets D.
    [[nodiscard]] bool touches_dirichlet(const BoundaryDecomposition& decomposition) const;
    /// Same center/anchor, scaled radius.
    [[nodiscard]] LocalDomain scaled(double factor) const;

    /// Kernel of the region (set of points it is star-shaped about). Disks
    /// return an inscribed square of the disk.
    [[nodiscard]] std::vector<Vec2> kernel() const;
    /// Radius of the largest disk centered at the kernel's Chebyshev-center
    /// estimate that fits inside the kernel.
    [[nodiscard]] double kernel_inradius() const;

private:
    const PolygonalDomain* domain_;
    Vec2 center_;
    double radius_;
    LocalDomainKind kind_;
    std::optional<BoundaryPoint> anchor_;
    Frame frame_;
    std::vector<Vec2> region_;
};

/// Omega_rho(x): the disk when dist(x, ∂Ω) > rho, else Ω ∩ Z_rho(x̂) at the foot point.
/// Throws InvalidInput when x is outside the closed domain or rho ≤ 0.
[[nodiscard]] LocalDomain local_domain(const PolygonalDomain& domain, const Vec2& x, double rho);

// -- polygon utilities -------------------------------------------------------

[[nodiscard]] double signed_area(std::span<const Vec2> polygon);
[[nodiscard]] bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p);
[[nodiscard]] double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
/// Sutherland–Hodgman clip of `subject` by a convex counterclockwise polygon.
[[nodiscard]] std::vector<Vec2> clip_polygon(std::span<const Vec2> subject, std::span<const Vec2> convex_clip);
/// Parameter range [s0, s1] ⊂ [0, 1] of segment a→b inside the box
/// |l1| ≤ half_width, |l2| ≤ half_height in `frame`; nullopt when empty.
[[nodiscard]] std::optional<std::array<double, 2>> clip_segment_to_box(const Frame& frame, double half_width,
                                                                       double half_height, const Vec2& a,
                                                                       const Vec2& b);

}  // namespace mixedgreen
