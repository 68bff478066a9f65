#pragma once

/// @file bogovskii.hpp
/// @brief Right inverse of the divergence with zero trace on D, built from a
/// chain of overlapping local domains, a mean-transfer decomposition of the
/// datum, local minimal-norm solves and a flux field carrying the total mass
/// out through N.

#include "mixedgreen/norms.hpp"
#include "mixedgreen/stokes.hpp"

#include <memory>
#include <vector>

namespace mixedgreen {

/// One local domain of the chain, as a set of mesh triangles.
struct ChainLink {
    LocalDomain region;
    /// Triangles with all corners in the closed region, pruned so every kept
    /// triangle has a vertex inside the union, then reduced to one component.
    std::vector<Index> triangles;
    /// Triangles of `triangles` whose centroid lies in the half-radius core.
    std::vector<Index> core;
    double area = 0.0;
    /// |ω_k ∩ (ω_0 ∪ … ∪ ω_{k-1})|; zero for k = 0.
    double overlap_area = 0.0;
};

struct ChainCover {
    std::vector<ChainLink> links;
    double R0 = 0.0;
    /// Radius of the N interval the flux field is built around, R0/(2M).
    double flux_radius = 0.0;
    /// N boundary point the first link is anchored at.
    BoundaryPoint flux_anchor{};
    /// Length of the N edges of the first link the flux field may cross.
    double flux_window = 0.0;

    /// min over k ≥ 1 of overlap_area / R0².
    [[nodiscard]] double min_overlap_ratio() const;
};

/// Covers the mesh by local domains of radius R0 whose cores (radius R0/2)
/// cover every triangle, ordered breadth-first over the core overlap graph
/// from a link anchored on N. Throws NumericalFailure with hypothesis "NOpen"
/// when N has no open interval of radius R0/(2M).
[[nodiscard]] ChainCover build_chain(const FESpace& space, const BoundaryDecomposition& decomposition, double R0);

struct BogovskiiReport {
    /// max_i |∫ q_i (div u − f)| over the nodal pressure basis, relative to
    /// max_i (|B||u| + |F|)_i with B, F the discrete divergence and load.
    double divergence_residual = 0.0;
    /// max |u| over D nodes.
    double dirichlet_trace = 0.0;
    /// ∫_N u·ν dσ.
    double neumann_flux = 0.0;
    /// (R0^{-2}‖u‖² + ‖∇u‖²)^{1/2} / ‖f‖.
    double stability = 0.0;
    /// Σ_j ‖f_j‖ / ‖f‖.
    double decomposition_constant = 0.0;
    /// max_j ‖∇u_j‖ R0 / ‖f_j‖ over the local solves.
    double local_constant = 0.0;
};

class BogovskiiSolver {
public:
    /// Needs the linear pressure space.
    BogovskiiSolver(std::shared_ptr<const FESpace> space, const BoundaryDecomposition& decomposition, double R0);
    ~BogovskiiSolver();
    BogovskiiSolver(const BogovskiiSolver&) = delete;
    BogovskiiSolver& operator=(const BogovskiiSolver&) = delete;

    [[nodiscard]] const FESpace& space() const noexcept { return *space_; }
    [[nodiscard]] const ChainCover& chain() const noexcept { return chain_; }
    /// Nodes at which divergence data are sampled.
    [[nodiscard]] const RegionQuadrature& quadrature() const noexcept { return quad_; }
    [[nodiscard]] Vector sample(const std::function<double(const Vec2&)>& f) const;

    /// (f_0, …, f_N) with Σ f_j = f at every node, f_j supported in ω_j and
    /// ∫ f_j = 0 for j ≥ 1.
    [[nodiscard]] std::vector<Vector> decompose(const Vector& f) const;
    /// Minimal-norm u_j vanishing outside ω_j with ∫ q div u_j = ∫ q f_j for
    /// every pressure q. Rejects f_j with nonzero mean.
    [[nodiscard]] VelocityField local_solve(std::size_t link, const Vector& f_link) const;
    /// Flux field η: zero on D and outside ω_0 ∪ window, ∫ q div η = ∫_{ω_0} q / |ω_0|.
    [[nodiscard]] const VelocityField& flux_field() const noexcept { return *eta_; }

    /// Per-link pieces of the solution: v_0 + (∫f) η on ω_0, then u_j for j ≥ 1.
    [[nodiscard]] std::vector<VelocityField> stages(const Vector& f) const;
    /// Sum of the stages.
    [[nodiscard]] VelocityField solve(const Vector& f) const;
    [[nodiscard]] VelocityField solve(const std::function<double(const Vec2&)>& f) const { return solve(sample(f)); }
    /// Residuals, trace, flux and constants of u = solve(f).
    [[nodiscard]] BogovskiiReport check(const Vector& f) const;

private:
    struct LocalSystem;
    [[nodiscard]] Vector pressure_loads(const Vector& f) const;

    std::shared_ptr<const FESpace> space_;
    const PolygonalDomain* domain_;
    double R0_;
    StokesProblem stokes_;
    ChainCover chain_;
    RegionQuadrature quad_;
    /// Quadrature node range [begin, end) of each triangle.
    std::vector<std::size_t> tri_begin_;
    std::vector<std::unique_ptr<LocalSystem>> systems_;
    std::unique_ptr<LocalSystem> flux_system_;
    std::unique_ptr<VelocityField> eta_;
};

}  // namespace mixedgreen
