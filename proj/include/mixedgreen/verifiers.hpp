#pragma once

/// @file verifiers.hpp
/// @brief Computable forms of the functional inequalities: Korn constant as a
/// pencil eigenvalue, Poincaré–Sobolev, Caccioppoli, local Hölder and
/// mean-value sweeps over local domains.

#include "mixedgreen/norms.hpp"
#include "mixedgreen/stokes.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mixedgreen {

struct KornReport {
    /// min over free u of a(u,u) / (2‖∇u‖²); 0 with a rigid witness when D = ∅.
    double constant = 0.0;
    /// False when rigid motions are admissible: D = ∅, or the computed
    /// constant is at roundoff level (e.g. D a single point).
    bool hypothesis_ok = true;
    /// ‖ε(w)‖² / ‖∇w‖² for the rotation w = (−y₂, y₁); set only when D = ∅.
    std::optional<double> rigid_witness;
    /// Bound C in ‖ω(u)‖ ≤ C ‖ε(u)‖ from the divergence right inverse, 1/β with
    /// β the inf-sup constant in the H¹ seminorm.
    double dual_C = 0.0;
    /// 1 / (1 + 2 C²). An estimate of `constant`, not a bound: the right inverse
    /// does not vanish on N, so boundary terms are dropped.
    double dual_constant = 0.0;
};

/// Smallest eigenvalue of the pencil (A_ff, 2 G_ff) by Lanczos (tolerance
/// 1e-8, at most 500 steps) plus the dual route.
[[nodiscard]] KornReport korn_constant(const StokesProblem& problem);

struct SweepEntry {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// lhs / rhs; 0 when both vanish.
    double ratio = 0.0;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    [[nodiscard]] double worst() const;
    /// worst() over entries with the given radius.
    [[nodiscard]] double worst_at(double radius) const;
};

/// (⨍_{Ω_r} |u − ū|^{q*})^{1/q*} against r (⨍_{Ω_{2r}} |∇u|^q)^{1/q}, q* = 2q/(2 − q),
/// with ū = 0 when Ω_r touches D and the average over Ω_r otherwise.
/// Requires 1 ≤ q < 2 and 2r ≤ R0.
[[nodiscard]] SweepReport poincare_sobolev_check(const VelocityField& u, const BoundaryDecomposition& decomposition,
                                                 std::span<const Vec2> centers, std::span<const double> radii,
                                                 double q);

/// Ball that sweep domains must avoid (the mollified pole and its neighborhood).
struct Exclusion {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;

    /// Conservative: tests the ball against the region's bounding box.
    [[nodiscard]] bool meets(const LocalDomain& region) const;
};

/// ρ (⨍_{Ω_ρ} |∇u|²)^{1/2} against ⨍_{Ω_{2ρ}} |u|. Throws InvalidInput when
/// Ω_{2ρ} meets the exclusion ball.
[[nodiscard]] SweepReport caccioppoli_check(const VelocityField& u, const PolygonalDomain& domain,
                                            std::span<const Vec2> centers, std::span<const double> radii,
                                            std::optional<Exclusion> exclusion = std::nullopt);

struct HolderReport {
    /// Least-squares slope of log(|u(z) − u(y)| / A) against log(|z − y|/ρ),
    /// A = ⨍_{Ω_{2ρ}} |u|, over pairs in Ω_ρ with |z − y|/ρ log-uniform in
    /// [1/32, 1]. 1 when the increments are at roundoff level.
    double gamma = 0.0;
    /// max |u(z) − u(y)| / (A (|z − y|/ρ)^γ).
    double constant = 0.0;
    /// max |u(x)| / A over the centers.
    double mvt_constant = 0.0;
    std::size_t pairs = 0;
    std::uint64_t seed = 0;
};

[[nodiscard]] HolderReport local_holder_check(const VelocityField& u, const PolygonalDomain& domain,
                                              std::span<const Vec2> centers, double rho, std::size_t pairs_per_center,
                                              std::uint64_t seed, std::optional<Exclusion> exclusion = std::nullopt);

/// Distance from y to the closed set D; infinity when D = ∅.
[[nodiscard]] double distance_to_dirichlet(const BoundaryDecomposition& decomposition, const Vec2& y);

/// Interpolant of dist(y, D) times a random smooth (trigonometric/polynomial)
/// vector field; an H¹ field vanishing on D. Without D the factor is dropped.
[[nodiscard]] VelocityField smooth_random_field(std::shared_ptr<const FESpace> space,
                                                const BoundaryDecomposition& decomposition, std::uint64_t seed);

/// Velocity field with i.i.d. standard normal nodal values, zero on D.
[[nodiscard]] VelocityField random_field(std::shared_ptr<const FESpace> space, std::uint64_t seed);

}  // namespace mixedgreen
