#pragma once

/// @file green.hpp
/// @brief Discrete Green function of the mixed problem: columns solve the
/// saddle system with a normalized ball load at the pole, on a mesh graded
/// toward the poles; evaluation, representation formula and probe sweeps.

#include "mixedgreen/norms.hpp"
#include "mixedgreen/stokes.hpp"

#include <map>
#include <memory>
#include <vector>

namespace mixedgreen {

/// (G^{α·}(x,·), Π^α(x,·)) for one pole x and component α.
struct GreenColumn {
    Vec2 pole = Vec2::Zero();
    int alpha = 0;
    /// Mollification radius ρ_δ.
    double rho = 0.0;
    VelocityField G;
    PressureField Pi;
    /// Quadrature integral of the ball load; 1 by construction.
    double load_integral = 0.0;
    /// dist(x, ∂Ω) < 4 max(h_local, ρ_δ): the pole is under-resolved.
    bool near_boundary = false;
};

/// Column with load e_α |B|_h^{-1} χ_{B(x, rho)}, |B|_h the quadrature measure of
/// the ball. Throws InvalidInput when the ball leaves Ω or α ∉ {0, 1}.
[[nodiscard]] GreenColumn build_green_column(const StokesProblem& problem, const PolygonalDomain& domain,
                                             const Vec2& x, int alpha, double rho);

/// The 2D free-space Stokeslet (1/4π)(−log|w| I + w⊗w/|w|²).
[[nodiscard]] Mat2 stokeslet(const Vec2& w);

struct GreenOptions {
    double h = 1.0 / 64.0;
    int grading_levels = 3;
    /// ρ_δ = factor × local mesh size at the pole.
    double mollifier_factor = 2.0;
};

/// Green columns for a fixed pole set sharing one graded mesh and one factorization.
class GreenFunction {
public:
    GreenFunction(const BoundaryDecomposition& decomposition, std::vector<Vec2> poles, GreenOptions options = {});
    /// Reuses an existing mesh of `domain` (no grading).
    GreenFunction(std::shared_ptr<const FESpace> space, const PolygonalDomain& domain, std::vector<Vec2> poles,
                  double mollifier_factor = 2.0);

    [[nodiscard]] const PolygonalDomain& domain() const noexcept { return *domain_; }
    [[nodiscard]] const FESpace& space() const noexcept { return *space_; }
    [[nodiscard]] const std::shared_ptr<const FESpace>& space_ptr() const noexcept { return space_; }
    [[nodiscard]] const StokesProblem& problem() const noexcept { return *problem_; }
    [[nodiscard]] const std::vector<Vec2>& poles() const noexcept { return poles_; }
    [[nodiscard]] double local_h(std::size_t pole) const;
    [[nodiscard]] double mollifier_radius(std::size_t pole) const;

    /// Computed on first use and cached.
    [[nodiscard]] const GreenColumn& column(std::size_t pole, int alpha) const;
    /// Row α, column β: G^{αβ}(x, y).
    [[nodiscard]] Mat2 evaluate(std::size_t pole, const Vec2& y) const;
    /// (Π^1(x, y), Π^2(x, y)).
    [[nodiscard]] Vec2 evaluate_pressure(std::size_t pole, const Vec2& y) const;
    /// max_{α,β} |G^{αβ}(x, y) − G^{βα}(y, x)| and the same relative to max |G| over both.
    [[nodiscard]] std::pair<double, double> symmetry_defect(std::size_t x_pole, std::size_t y_pole) const;

private:
    const PolygonalDomain* domain_;
    std::shared_ptr<const FESpace> space_;
    std::unique_ptr<StokesProblem> problem_;
    std::vector<Vec2> poles_;
    double mollifier_factor_;
    mutable std::map<std::pair<std::size_t, int>, GreenColumn> cache_;
};

/// Data for the representation formula; unset members are zero.
struct RepresentationData {
    std::function<Vec2(const Vec2&)> body_force;
    std::function<double(const Vec2&)> divergence;
    std::function<Vec2(const Vec2&)> divergence_gradient;
    std::function<Vec2(const Vec2&, const Vec2&)> traction;
};

/// u^α(x) = ∫ G^{αβ}(x,y)(f^β − ∂_β g) + Π^α(x,y) g dy + ∫_N G^{αβ}(x,y) f_N^β dσ
/// at every pole, by quadrature over the columns.
[[nodiscard]] std::vector<Vec2> representation_solve(const GreenFunction& green, const RepresentationData& data);

struct GreenSample {
    Vec2 x = Vec2::Zero();
    Vec2 y = Vec2::Zero();
    Mat2 G = Mat2::Zero();
    Vec2 Pi = Vec2::Zero();
    double r = 0.0;
};

/// Points x + r(cos θ_k, sin θ_k), k < directions, for each radius, kept when inside Ω.
[[nodiscard]] std::vector<Vec2> probe_points(const PolygonalDomain& domain, const Vec2& x,
                                             std::span<const double> radii, int directions = 8);

[[nodiscard]] std::vector<GreenSample> sample_green(const GreenFunction& green, std::size_t pole,
                                                    std::span<const Vec2> points);

/// Empirical weak-L² norms of |∇G(x,·)| and |Π(x,·)| (Frobenius / Euclidean over α).
struct GreenLorentzNorms {
    double gradient = 0.0;
    double pressure = 0.0;
};
[[nodiscard]] GreenLorentzNorms green_weak_norms(const GreenFunction& green, std::size_t pole);

/// ‖∇G(x,·)‖_{L^q(Ω \ Ω_ρ(x))}.
[[nodiscard]] double green_gradient_away(const GreenFunction& green, std::size_t pole, double q, double rho);

}  // namespace mixedgreen
