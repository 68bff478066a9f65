#pragma once

/// @file studies.hpp
/// @brief Sweeps shared by the CLI and the acceptance harness: line fits,
/// logarithmic bound of the Green function, representation dual path,
/// sweep centers away from a pole.

#include "mixedgreen/green.hpp"
#include "mixedgreen/verifiers.hpp"

#include <vector>

namespace mixedgreen {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Coefficient of determination.
    double r2 = 0.0;
};

/// Least squares y ≈ slope x + intercept. Needs two distinct abscissae.
[[nodiscard]] LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct LogBoundSweep {
    std::vector<double> r;
    std::vector<double> max_G;
    /// max|G| against log(d/r).
    LinearFit fit;
};

/// max over `directions` probes at radius r of max_{αβ} |G^{αβ}(x, y)|, for r
/// growing by `factor` from 4 max(h_local, ρ_δ) to min(d/4, dist(x, ∂Ω)).
[[nodiscard]] LogBoundSweep log_bound_sweep(const GreenFunction& green, std::size_t pole, int directions = 16,
                                            double factor = 1.25);

/// Probes at radii 2^{-k} inside [4 max(h_local, ρ_δ), d/2], `directions` each.
[[nodiscard]] std::vector<Vec2> default_probes(const GreenFunction& green, std::size_t pole, int directions = 8);

enum class RepresentationLoad : std::uint8_t { BodyForce, Divergence };

struct RepresentationComparison {
    std::vector<Vec2> direct;
    std::vector<Vec2> represented;
    /// ‖represented − direct‖ / ‖direct‖ over the poles (Euclidean over all components).
    double relative_l2 = 0.0;
};

/// Smooth Gaussian bump (width 0.1 diam) at `center` as body force (direction (1, −1/2)) or as
/// divergence datum; direct solve on the Green mesh against the Green quadrature.
[[nodiscard]] RepresentationComparison representation_check(const GreenFunction& green, RepresentationLoad load,
                                                            const Vec2& center);

/// Grid points of spacing `spacing` inside Ω whose doubled local domain at
/// radius rho avoids the exclusion ball.
[[nodiscard]] std::vector<Vec2> sweep_centers(const PolygonalDomain& domain, double spacing, double rho,
                                              const std::optional<Exclusion>& exclusion);

/// Exclusion ball of radius 4 max(h_local, ρ_δ) around a pole.
[[nodiscard]] Exclusion pole_exclusion(const GreenFunction& green, std::size_t pole);

}  // namespace mixedgreen
