#pragma once

/// @file manufactured.hpp
/// @brief Exact solutions with derived loads, discretization errors and
/// convergence-rate fits.

#include "mixedgreen/stokes.hpp"

#include <functional>
#include <vector>

namespace mixedgreen {

struct ExactSolution {
    std::function<Vec2(const Vec2&)> u;
    /// Row i, column j holds ∂u_i/∂y_j.
    std::function<Mat2(const Vec2&)> grad_u;
    std::function<double(const Vec2&)> p;
    /// −div 2ε(u) + ∇p.
    std::function<Vec2(const Vec2&)> body_force;
    /// −div u.
    std::function<double(const Vec2&)> divergence;
    std::function<Vec2(const Vec2&)> divergence_gradient;
};

/// u = (sin πy₁ sin πy₂, cos πy₁ cos πy₂), p = sin πy₁ (divergence-free).
[[nodiscard]] ExactSolution trigonometric_solution();

/// Body force, divergence datum, traction (2ε(u) − p I)ν on N and Dirichlet trace.
[[nodiscard]] Loads exact_loads(const ExactSolution& exact);

struct DiscretizationErrors {
    double velocity_h1 = 0.0;
    double velocity_l2 = 0.0;
    double pressure_l2 = 0.0;
};

[[nodiscard]] DiscretizationErrors discretization_errors(const StokesSolution& solution, const ExactSolution& exact);

/// Least-squares slope of log error against log h.
[[nodiscard]] double fitted_rate(const std::vector<double>& h, const std::vector<double>& error);

}  // namespace mixedgreen
