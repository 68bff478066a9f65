#pragma once

/// @file quadrature.hpp
/// @brief Symmetric triangle and Gauss line rules.

#include <array>
#include <span>

namespace mixedgreen {

struct TriangleQuadrature {
    /// Barycentric coordinates of the nodes.
    std::span<const std::array<double, 3>> points;
    /// Weights summing to 1; multiply by the triangle area.
    std::span<const double> weights;
};

struct LineQuadrature {
    /// Nodes on [0, 1].
    std::span<const double> points;
    /// Weights summing to 1; multiply by the segment length.
    std::span<const double> weights;
};

/// Six-point rule, exact for polynomials of degree 4.
[[nodiscard]] TriangleQuadrature triangle_rule_degree4();
/// Three-point Gauss rule, exact for polynomials of degree 5.
[[nodiscard]] LineQuadrature line_rule_degree5();

}  // namespace mixedgreen
