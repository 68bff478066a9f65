#pragma once

/// @file norms.hpp
/// @brief Quadrature-level norm algebra: region quadrature, empirical Lorentz
/// (quasi)norms from the weighted decreasing rearrangement, Sobolev seminorms.

#include "mixedgreen/fe_space.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace mixedgreen {

/// Quadrature nodes (triangle, barycentric point, weight) covering a region.
struct RegionQuadrature {
    std::vector<Index> triangle;
    std::vector<std::array<double, 3>> bary;
    std::vector<Vec2> point;
    std::vector<double> weight;

    [[nodiscard]] std::size_t size() const noexcept { return weight.size(); }
    [[nodiscard]] double measure() const;
};

/// Degree-4 rule on every triangle.
[[nodiscard]] RegionQuadrature domain_quadrature(const FESpace& space);
/// Nodes inside the local domain. Cut triangles are subdivided `depth` times
/// and leaf nodes are kept by point membership.
[[nodiscard]] RegionQuadrature region_quadrature(const FESpace& space, const LocalDomain& region, int depth = 5);
/// Same with a general membership test restricted to the triangles meeting the box [lo, hi].
[[nodiscard]] RegionQuadrature region_quadrature(const FESpace& space, const std::function<bool(const Vec2&)>& inside,
                                                 const Vec2& lo, const Vec2& hi, int depth = 5);

/// |f| at quadrature nodes with their measures.
struct WeightedSamples {
    std::vector<double> values;
    std::vector<double> weights;

    [[nodiscard]] double total_weight() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ‖f‖_{q,r} = (∫_0^∞ (t^{1/q} f*(t))^r dt/t)^{1/r}, with f* the weighted
/// decreasing rearrangement (a step function, integrated exactly). r = ∞ gives
/// sup_t t μ(t)^{1/q}. Requires 1 < q < ∞ and 1 ≤ r ≤ ∞.
[[nodiscard]] double lorentz_norm(const WeightedSamples& samples, double q, double r);
[[nodiscard]] inline double weak_lebesgue_norm(const WeightedSamples& samples, double q) {
    return lorentz_norm(samples, q, kInfinity);
}

/// ∫|fg| / (‖f‖_{q0,r0} ‖g‖_{q1,r1}) for conjugate pairs 1/q0 + 1/q1 = 1,
/// 1/r0 + 1/r1 = 1. Both sample sets must share the same nodes.
[[nodiscard]] double lorentz_holder_ratio(const WeightedSamples& f, const WeightedSamples& g, double q0, double r0,
                                          double q1, double r1);

struct SobolevSeminorms {
    double l2 = 0.0;
    double grad_l2 = 0.0;
    double sym_grad_l2 = 0.0;
    /// ‖ω‖ with ω = (∂₂u₁ − ∂₁u₂)/2; ‖∇u‖² = ‖ε(u)‖² + 2‖ω‖².
    double antisym_l2 = 0.0;
    double div_l2 = 0.0;
    /// (R0^{-2}‖u‖² + ‖∇u‖²)^{1/2}.
    double scaled_h1 = 0.0;
};

[[nodiscard]] SobolevSeminorms sobolev_seminorms(const VelocityField& u, double R0);
[[nodiscard]] double l2_norm(const PressureField& p);
/// ∫ of a pointwise function of (value, gradient) over the nodes.
[[nodiscard]] double integrate(const VelocityField& u, const RegionQuadrature& quad,
                               const std::function<double(const Vec2&, const Mat2&)>& integrand);

/// Samples of |u| or |∇u| (Frobenius) at the nodes.
[[nodiscard]] WeightedSamples velocity_magnitude_samples(const VelocityField& u, const RegionQuadrature& quad);
[[nodiscard]] WeightedSamples gradient_magnitude_samples(const VelocityField& u, const RegionQuadrature& quad);
[[nodiscard]] WeightedSamples pressure_magnitude_samples(const PressureField& p, const RegionQuadrature& quad);

}  // namespace mixedgreen
