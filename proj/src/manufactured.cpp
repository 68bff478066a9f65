#include "mixedgreen/manufactured.hpp"

#include "mixedgreen/norms.hpp"
#include "mixedgreen/studies.hpp"

#include <cmath>

namespace mixedgreen {

ExactSolution trigonometric_solution() {
    constexpr double pi = kPi;
    ExactSolution e;
    e.u = [](const Vec2& y) {
        return Vec2(std::sin(pi * y.x()) * std::sin(pi * y.y()), std::cos(pi * y.x()) * std::cos(pi * y.y()));
    };
    e.grad_u = [](const Vec2& y) {
        const double sx = std::sin(pi * y.x()), cx = std::cos(pi * y.x());
        const double sy = std::sin(pi * y.y()), cy = std::cos(pi * y.y());
        Mat2 g;
        g << pi * cx * sy, pi * sx * cy, -pi * sx * cy, -pi * cx * sy;
        return g;
    };
    e.p = [](const Vec2& y) { return std::sin(pi * y.x()); };
    // −Δu = 2π² u for both components; ∇p = (π cos πy₁, 0).
    e.body_force = [u = e.u](const Vec2& y) {
        return Vec2(2 * pi * pi * u(y).x() + pi * std::cos(pi * y.x()), 2 * pi * pi * u(y).y());
    };
    e.divergence = [](const Vec2&) { return 0.0; };
    e.divergence_gradient = [](const Vec2&) { return Vec2::Zero().eval(); };
    return e;
}

Loads exact_loads(const ExactSolution& exact) {
    Loads l;
    l.body_force = exact.body_force;
    l.divergence = exact.divergence;
    l.divergence_gradient = exact.divergence_gradient;
    l.traction = [grad = exact.grad_u, p = exact.p](const Vec2& y, const Vec2& nu) -> Vec2 {
        const Mat2 g = grad(y);
        return (g + g.transpose()) * nu - p(y) * nu;
    };
    l.dirichlet = exact.u;
    return l;
}

DiscretizationErrors discretization_errors(const StokesSolution& solution, const ExactSolution& exact) {
    const RegionQuadrature quad = domain_quadrature(solution.u.space());
    double eu = 0, eg = 0, ep = 0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const Vec2& y = quad.point[k];
        const double w = quad.weight[k];
        eu += w * (solution.u.value(quad.triangle[k], quad.bary[k]) - exact.u(y)).squaredNorm();
        eg += w * (solution.u.gradient(quad.triangle[k], quad.bary[k]) - exact.grad_u(y)).squaredNorm();
        const double dp = solution.p.value(quad.triangle[k], quad.bary[k]) - exact.p(y);
        ep += w * dp * dp;
    }
    return {std::sqrt(eu + eg), std::sqrt(eu), std::sqrt(ep)};
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& error) {
    if (h.size() != error.size()) throw InvalidInput("rate fit needs matched samples");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(error[i] > 0.0)) throw InvalidInput("rate fit needs positive mesh sizes and errors");
        x.push_back(std::log(h[i]));
        y.push_back(std::log(error[i]));
    }
    return linear_fit(x, y).slope;
}

}  // namespace mixedgreen
