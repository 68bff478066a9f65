#include "mixedgreen/green.hpp"

#include "mixedgreen/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mixedgreen {

GreenColumn build_green_column(const StokesProblem& problem, const PolygonalDomain& domain, const Vec2& x, int alpha,
                               double rho) {
    if (alpha != 0 && alpha != 1) throw InvalidInput("Green column component must be 0 or 1");
    if (!(rho > 0.0)) throw InvalidInput("mollification radius must be positive");
    if (!domain.contains(x) || domain.distance_to_boundary(x) < rho)
        throw InvalidInput("mollifier ball B(x, rho) is not contained in the domain");
    const FESpace& V = problem.space();
    const double h_local = V.locator().local_h(x, rho);
    const LocalDomain ball(domain, x, rho * (1.0 + 1e-12) > domain.distance_to_boundary(x) ? rho * (1.0 - 1e-12) : rho);
    const RegionQuadrature quad = region_quadrature(V, ball);
    const double measure = quad.measure();
    if (!(measure > 0.0)) throw NumericalFailure("mollifier ball has no quadrature nodes");

    LoadVectors loads{Vector::Zero(V.num_velocity_dofs()), Vector::Zero(V.num_pressure_dofs())};
    double integral = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const double w = quad.weight[k] / measure;
        integral += w;
        const auto phi = p2_values(quad.bary[k]);
        const auto nodes = V.velocity_nodes(quad.triangle[k]);
        for (int a = 0; a < 6; ++a) loads.lambda[2 * nodes[static_cast<std::size_t>(a)] + alpha] += w * phi[static_cast<std::size_t>(a)];
    }
    StokesSolution sol = problem.solve(loads);
    GreenColumn col{x, alpha, rho, std::move(sol.u), std::move(sol.p), integral, false};
    col.near_boundary = domain.distance_to_boundary(x) < 4.0 * std::max(h_local, rho);
    return col;
}

Mat2 stokeslet(const Vec2& w) {
    const double r = w.norm();
    if (!(r > 0.0)) throw InvalidInput("Stokeslet is singular at the origin");
    return (1.0 / (4.0 * kPi)) * (-std::log(r) * Mat2::Identity() + w * w.transpose() / (r * r));
}

GreenFunction::GreenFunction(const BoundaryDecomposition& decomposition, std::vector<Vec2> poles, GreenOptions options)
    : domain_(&decomposition.domain()), poles_(std::move(poles)), mollifier_factor_(options.mollifier_factor) {
    if (poles_.empty()) throw InvalidInput("Green function needs at least one pole");
    for (const Vec2& x : poles_)
        if (!domain_->contains(x) || domain_->distance_to_boundary(x) <= 0.0)
            throw InvalidInput("Green pole must lie inside the domain");
    TriangleMesh mesh = triangulate(*domain_, decomposition, options.h);
    if (options.grading_levels > 0) mesh = graded_refine_toward(mesh, std::span<const Vec2>(poles_), options.grading_levels);
    space_ = std::make_shared<FESpace>(std::make_shared<TriangleMesh>(std::move(mesh)));
    problem_ = std::make_unique<StokesProblem>(space_);
}

GreenFunction::GreenFunction(std::shared_ptr<const FESpace> space, const PolygonalDomain& domain,
                             std::vector<Vec2> poles, double mollifier_factor)
    : domain_(&domain), space_(std::move(space)), problem_(std::make_unique<StokesProblem>(space_)),
      poles_(std::move(poles)), mollifier_factor_(mollifier_factor) {
    if (poles_.empty()) throw InvalidInput("Green function needs at least one pole");
}

double GreenFunction::local_h(std::size_t pole) const { return space_->locator().local_h(poles_.at(pole)); }

double GreenFunction::mollifier_radius(std::size_t pole) const { return mollifier_factor_ * local_h(pole); }

const GreenColumn& GreenFunction::column(std::size_t pole, int alpha) const {
    const auto key = std::pair{pole, alpha};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    GreenColumn col = build_green_column(*problem_, *domain_, poles_.at(pole), alpha, mollifier_radius(pole));
    return cache_.emplace(key, std::move(col)).first->second;
}

Mat2 GreenFunction::evaluate(std::size_t pole, const Vec2& y) const {
    Mat2 g;
    for (int a = 0; a < 2; ++a) g.row(a) = column(pole, a).G.value(y).transpose();
    return g;
}

Vec2 GreenFunction::evaluate_pressure(std::size_t pole, const Vec2& y) const {
    return {column(pole, 0).Pi.value(y), column(pole, 1).Pi.value(y)};
}

std::pair<double, double> GreenFunction::symmetry_defect(std::size_t x_pole, std::size_t y_pole) const {
    if (x_pole == y_pole || (poles_.at(x_pole) - poles_.at(y_pole)).norm() == 0.0)
        throw InvalidInput("symmetry probe needs two distinct poles");
    const Mat2 gxy = evaluate(x_pole, poles_[y_pole]);
    const Mat2 gyx = evaluate(y_pole, poles_[x_pole]);
    const double defect = (gxy - gyx.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(gxy.cwiseAbs().maxCoeff(), gyx.cwiseAbs().maxCoeff());
    return {defect, scale > 0.0 ? defect / scale : 0.0};
}

std::vector<Vec2> representation_solve(const GreenFunction& green, const RepresentationData& data) {
    const FESpace& V = green.space();
    const RegionQuadrature quad = domain_quadrature(V);
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < green.poles().size(); ++i) {
        Vec2 u = Vec2::Zero();
        for (int a = 0; a < 2; ++a) {
            const GreenColumn& col = green.column(i, a);
            double s = 0.0;
            for (std::size_t k = 0; k < quad.size(); ++k) {
                const Vec2& y = quad.point[k];
                Vec2 load = Vec2::Zero();
                if (data.body_force) load += data.body_force(y);
                if (data.divergence_gradient) load -= data.divergence_gradient(y);
                double term = col.G.value(quad.triangle[k], quad.bary[k]).dot(load);
                if (data.divergence) term += col.Pi.value(quad.triangle[k], quad.bary[k]) * data.divergence(y);
                s += quad.weight[k] * term;
            }
            if (data.traction) {
                const auto line = line_rule_degree5();
                const TriangleMesh& mesh = V.mesh();
                for (std::size_t b = 0; b < mesh.boundary_edges().size(); ++b) {
                    const BoundaryEdge& e = mesh.boundary_edges()[b];
                    if (e.label != BoundaryLabel::Neumann) continue;
                    const Vec2 pa = mesh.nodes()[static_cast<std::size_t>(e.nodes[0])];
                    const Vec2 pb = mesh.nodes()[static_cast<std::size_t>(e.nodes[1])];
                    const double len = (pb - pa).norm();
                    const Vec2 normal = Vec2(pb.y() - pa.y(), pa.x() - pb.x()) / len;
                    const auto& c = col.G.coefficients();
                    const auto value = [&c](Index n) { return Vec2(c[2 * n], c[2 * n + 1]); };
                    const Vec2 g0 = value(e.nodes[0]), g1 = value(e.nodes[1]), gm = value(V.boundary_edge_node(b));
                    for (std::size_t q = 0; q < line.points.size(); ++q) {
                        const double t = line.points[q];
                        const Vec2 y = (1.0 - t) * pa + t * pb;
                        const Vec2 g = (1.0 - t) * (1.0 - 2.0 * t) * g0 + t * (2.0 * t - 1.0) * g1 + 4.0 * t * (1.0 - t) * gm;
                        s += line.weights[q] * len * g.dot(data.traction(y, normal));
                    }
                }
            }
            u[a] = s;
        }
        out.push_back(u);
    }
    return out;
}

std::vector<Vec2> probe_points(const PolygonalDomain& domain, const Vec2& x, std::span<const double> radii,
                               int directions) {
    if (directions < 1) throw InvalidInput("probe directions must be positive");
    std::vector<Vec2> out;
    for (const double r : radii) {
        for (int k = 0; k < directions; ++k) {
            const double theta = 2.0 * kPi * k / directions;
            const Vec2 y = x + r * Vec2(std::cos(theta), std::sin(theta));
            if (domain.contains(y)) out.push_back(y);
        }
    }
    return out;
}

std::vector<GreenSample> sample_green(const GreenFunction& green, std::size_t pole, std::span<const Vec2> points) {
    std::vector<GreenSample> out;
    const Vec2 x = green.poles().at(pole);
    for (const Vec2& y : points)
        out.push_back({x, y, green.evaluate(pole, y), green.evaluate_pressure(pole, y), (y - x).norm()});
    return out;
}

GreenLorentzNorms green_weak_norms(const GreenFunction& green, std::size_t pole) {
    const RegionQuadrature quad = domain_quadrature(green.space());
    const GreenColumn& c0 = green.column(pole, 0);
    const GreenColumn& c1 = green.column(pole, 1);
    WeightedSamples grad{std::vector<double>(quad.size()), quad.weight};
    WeightedSamples pres{std::vector<double>(quad.size()), quad.weight};
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const Mat2 g0 = c0.G.gradient(quad.triangle[k], quad.bary[k]);
        const Mat2 g1 = c1.G.gradient(quad.triangle[k], quad.bary[k]);
        grad.values[k] = std::sqrt(g0.squaredNorm() + g1.squaredNorm());
        pres.values[k] = std::hypot(c0.Pi.value(quad.triangle[k], quad.bary[k]), c1.Pi.value(quad.triangle[k], quad.bary[k]));
    }
    return {weak_lebesgue_norm(grad, 2.0), weak_lebesgue_norm(pres, 2.0)};
}

double green_gradient_away(const GreenFunction& green, std::size_t pole, double q, double rho) {
    if (!(q >= 1.0)) throw InvalidInput("integrability exponent must be at least 1");
    const LocalDomain excluded = local_domain(green.domain(), green.poles().at(pole), rho);
    const RegionQuadrature quad = domain_quadrature(green.space());
    const GreenColumn& c0 = green.column(pole, 0);
    const GreenColumn& c1 = green.column(pole, 1);
    double s = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        if (excluded.contains(quad.point[k])) continue;
        const Mat2 g0 = c0.G.gradient(quad.triangle[k], quad.bary[k]);
        const Mat2 g1 = c1.G.gradient(quad.triangle[k], quad.bary[k]);
        s += quad.weight[k] * std::pow(std::sqrt(g0.squaredNorm() + g1.squaredNorm()), q);
    }
    return std::pow(s, 1.0 / q);
}

}  // namespace mixedgreen
