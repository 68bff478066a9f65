#include "mixedgreen/verifiers.hpp"

#include "mixedgreen/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mixedgreen {

namespace {

constexpr double kKornTolerance = 1e-8;
constexpr Index kKornMaxSteps = 500;
constexpr double kHolderOctaves = 5.0;
constexpr double kRoundoffIncrement = 1e-12;

struct RegionAverages {
    double measure = 0.0;
    Vec2 mean = Vec2::Zero();
};

RegionAverages averages(const VelocityField& u, const RegionQuadrature& quad) {
    RegionAverages a;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        a.measure += quad.weight[k];
        a.mean += quad.weight[k] * u.value(quad.triangle[k], quad.bary[k]);
    }
    if (a.measure > 0.0) a.mean /= a.measure;
    return a;
}

double average_magnitude(const VelocityField& u, const RegionQuadrature& quad) {
    double s = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) s += quad.weight[k] * u.value(quad.triangle[k], quad.bary[k]).norm();
    return s / quad.measure();
}

double safe_ratio(double lhs, double rhs) {
    if (lhs == 0.0) return 0.0;
    return rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
}

void check_exclusion(const LocalDomain& region, const std::optional<Exclusion>& exclusion) {
    if (exclusion && exclusion->meets(region)) throw InvalidInput("local domain meets the excluded pole neighborhood");
}

}  // namespace

bool Exclusion::meets(const LocalDomain& region) const {
    const auto box = region.bounding_box();
    const Vec2 nearest = center.cwiseMax(box[0]).cwiseMin(box[1]);
    return (nearest - center).norm() <= radius;
}

KornReport korn_constant(const StokesProblem& problem) {
    const FESpace& V = problem.space();
    KornReport r;
    if (V.num_dirichlet_nodes() == 0) {
        const VelocityField w =
            VelocityField::interpolate(problem.space_ptr(), [](const Vec2& y) { return Vec2(-y.y(), y.x()); });
        const Vector& c = w.coefficients();
        const double a = c.dot(problem.stiffness() * c);
        const double g = c.dot(problem.gradient_stiffness() * c);
        r.rigid_witness = a / (2.0 * g);
        r.constant = *r.rigid_witness;
        r.hypothesis_ok = false;
        return r;
    }
    const SparseMatrix A = problem.restrict_free(problem.stiffness());
    const SparseMatrix G2 = 2.0 * problem.restrict_free(problem.gradient_stiffness());
    r.constant = smallest_pencil_eigenvalue([&A](const Vector& x) -> Vector { return A * x; }, G2, {}, kKornMaxSteps,
                                            kKornTolerance);
    r.hypothesis_ok = r.constant > kKornTolerance;

    const SparseCholesky chol(problem.restrict_free(problem.gradient_stiffness()));
    const SparseMatrix Bf = problem.divergence_free_columns();
    const SparseMatrix BfT = Bf.transpose();
    const double beta2 = smallest_pencil_eigenvalue(
        [&](const Vector& x) -> Vector { return Bf * chol.solve(BfT * x); }, problem.pressure_mass(), {},
        kKornMaxSteps, kKornTolerance);
    r.dual_C = 1.0 / std::sqrt(std::max(beta2, 1e-300));
    r.dual_constant = 1.0 / (1.0 + 2.0 * r.dual_C * r.dual_C);
    return r;
}

double SweepReport::worst() const {
    double w = 0.0;
    for (const SweepEntry& e : entries) w = std::max(w, e.ratio);
    return w;
}

double SweepReport::worst_at(double radius) const {
    double w = 0.0;
    for (const SweepEntry& e : entries)
        if (std::abs(e.radius - radius) <= 1e-12 * radius) w = std::max(w, e.ratio);
    return w;
}

SweepReport poincare_sobolev_check(const VelocityField& u, const BoundaryDecomposition& decomposition,
                                   std::span<const Vec2> centers, std::span<const double> radii, double q) {
    if (!(q >= 1.0 && q < 2.0)) throw InvalidInput("Poincaré–Sobolev exponent must lie in [1, 2)");
    const PolygonalDomain& domain = decomposition.domain();
    const double q_star = 2.0 * q / (2.0 - q);
    SweepReport report;
    for (const double r : radii) {
        if (2.0 * r > domain.scale_R0()) throw InvalidInput("doubled radius exceeds the scale R0");
        for (const Vec2& x : centers) {
            const LocalDomain inner = local_domain(domain, x, r);
            const LocalDomain outer = inner.scaled(2.0);
            const RegionQuadrature qi = region_quadrature(u.space(), inner);
            const RegionQuadrature qo = region_quadrature(u.space(), outer);
            if (qi.size() == 0 || qo.size() == 0) continue;
            const RegionAverages a = averages(u, qi);
            const Vec2 ubar = inner.touches_dirichlet(decomposition) ? Vec2::Zero() : a.mean;
            double lhs = 0.0;
            for (std::size_t k = 0; k < qi.size(); ++k)
                lhs += qi.weight[k] * std::pow((u.value(qi.triangle[k], qi.bary[k]) - ubar).norm(), q_star);
            lhs = std::pow(lhs / a.measure, 1.0 / q_star);
            double rhs = 0.0;
            for (std::size_t k = 0; k < qo.size(); ++k)
                rhs += qo.weight[k] * std::pow(u.gradient(qo.triangle[k], qo.bary[k]).norm(), q);
            rhs = r * std::pow(rhs / qo.measure(), 1.0 / q);
            report.entries.push_back({x, r, lhs, rhs, safe_ratio(lhs, rhs)});
        }
    }
    return report;
}

SweepReport caccioppoli_check(const VelocityField& u, const PolygonalDomain& domain, std::span<const Vec2> centers,
                              std::span<const double> radii, std::optional<Exclusion> exclusion) {
    SweepReport report;
    for (const double rho : radii) {
        for (const Vec2& x : centers) {
            const LocalDomain inner = local_domain(domain, x, rho);
            const LocalDomain outer = inner.scaled(2.0);
            check_exclusion(outer, exclusion);
            const RegionQuadrature qi = region_quadrature(u.space(), inner);
            const RegionQuadrature qo = region_quadrature(u.space(), outer);
            if (qi.size() == 0 || qo.size() == 0) continue;
            double grad = 0.0;
            for (std::size_t k = 0; k < qi.size(); ++k)
                grad += qi.weight[k] * u.gradient(qi.triangle[k], qi.bary[k]).squaredNorm();
            const double lhs = rho * std::sqrt(grad / qi.measure());
            const double rhs = average_magnitude(u, qo);
            report.entries.push_back({x, rho, lhs, rhs, safe_ratio(lhs, rhs)});
        }
    }
    return report;
}

HolderReport local_holder_check(const VelocityField& u, const PolygonalDomain& domain, std::span<const Vec2> centers,
                                double rho, std::size_t pairs_per_center, std::uint64_t seed,
                                std::optional<Exclusion> exclusion) {
    if (!(rho > 0.0)) throw InvalidInput("Hölder radius must be positive");
    HolderReport report;
    report.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit;
    std::vector<std::pair<double, double>> samples;
    for (const Vec2& x : centers) {
        const LocalDomain inner = local_domain(domain, x, rho);
        const LocalDomain outer = inner.scaled(2.0);
        check_exclusion(outer, exclusion);
        const RegionQuadrature qi = region_quadrature(u.space(), inner);
        const RegionQuadrature qo = region_quadrature(u.space(), outer);
        if (qi.size() < 2 || qo.size() == 0) continue;
        const double A = average_magnitude(u, qo);
        if (!(A > 0.0)) continue;
        report.mvt_constant = std::max(report.mvt_constant, u.value(x).norm() / A);
        std::uniform_int_distribution<std::size_t> pick(0, qi.size() - 1);
        for (std::size_t s = 0, tries = 0; s < pairs_per_center && tries < 20 * pairs_per_center; ++tries) {
            // Separations log-uniform in [ρ/32, ρ] so every scale is represented.
            const std::size_t i = pick(rng);
            const double t = std::exp2(-kHolderOctaves * unit(rng));
            const double theta = 2.0 * kPi * unit(rng);
            const Vec2 z = qi.point[i] + t * rho * Vec2(std::cos(theta), std::sin(theta));
            if (!inner.contains(z) || !domain.contains(z)) continue;
            const double Q = (u.value(z) - u.value(qi.triangle[i], qi.bary[i])).norm() / A;
            samples.emplace_back(t, Q);
            ++report.pairs;
            ++s;
        }
    }
    // Least squares of log Q on log t over all pairs with a resolvable increment.
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [t, Q] : samples) {
        if (!(Q > kRoundoffIncrement)) continue;
        const double lx = std::log(t);
        const double ly = std::log(Q);
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const bool fitted = n >= 2 && n * sxx - sx * sx > 0.0 && n >= 0.5 * static_cast<double>(samples.size());
    report.gamma = fitted ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 1.0;
    if (!fitted) return report;
    for (const auto& [t, Q] : samples) report.constant = std::max(report.constant, Q / std::pow(t, report.gamma));
    return report;
}

double distance_to_dirichlet(const BoundaryDecomposition& decomposition, const Vec2& y) {
    const PolygonalDomain& domain = decomposition.domain();
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < domain.num_edges(); ++e)
        for (const auto& iv : decomposition.dirichlet_intervals(e))
            d = std::min(d, point_segment_distance(y, domain.edge_point(e, iv[0]), domain.edge_point(e, iv[1])));
    return d;
}

VelocityField smooth_random_field(std::shared_ptr<const FESpace> space, const BoundaryDecomposition& decomposition,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::array<double, 12> a{};
    for (double& c : a) c = normal(rng);
    const bool has_d = decomposition.has_dirichlet();
    return VelocityField::interpolate(std::move(space), [&](const Vec2& y) -> Vec2 {
        const double w = has_d ? distance_to_dirichlet(decomposition, y) : 1.0;
        return Vec2(a[0] + a[1] * std::sin(kPi * y.x()) + a[2] * std::cos(2 * kPi * y.y()) + a[3] * y.x() * y.y() +
                        a[4] * std::sin(3 * y.x() + 2 * y.y()) + a[5] * y.y(),
                    a[6] + a[7] * std::cos(kPi * y.y()) + a[8] * std::sin(2 * kPi * y.x()) + a[9] * y.x() * y.x() +
                        a[10] * std::cos(2 * y.x() - 3 * y.y()) + a[11] * y.x()) *
               w;
    });
}

VelocityField random_field(std::shared_ptr<const FESpace> space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector c(space->num_velocity_dofs());
    for (Index n = 0; n < space->num_velocity_nodes(); ++n) {
        const bool fixed = space->dirichlet_node(n);
        c[2 * n] = fixed ? 0.0 : normal(rng);
        c[2 * n + 1] = fixed ? 0.0 : normal(rng);
    }
    return {std::move(space), std::move(c)};
}

}  // namespace mixedgreen
