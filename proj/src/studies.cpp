#include "mixedgreen/studies.hpp"

#include <algorithm>
#include <cmath>

namespace mixedgreen {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("line fit needs at least two matched samples");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidInput("line fit needs two distinct abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

LogBoundSweep log_bound_sweep(const GreenFunction& green, std::size_t pole, int directions, double factor) {
    if (!(factor > 1.0)) throw InvalidInput("radius factor must exceed 1");
    const PolygonalDomain& domain = green.domain();
    const Vec2 x = green.poles().at(pole);
    const double d = domain.diameter();
    const double r_min = 4.0 * std::max(green.local_h(pole), green.mollifier_radius(pole));
    const double r_max = std::min(d / 4.0, domain.distance_to_boundary(x));
    LogBoundSweep sweep;
    std::vector<double> logs;
    for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= factor) {
        const double radius[] = {r};
        const std::vector<Vec2> points = probe_points(domain, x, radius, directions);
        double m = 0.0;
        for (const GreenSample& s : sample_green(green, pole, points)) m = std::max(m, s.G.cwiseAbs().maxCoeff());
        sweep.r.push_back(r);
        sweep.max_G.push_back(m);
        logs.push_back(std::log(d / r));
    }
    if (sweep.r.size() < 2) throw InvalidInput("pole too close to the boundary for a logarithmic sweep");
    sweep.fit = linear_fit(logs, sweep.max_G);
    return sweep;
}

std::vector<Vec2> default_probes(const GreenFunction& green, std::size_t pole, int directions) {
    const double r_min = 4.0 * std::max(green.local_h(pole), green.mollifier_radius(pole));
    std::vector<double> radii;
    for (double r = std::exp2(std::floor(std::log2(green.domain().diameter() / 2.0))); r >= r_min; r /= 2.0)
        radii.push_back(r);
    return probe_points(green.domain(), green.poles().at(pole), radii, directions);
}

RepresentationComparison representation_check(const GreenFunction& green, RepresentationLoad load,
                                              const Vec2& center) {
    const double width = 0.1 * green.domain().diameter();
    const double w2 = width * width;
    const auto bump = [center, w2](const Vec2& y) { return std::exp(-(y - center).squaredNorm() / w2); };
    RepresentationData data;
    Loads loads;
    if (load == RepresentationLoad::BodyForce) {
        data.body_force = [bump](const Vec2& y) { return Vec2(bump(y), -0.5 * bump(y)); };
        loads.body_force = data.body_force;
    } else {
        data.divergence = bump;
        data.divergence_gradient = [bump, center, w2](const Vec2& y) -> Vec2 {
            return -2.0 / w2 * bump(y) * (y - center);
        };
        loads.divergence = data.divergence;
        loads.divergence_gradient = data.divergence_gradient;
    }
    const StokesSolution direct = green.problem().solve(loads);
    RepresentationComparison c;
    c.represented = representation_solve(green, data);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < green.poles().size(); ++i) {
        c.direct.push_back(direct.u.value(green.poles()[i]));
        num += (c.represented[i] - c.direct[i]).squaredNorm();
        den += c.direct[i].squaredNorm();
    }
    c.relative_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return c;
}

std::vector<Vec2> sweep_centers(const PolygonalDomain& domain, double spacing, double rho,
                                const std::optional<Exclusion>& exclusion) {
    if (!(spacing > 0.0)) throw InvalidInput("sweep spacing must be positive");
    const auto box = domain.bounding_box();
    std::vector<Vec2> out;
    for (double y = box[0].y() + spacing / 2; y < box[1].y(); y += spacing) {
        for (double x = box[0].x() + spacing / 2; x < box[1].x(); x += spacing) {
            const Vec2 c(x, y);
            if (!domain.contains(c) || domain.distance_to_boundary(c) <= 0.0) continue;
            if (exclusion && exclusion->meets(local_domain(domain, c, rho).scaled(2.0))) continue;
            out.push_back(c);
        }
    }
    return out;
}

Exclusion pole_exclusion(const GreenFunction& green, std::size_t pole) {
    return {green.poles().at(pole), 4.0 * std::max(green.local_h(pole), green.mollifier_radius(pole))};
}

}  // namespace mixedgreen
