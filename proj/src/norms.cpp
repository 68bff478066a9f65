#include "mixedgreen/norms.hpp"

#include "mixedgreen/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mixedgreen {

namespace {

enum class Cover : std::uint8_t { Inside, Outside, Cut };
using Bary = std::array<double, 3>;
using Classifier = std::function<Cover(const std::array<Vec2, 3>&)>;

void add_rule(RegionQuadrature& q, Index t, const ElementGeometry& g, const std::array<Bary, 3>& sub, double area,
              const std::function<bool(const Vec2&)>* keep) {
    const TriangleQuadrature rule = triangle_rule_degree4();
    for (std::size_t k = 0; k < rule.weights.size(); ++k) {
        const Bary& r = rule.points[k];
        Bary b{};
        for (int i = 0; i < 3; ++i) {
            b[static_cast<std::size_t>(i)] = r[0] * sub[0][static_cast<std::size_t>(i)] +
                                             r[1] * sub[1][static_cast<std::size_t>(i)] +
                                             r[2] * sub[2][static_cast<std::size_t>(i)];
        }
        const Vec2 x = g.point(b);
        if (keep != nullptr && !(*keep)(x)) continue;
        q.triangle.push_back(t);
        q.bary.push_back(b);
        q.point.push_back(x);
        q.weight.push_back(rule.weights[k] * area);
    }
}

Bary midpoint(const Bary& a, const Bary& b) { return {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2}; }

void cover_triangle(RegionQuadrature& q, Index t, const ElementGeometry& g, const std::array<Bary, 3>& sub,
                    double area, int depth, const Classifier& classify, const std::function<bool(const Vec2&)>& inside) {
    const std::array<Vec2, 3> corners{g.point(sub[0]), g.point(sub[1]), g.point(sub[2])};
    const Cover c = classify(corners);
    if (c == Cover::Outside) return;
    if (c == Cover::Inside) {
        add_rule(q, t, g, sub, area, nullptr);
        return;
    }
    if (depth == 0) {
        add_rule(q, t, g, sub, area, &inside);
        return;
    }
    const Bary m01 = midpoint(sub[0], sub[1]);
    const Bary m12 = midpoint(sub[1], sub[2]);
    const Bary m20 = midpoint(sub[2], sub[0]);
    const double a = area / 4;
    cover_triangle(q, t, g, {sub[0], m01, m20}, a, depth - 1, classify, inside);
    cover_triangle(q, t, g, {m01, sub[1], m12}, a, depth - 1, classify, inside);
    cover_triangle(q, t, g, {m20, m12, sub[2]}, a, depth - 1, classify, inside);
    cover_triangle(q, t, g, {m01, m12, m20}, a, depth - 1, classify, inside);
}

RegionQuadrature cover(const FESpace& space, const Vec2& lo, const Vec2& hi, int depth, const Classifier& classify,
                       const std::function<bool(const Vec2&)>& inside) {
    if (depth < 0) throw InvalidInput("region quadrature depth must be non-negative");
    RegionQuadrature q;
    std::vector<Index> tris = space.locator().candidates(lo, hi);
    std::sort(tris.begin(), tris.end());
    const std::array<Bary, 3> whole{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}};
    for (const Index t : tris) {
        const ElementGeometry g = space.geometry(t);
        cover_triangle(q, t, g, whole, g.area, depth, classify, inside);
    }
    return q;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    const double s = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (a + s * d - p).norm();
}

double triangle_distance(const Vec2& p, const std::array<Vec2, 3>& c) {
    const double d0 = cross(c[1] - c[0], p - c[0]);
    const double d1 = cross(c[2] - c[1], p - c[1]);
    const double d2 = cross(c[0] - c[2], p - c[2]);
    if ((d0 >= 0 && d1 >= 0 && d2 >= 0) || (d0 <= 0 && d1 <= 0 && d2 <= 0)) return 0.0;
    return std::min({segment_distance(p, c[0], c[1]), segment_distance(p, c[1], c[2]),
                     segment_distance(p, c[2], c[0])});
}

}  // namespace

double RegionQuadrature::measure() const { return std::accumulate(weight.begin(), weight.end(), 0.0); }

RegionQuadrature domain_quadrature(const FESpace& space) {
    RegionQuadrature q;
    const std::array<Bary, 3> whole{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}};
    for (Index t = 0; t < space.mesh().num_triangles(); ++t) {
        const ElementGeometry g = space.geometry(t);
        add_rule(q, t, g, whole, g.area, nullptr);
    }
    return q;
}

RegionQuadrature region_quadrature(const FESpace& space, const LocalDomain& region, int depth) {
    const auto box = region.bounding_box();
    const auto inside = [&region](const Vec2& y) { return region.contains(y); };
    if (region.kind() == LocalDomainKind::InteriorDisk) {
        const Vec2 c = region.center();
        const double r = region.radius();
        const Classifier classify = [c, r](const std::array<Vec2, 3>& tri) {
            if ((tri[0] - c).norm() <= r && (tri[1] - c).norm() <= r && (tri[2] - c).norm() <= r) {
                return Cover::Inside;
            }
            return triangle_distance(c, tri) >= r ? Cover::Outside : Cover::Cut;
        };
        return cover(space, box[0], box[1], depth, classify, inside);
    }
    // Cylinder: mesh triangles lie in Ω, so only the box in the local frame matters.
    const Frame frame = region.frame();
    const double r = region.radius();
    const double height = r * region.domain().cylinder_aspect();
    const Classifier classify = [frame, r, height](const std::array<Vec2, 3>& tri) {
        std::array<Vec2, 3> l{frame.to_local(tri[0]), frame.to_local(tri[1]), frame.to_local(tri[2])};
        bool all_in = true;
        for (const Vec2& v : l) all_in = all_in && std::abs(v.x()) <= r && std::abs(v.y()) <= height;
        if (all_in) return Cover::Inside;
        const auto all = [&l](auto pred) { return pred(l[0]) && pred(l[1]) && pred(l[2]); };
        if (all([r](const Vec2& v) { return v.x() >= r; }) || all([r](const Vec2& v) { return v.x() <= -r; }) ||
            all([height](const Vec2& v) { return v.y() >= height; }) ||
            all([height](const Vec2& v) { return v.y() <= -height; })) {
            return Cover::Outside;
        }
        return Cover::Cut;
    };
    return cover(space, box[0], box[1], depth, classify, inside);
}

RegionQuadrature region_quadrature(const FESpace& space, const std::function<bool(const Vec2&)>& inside,
                                   const Vec2& lo, const Vec2& hi, int depth) {
    const Classifier classify = [&inside](const std::array<Vec2, 3>& tri) {
        const Vec2 centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
        const int n = int(inside(tri[0])) + int(inside(tri[1])) + int(inside(tri[2])) + int(inside(centroid));
        if (n == 4) return Cover::Inside;
        if (n == 0) return Cover::Outside;
        return Cover::Cut;
    };
    return cover(space, lo, hi, depth, classify, inside);
}

double WeightedSamples::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double lorentz_norm(const WeightedSamples& samples, double q, double r) {
    if (!(q > 1.0) || !std::isfinite(q)) throw InvalidInput("Lorentz exponent q must lie in (1, inf)");
    if (!(r >= 1.0)) throw InvalidInput("Lorentz exponent r must lie in [1, inf]");
    if (samples.values.size() != samples.weights.size()) throw InvalidInput("sample values and weights differ in size");
    std::vector<std::size_t> order(samples.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!std::isfinite(samples.values[i]) || !(samples.weights[i] >= 0.0)) {
            throw InvalidInput("samples must be finite with non-negative weights");
        }
    }
    std::sort(order.begin(), order.end(), [&samples](std::size_t a, std::size_t b) {
        return std::abs(samples.values[a]) > std::abs(samples.values[b]);
    });
    double cumulative = 0.0;
    double result = 0.0;
    if (std::isinf(r)) {
        for (const std::size_t i : order) {
            cumulative += samples.weights[i];
            result = std::max(result, std::abs(samples.values[i]) * std::pow(cumulative, 1.0 / q));
        }
        return result;
    }
    const double e = r / q;
    double previous = 0.0;
    for (const std::size_t i : order) {
        cumulative += samples.weights[i];
        const double now = std::pow(cumulative, e);
        result += std::pow(std::abs(samples.values[i]), r) * (now - previous);
        previous = now;
    }
    return std::pow(result / e, 1.0 / r);
}

double lorentz_holder_ratio(const WeightedSamples& f, const WeightedSamples& g, double q0, double r0, double q1,
                            double r1) {
    const auto inv = [](double s) { return std::isinf(s) ? 0.0 : 1.0 / s; };
    if (std::abs(inv(q0) + inv(q1) - 1.0) > 1e-12 || std::abs(inv(r0) + inv(r1) - 1.0) > 1e-12) {
        throw InvalidInput("Lorentz exponents are not conjugate");
    }
    if (f.values.size() != g.values.size() || f.weights != g.weights) {
        throw InvalidInput("Holder samples must share quadrature nodes");
    }
    double integral = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) integral += std::abs(f.values[i] * g.values[i]) * f.weights[i];
    const double denom = lorentz_norm(f, q0, r0) * lorentz_norm(g, q1, r1);
    if (denom == 0.0) return 0.0;
    return integral / denom;
}

double integrate(const VelocityField& u, const RegionQuadrature& quad,
                 const std::function<double(const Vec2&, const Mat2&)>& integrand) {
    double s = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        s += quad.weight[k] * integrand(u.value(quad.triangle[k], quad.bary[k]), u.gradient(quad.triangle[k], quad.bary[k]));
    }
    return s;
}

SobolevSeminorms sobolev_seminorms(const VelocityField& u, double R0) {
    if (!(R0 > 0.0)) throw InvalidInput("scale R0 must be positive");
    const RegionQuadrature quad = domain_quadrature(u.space());
    double l2 = 0, grad = 0, sym = 0, anti = 0, div = 0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const Vec2 v = u.value(quad.triangle[k], quad.bary[k]);
        const Mat2 g = u.gradient(quad.triangle[k], quad.bary[k]);
        const Mat2 e = 0.5 * (g + g.transpose());
        const double w = 0.5 * (g(0, 1) - g(1, 0));
        l2 += quad.weight[k] * v.squaredNorm();
        grad += quad.weight[k] * g.squaredNorm();
        sym += quad.weight[k] * e.squaredNorm();
        anti += quad.weight[k] * w * w;
        div += quad.weight[k] * g.trace() * g.trace();
    }
    SobolevSeminorms s;
    s.l2 = std::sqrt(l2);
    s.grad_l2 = std::sqrt(grad);
    s.sym_grad_l2 = std::sqrt(sym);
    s.antisym_l2 = std::sqrt(anti);
    s.div_l2 = std::sqrt(div);
    s.scaled_h1 = std::sqrt(l2 / (R0 * R0) + grad);
    return s;
}

double l2_norm(const PressureField& p) {
    const RegionQuadrature quad = domain_quadrature(p.space());
    double s = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const double v = p.value(quad.triangle[k], quad.bary[k]);
        s += quad.weight[k] * v * v;
    }
    return std::sqrt(s);
}

WeightedSamples velocity_magnitude_samples(const VelocityField& u, const RegionQuadrature& quad) {
    WeightedSamples s{std::vector<double>(quad.size()), quad.weight};
    for (std::size_t k = 0; k < quad.size(); ++k) s.values[k] = u.value(quad.triangle[k], quad.bary[k]).norm();
    return s;
}

WeightedSamples gradient_magnitude_samples(const VelocityField& u, const RegionQuadrature& quad) {
    WeightedSamples s{std::vector<double>(quad.size()), quad.weight};
    for (std::size_t k = 0; k < quad.size(); ++k) s.values[k] = u.gradient(quad.triangle[k], quad.bary[k]).norm();
    return s;
}

WeightedSamples pressure_magnitude_samples(const PressureField& p, const RegionQuadrature& quad) {
    WeightedSamples s{std::vector<double>(quad.size()), quad.weight};
    for (std::size_t k = 0; k < quad.size(); ++k) s.values[k] = std::abs(p.value(quad.triangle[k], quad.bary[k]));
    return s;
}

}  // namespace mixedgreen
