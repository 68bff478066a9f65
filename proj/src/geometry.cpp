#include "mixedgreen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixedgreen {

namespace {

constexpr double kParamTol = 1e-12;

Vec2 left_normal(const Vec2& t) { return {-t.y(), t.x()}; }

double orientation(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
    const double d1 = orientation(c, d, a);
    const double d2 = orientation(c, d, b);
    const double d3 = orientation(a, b, c);
    const double d4 = orientation(a, b, d);
    if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
        return true;
    const double scale = std::max({(b - a).norm(), (d - c).norm(), 1e-300});
    return point_segment_distance(a, c, d) <= tol / scale || point_segment_distance(b, c, d) <= tol / scale ||
           point_segment_distance(c, a, b) <= tol / scale || point_segment_distance(d, a, b) <= tol / scale;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    if (segments_intersect(a, b, c, d, 0.0)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

double angle_at(const Vec2& prev, const Vec2& v, const Vec2& next) {
    const Vec2 in = v - prev;
    const Vec2 out = next - v;
    const double turn = std::atan2(cross(in, out), in.dot(out));
    return kPi - turn;
}

std::vector<Vec2> clip_half_plane(std::span<const Vec2> poly, const Vec2& a, const Vec2& b) {
    // Keeps the part left of a→b.
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    auto side = [&](const Vec2& p) { return cross(b - a, p - a); };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double sp = side(p);
        const double sq = side(q);
        if (sp >= 0.0) out.push_back(p);
        if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
    return out;
}

using IntervalList = std::vector<std::array<double, 2>>;

void add_closed(IntervalList& list, double a, double b) {
    list.push_back({a, b});
    std::sort(list.begin(), list.end());
    IntervalList merged;
    for (const auto& iv : list) {
        if (!merged.empty() && iv[0] <= merged.back()[1] + kParamTol)
            merged.back()[1] = std::max(merged.back()[1], iv[1]);
        else
            merged.push_back(iv);
    }
    list = std::move(merged);
}

void remove_closed(IntervalList& list, double a, double b) {
    // Removes [a, b] and closes what remains, so transition points stay in D.
    IntervalList out;
    for (const auto& [c, d] : list) {
        if (c < a - kParamTol) out.push_back({c, std::min(d, a)});
        if (d > b + kParamTol) out.push_back({std::max(c, b), d});
        if (c >= a - kParamTol && d <= b + kParamTol) continue;
    }
    list = std::move(out);
}

bool interval_contains(const IntervalList& list, double t) {
    return std::any_of(list.begin(), list.end(),
                       [&](const auto& iv) { return t >= iv[0] - kParamTol && t <= iv[1] + kParamTol; });
}

}  // namespace

char label_char(BoundaryLabel label) { return label == BoundaryLabel::Dirichlet ? 'D' : 'N'; }

// -- polygon utilities -------------------------------------------------------

double signed_area(std::span<const Vec2> polygon) {
    double a = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
    return 0.5 * a;
}

bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

std::vector<Vec2> clip_polygon(std::span<const Vec2> subject, std::span<const Vec2> convex_clip) {
    std::vector<Vec2> out(subject.begin(), subject.end());
    for (std::size_t i = 0; i < convex_clip.size() && !out.empty(); ++i)
        out = clip_half_plane(out, convex_clip[i], convex_clip[(i + 1) % convex_clip.size()]);
    return out;
}

std::optional<std::array<double, 2>> clip_segment_to_box(const Frame& frame, double half_width, double half_height,
                                                         const Vec2& a, const Vec2& b) {
    const Vec2 la = frame.to_local(a);
    const Vec2 d = frame.to_local(b) - la;
    double s0 = 0.0;
    double s1 = 1.0;
    auto clip = [&](double p, double q) {
        // Constraint p·s ≤ q.
        if (p == 0.0) return q >= 0.0;
        const double r = q / p;
        if (p < 0.0)
            s0 = std::max(s0, r);
        else
            s1 = std::min(s1, r);
        return true;
    };
    if (!clip(-d.x(), la.x() + half_width) || !clip(d.x(), half_width - la.x()) ||
        !clip(-d.y(), la.y() + half_height) || !clip(d.y(), half_height - la.y()))
        return std::nullopt;
    if (s0 > s1) return std::nullopt;
    return std::array<double, 2>{s0, s1};
}

// -- Lipschitz character -----------------------------------------------------

LipschitzCharacter estimate_lipschitz_character(std::span<const Vec2> v) {
    const std::size_t n = v.size();
    if (n < 3) throw InvalidInput("polygon needs at least 3 vertices");
    for (const auto& p : v)
        if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw InvalidInput("non-finite vertex coordinate");
    if (signed_area(v) <= 0.0) throw InvalidInput("polygon must be counterclockwise with positive area");

    double min_edge = std::numeric_limits<double>::infinity();
    double diam = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        min_edge = std::min(min_edge, (v[(i + 1) % n] - v[i]).norm());
        for (std::size_t j = i + 1; j < n; ++j) diam = std::max(diam, (v[i] - v[j]).norm());
    }
    if (min_edge <= 1e-14 * diam) throw InvalidInput("polygon has a zero-length edge");

    double M = 1.0;
    double sharpness = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = angle_at(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        if (theta < 1e-9 || theta > 2.0 * kPi - 1e-9)
            throw InvalidInput("degenerate vertex " + std::to_string(i) + ": interior angle 0 or 2π");
        M = std::max(M, std::abs(1.0 / std::tan(0.5 * theta)));
        const double opening = std::min(theta, 2.0 * kPi - theta);
        if (opening < 0.5 * kPi) sharpness = std::min(sharpness, std::sin(opening));
    }

    double lfs = min_edge;
    const double tol = 1e-12 * diam * diam;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            const Vec2& a = v[i];
            const Vec2& b = v[(i + 1) % n];
            const Vec2& c = v[j];
            const Vec2& d = v[(j + 1) % n];
            if (segments_intersect(a, b, c, d, tol))
                throw InvalidInput("polygon is not simple: edges " + std::to_string(i) + " and " + std::to_string(j) +
                                   " intersect");
            lfs = std::min(lfs, segment_distance(a, b, c, d));
        }
    }
    const double aspect = 4.0 * M + 2.0;
    const double window = 200.0 * std::sqrt(1.0 + aspect * aspect);
    return {M, lfs * sharpness / (2.0 * window)};
}

// -- PolygonalDomain ---------------------------------------------------------

PolygonalDomain::PolygonalDomain(std::vector<Vec2> vertices, std::optional<double> M, std::optional<double> R0)
    : vertices_(std::move(vertices)) {
    estimated_ = estimate_lipschitz_character(vertices_);
    const std::size_t n = vertices_.size();
    double min_edge = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        perimeter_ += edge_length(i);
        min_edge = std::min(min_edge, edge_length(i));
        for (std::size_t j = i + 1; j < n; ++j) diameter_ = std::max(diameter_, (vertices_[i] - vertices_[j]).norm());
    }
    area_ = signed_area(vertices_);

    M_ = estimated_.M;
    if (M) {
        if (!std::isfinite(*M) || *M < estimated_.M - 1e-12)
            throw InvalidInput("M must be finite and at least the graph constant " + std::to_string(estimated_.M));
        M_ = *M;
    }
    R0_ = estimated_.R0;
    if (R0) {
        if (!std::isfinite(*R0) || *R0 <= 0.0 || *R0 > diameter_) throw InvalidInput("R0 must lie in (0, diameter]");
        R0_ = *R0;
    }
    vertex_zone_ = std::min(R0_ * (4.0 * M_ + 3.0), 0.25 * min_edge);
}

Vec2 PolygonalDomain::outward_normal(std::size_t e) const { return -left_normal(edge_tangent(e)); }

double PolygonalDomain::interior_angle(std::size_t v) const {
    const std::size_t n = vertices_.size();
    return angle_at(vertices_[(v + n - 1) % n], vertices_[v], vertices_[(v + 1) % n]);
}

std::array<Vec2, 2> PolygonalDomain::bounding_box() const {
    Vec2 lo = vertices_.front();
    Vec2 hi = vertices_.front();
    for (const auto& p : vertices_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

bool PolygonalDomain::contains(const Vec2& p) const {
    return point_in_polygon(vertices_, p) || distance_to_boundary(p) <= 1e-12 * diameter_;
}

double PolygonalDomain::distance_to_boundary(const Vec2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < num_edges(); ++e) d = std::min(d, point_segment_distance(p, edge_start(e), edge_end(e)));
    return d;
}

BoundaryPoint PolygonalDomain::closest_boundary_point(const Vec2& p) const {
    BoundaryPoint best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < num_edges(); ++e) {
        const Vec2 ab = edge_end(e) - edge_start(e);
        const double t = std::clamp((p - edge_start(e)).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        const Vec2 q = edge_point(e, t);
        const double d = (p - q).norm();
        if (d < best_d - 1e-15 * diameter_) {
            best_d = d;
            best = {e, t, q};
        }
    }
    return best;
}

Frame PolygonalDomain::vertex_frame(std::size_t v) const {
    const std::size_t n = num_edges();
    const Vec2 bis = inward_normal((v + n - 1) % n) + inward_normal(v);
    if (bis.norm() < 1e-12) throw InvalidInput("degenerate vertex frame");
    Frame f;
    f.origin = vertices_[v];
    f.e2 = bis.normalized();
    f.e1 = {f.e2.y(), -f.e2.x()};
    return f;
}

Frame PolygonalDomain::boundary_frame(const BoundaryPoint& bp) const {
    const double len = edge_length(bp.edge);
    const double d_start = bp.t * len;
    const double d_end = (1.0 - bp.t) * len;
    Frame f;
    if (std::min(d_start, d_end) <= vertex_zone_) {
        const std::size_t v = d_start <= d_end ? bp.edge : (bp.edge + 1) % num_edges();
        f = vertex_frame(v);
    } else {
        f.e1 = edge_tangent(bp.edge);
        f.e2 = inward_normal(bp.edge);
    }
    f.origin = bp.point;
    return f;
}

bool PolygonalDomain::in_cylinder(const Frame& frame, double rho, const Vec2& y) const {
    const Vec2 l = frame.to_local(y);
    return std::abs(l.x()) < rho && std::abs(l.y()) < cylinder_aspect() * rho;
}

std::vector<EdgePiece> PolygonalDomain::clip_boundary(const Frame& frame, double rho) const {
    std::vector<EdgePiece> pieces;
    for (std::size_t e = 0; e < num_edges(); ++e) {
        const auto range = clip_segment_to_box(frame, rho, cylinder_aspect() * rho, edge_start(e), edge_end(e));
        if (range && ((*range)[1] - (*range)[0]) * edge_length(e) > 1e-14 * diameter_)
            pieces.push_back({e, (*range)[0], (*range)[1]});
    }
    return pieces;
}

std::vector<EdgePiece> PolygonalDomain::boundary_interval(const BoundaryPoint& x, double rho) const {
    const Frame frame = boundary_frame(x);
    const std::size_t n = num_edges();
    std::vector<std::optional<EdgePiece>> by_edge(n);
    for (const auto& p : clip_boundary(frame, rho)) by_edge[p.edge] = p;

    // A point at an edge end belongs to both incident edges; start from one that is clipped.
    std::size_t start = x.edge;
    if (!by_edge[start]) {
        if (x.t >= 1.0 - kParamTol && by_edge[(start + 1) % n])
            start = (start + 1) % n;
        else if (x.t <= kParamTol && by_edge[(start + n - 1) % n])
            start = (start + n - 1) % n;
        else
            return {};
    }
    std::vector<EdgePiece> out{*by_edge[start]};
    std::vector<bool> used(n, false);
    used[start] = true;
    for (std::size_t cur = start;;) {
        const std::size_t next = (cur + 1) % n;
        if (by_edge[cur]->t1 < 1.0 - kParamTol || used[next] || !by_edge[next] || by_edge[next]->t0 > kParamTol) break;
        out.push_back(*by_edge[next]);
        used[next] = true;
        cur = next;
    }
    for (std::size_t cur = start;;) {
        const std::size_t prev = (cur + n - 1) % n;
        if (by_edge[cur]->t0 > kParamTol || used[prev] || !by_edge[prev] || by_edge[prev]->t1 < 1.0 - kParamTol) break;
        out.insert(out.begin(), *by_edge[prev]);
        used[prev] = true;
        cur = prev;
    }
    return out;
}

double PolygonalDomain::pieces_length(std::span<const EdgePiece> pieces) const {
    double s = 0.0;
    for (const auto& p : pieces) s += (p.t1 - p.t0) * edge_length(p.edge);
    return s;
}

// -- BoundaryDecomposition ---------------------------------------------------

BoundaryDecomposition::BoundaryDecomposition(const PolygonalDomain& domain, std::span<const LabeledInterval> segments,
                                             BoundaryLabel fill)
    : domain_(&domain), dirichlet_(domain.num_edges()) {
    if (fill == BoundaryLabel::Dirichlet)
        for (auto& list : dirichlet_) list.push_back({0.0, 1.0});
    for (const auto& s : segments) {
        if (s.edge >= domain.num_edges()) throw InvalidInput("boundary segment references edge out of range");
        if (!std::isfinite(s.t0) || !std::isfinite(s.t1) || s.t0 < 0.0 || s.t1 > 1.0 || s.t0 > s.t1)
            throw InvalidInput("boundary segment needs 0 <= t0 <= t1 <= 1");
        if (s.label == BoundaryLabel::Dirichlet)
            add_closed(dirichlet_[s.edge], s.t0, s.t1);
        else
            remove_closed(dirichlet_[s.edge], s.t0, s.t1);
    }
}

BoundaryDecomposition BoundaryDecomposition::uniform(const PolygonalDomain& domain, BoundaryLabel label) {
    return BoundaryDecomposition(domain, std::span<const LabeledInterval>{}, label);
}

BoundaryDecomposition BoundaryDecomposition::from_edges(const PolygonalDomain& domain,
                                                        std::span<const std::size_t> dirichlet_edges) {
    std::vector<LabeledInterval> segs;
    for (auto e : dirichlet_edges) segs.push_back({e, 0.0, 1.0, BoundaryLabel::Dirichlet});
    return BoundaryDecomposition(domain, segs, BoundaryLabel::Neumann);
}

std::vector<std::array<double, 2>> BoundaryDecomposition::neumann_intervals(std::size_t edge) const {
    IntervalList out;
    double start = 0.0;
    for (const auto& [c, d] : dirichlet_[edge]) {
        if (c > start + kParamTol) out.push_back({start, c});
        start = std::max(start, d);
    }
    if (start < 1.0 - kParamTol) out.push_back({start, 1.0});
    return out;
}

BoundaryLabel BoundaryDecomposition::label_at(std::size_t edge, double t) const {
    const std::size_t n = num_edges();
    if (interval_contains(dirichlet_[edge], t)) return BoundaryLabel::Dirichlet;
    if (t <= kParamTol && interval_contains(dirichlet_[(edge + n - 1) % n], 1.0)) return BoundaryLabel::Dirichlet;
    if (t >= 1.0 - kParamTol && interval_contains(dirichlet_[(edge + 1) % n], 0.0)) return BoundaryLabel::Dirichlet;
    return BoundaryLabel::Neumann;
}

bool BoundaryDecomposition::piece_in_dirichlet(const EdgePiece& piece) const {
    return std::any_of(dirichlet_[piece.edge].begin(), dirichlet_[piece.edge].end(), [&](const auto& iv) {
        return piece.t0 >= iv[0] - kParamTol && piece.t1 <= iv[1] + kParamTol;
    });
}

bool BoundaryDecomposition::piece_in_neumann(const EdgePiece& piece) const {
    return std::none_of(dirichlet_[piece.edge].begin(), dirichlet_[piece.edge].end(), [&](const auto& iv) {
        return iv[0] < piece.t1 - kParamTol && iv[1] > piece.t0 + kParamTol;
    });
}

double BoundaryDecomposition::dirichlet_length(const EdgePiece& piece, double edge_length) const {
    double s = 0.0;
    for (const auto& [c, d] : dirichlet_[piece.edge]) s += std::max(0.0, std::min(d, piece.t1) - std::max(c, piece.t0));
    return s * edge_length;
}

bool BoundaryDecomposition::has_dirichlet() const {
    return std::any_of(dirichlet_.begin(), dirichlet_.end(), [](const auto& l) { return !l.empty(); });
}

bool BoundaryDecomposition::has_neumann() const { return neumann_measure() > 0.0; }

double BoundaryDecomposition::dirichlet_measure() const {
    double s = 0.0;
    for (std::size_t e = 0; e < num_edges(); ++e) s += dirichlet_length({e, 0.0, 1.0}, domain_->edge_length(e));
    return s;
}

double BoundaryDecomposition::neumann_measure() const { return domain_->perimeter() - dirichlet_measure(); }

std::vector<BoundaryPoint> BoundaryDecomposition::transition_points() const {
    std::vector<BoundaryPoint> out;
    for (std::size_t e = 0; e < num_edges(); ++e) {
        for (const auto& [c, d] : dirichlet_[e]) {
            for (double t : {c, d}) {
                if (t <= kParamTol || t >= 1.0 - kParamTol) continue;
                if (!out.empty() && out.back().edge == e && std::abs(out.back().t - t) <= kParamTol) continue;
                out.push_back(domain_->boundary_point(e, t));
            }
        }
    }
    return out;
}

BoundaryDecomposition BoundaryDecomposition::swapped() const {
    std::vector<IntervalList> d(num_edges());
    for (std::size_t e = 0; e < num_edges(); ++e) d[e] = neumann_intervals(e);
    return BoundaryDecomposition(*domain_, std::move(d));
}

// -- admissibility checks --------------------------------------------------

std::vector<BoundaryPoint> dirichlet_samples(const BoundaryDecomposition& decomposition) {
    std::vector<BoundaryPoint> out;
    const auto& domain = decomposition.domain();
    for (std::size_t e = 0; e < decomposition.num_edges(); ++e) {
        for (const auto& [c, d] : decomposition.dirichlet_intervals(e)) {
            if (d - c <= kParamTol) {
                out.push_back(domain.boundary_point(e, c));
                continue;
            }
            for (int k = 0; k <= 4; ++k) out.push_back(domain.boundary_point(e, c + 0.25 * k * (d - c)));
        }
    }
    return out;
}

std::vector<double> default_ahlfors_david_scales(const PolygonalDomain& domain) {
    std::vector<double> s;
    for (int k = 1; k <= 8; ++k) s.push_back(domain.scale_R0() * std::ldexp(1.0, -k));
    return s;
}

AhlforsDavidReport ahlfors_david_check(const PolygonalDomain& domain, const BoundaryDecomposition& decomposition,
                                       std::span<const double> scales) {
    if (!decomposition.has_dirichlet()) throw InvalidInput("Ahlfors-David check needs a nonempty D");
    if (scales.empty()) throw InvalidInput("Ahlfors-David check needs at least one scale");
    for (double rho : scales)
        if (!(rho > 0.0) || rho >= domain.scale_R0()) throw InvalidInput("Ahlfors-David scales must lie in (0, R0)");

    AhlforsDavidReport report;
    report.M = domain.lipschitz_M();
    const auto samples = dirichlet_samples(decomposition);
    report.samples = samples.size();
    report.min_ratio = report.min_dirichlet_ratio = std::numeric_limits<double>::infinity();
    report.max_ratio = 0.0;
    for (double rho : scales) {
        AhlforsDavidScale s{rho, std::numeric_limits<double>::infinity(), 0.0, std::numeric_limits<double>::infinity()};
        for (const auto& x : samples) {
            const auto pieces = domain.boundary_interval(x, rho);
            double d_len = 0.0;
            for (const auto& p : pieces) d_len += decomposition.dirichlet_length(p, domain.edge_length(p.edge));
            const double ratio = domain.pieces_length(pieces) / rho;
            s.min_ratio = std::min(s.min_ratio, ratio);
            s.max_ratio = std::max(s.max_ratio, ratio);
            s.min_dirichlet_ratio = std::min(s.min_dirichlet_ratio, d_len / rho);
        }
        report.min_ratio = std::min(report.min_ratio, s.min_ratio);
        report.max_ratio = std::max(report.max_ratio, s.max_ratio);
        report.min_dirichlet_ratio = std::min(report.min_dirichlet_ratio, s.min_dirichlet_ratio);
        report.scales.push_back(s);
    }
    const double lo = 1.0 / report.M;
    report.pass = report.min_ratio >= lo - 1e-12 && report.max_ratio <= report.M + 1e-12 &&
                  report.min_dirichlet_ratio >= lo - 1e-12;
    return report;
}

OpeningWitness find_open_interval(const PolygonalDomain& domain, const BoundaryDecomposition& decomposition,
                                  BoundaryLabel label, double radius) {
    OpeningWitness w;
    w.radius = radius;
    // Candidate order: midpoints first, then the rest of a 1/16 grid of each run.
    static constexpr int kOrder[] = {8, 4, 12, 2, 6, 10, 14, 1, 3, 5, 7, 9, 11, 13, 15, 0, 16};
    for (std::size_t e = 0; e < domain.num_edges(); ++e) {
        const auto runs = label == BoundaryLabel::Dirichlet ? decomposition.dirichlet_intervals(e)
                                                            : decomposition.neumann_intervals(e);
        for (const auto& [a, b] : runs) w.largest_run = std::max(w.largest_run, (b - a) * domain.edge_length(e));
    }
    if (!(radius > 0.0)) return w;
    for (int k : kOrder) {
        for (std::size_t e = 0; e < domain.num_edges(); ++e) {
            const auto runs = label == BoundaryLabel::Dirichlet ? decomposition.dirichlet_intervals(e)
                                                                : decomposition.neumann_intervals(e);
            for (const auto& [a, b] : runs) {
                if (b - a <= kParamTol) continue;
                const auto x = domain.boundary_point(e, a + (b - a) * k / 16.0);
                const auto pieces = domain.boundary_interval(x, radius);
                if (pieces.empty()) continue;
                const bool inside = std::all_of(pieces.begin(), pieces.end(), [&](const EdgePiece& p) {
                    return label == BoundaryLabel::Dirichlet ? decomposition.piece_in_dirichlet(p)
                                                             : decomposition.piece_in_neumann(p);
                });
                if (inside) {
                    w.found = true;
                    w.center = x;
                    w.interval = pieces;
                    return w;
                }
            }
        }
    }
    return w;
}

OpeningReport opening_check(const PolygonalDomain& domain, const BoundaryDecomposition& decomposition) {
    const double r = domain.scale_R0() / domain.lipschitz_M();
    return {find_open_interval(domain, decomposition, BoundaryLabel::Dirichlet, r),
            find_open_interval(domain, decomposition, BoundaryLabel::Neumann, r)};
}

// -- local domains -----------------------------------------------------------

LocalDomain::LocalDomain(const PolygonalDomain& domain, Vec2 center, double radius)
    : domain_(&domain), center_(std::move(center)), radius_(radius), kind_(LocalDomainKind::InteriorDisk) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("local domain radius must be positive");
    if (!domain.contains(center_)) throw InvalidInput("local domain center lies outside the closed domain");
    if (domain.distance_to_boundary(center_) <= radius) {
        *this = LocalDomain(domain, domain.closest_boundary_point(center_), radius);
        center_ = center;
    } else {
        frame_.origin = center_;
    }
}

LocalDomain::LocalDomain(const PolygonalDomain& domain, const BoundaryPoint& anchor, double radius)
    : domain_(&domain), center_(anchor.point), radius_(radius), kind_(LocalDomainKind::BoundaryCylinder),
      anchor_(anchor) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("local domain radius must be positive");
    frame_ = domain.boundary_frame(anchor);
    const double h = domain.cylinder_aspect() * radius;
    const std::array<Vec2, 4> box{frame_.to_global({-radius, -h}), frame_.to_global({radius, -h}),
                                  frame_.to_global({radius, h}), frame_.to_global({-radius, h})};
    region_ = clip_polygon(domain.vertices(), box);
}

bool LocalDomain::contains(const Vec2& y) const {
    if (kind_ == LocalDomainKind::InteriorDisk) return (y - center_).norm() < radius_;
    return domain_->in_cylinder(frame_, radius_, y) && point_in_polygon(domain_->vertices(), y);
}

double LocalDomain::area() const {
    if (kind_ == LocalDomainKind::InteriorDisk) return kPi * radius_ * radius_;
    return std::abs(signed_area(region_));
}

std::array<Vec2, 2> LocalDomain::bounding_box() const {
    if (kind_ == LocalDomainKind::InteriorDisk)
        return {center_ - Vec2(radius_, radius_), center_ + Vec2(radius_, radius_)};
    if (region_.empty()) return {center_, center_};
    Vec2 lo = region_.front();
    Vec2 hi = region_.front();
    for (const auto& p : region_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

bool LocalDomain::touches_dirichlet(const BoundaryDecomposition& decomposition) const {
    const auto& dom = *domain_;
    for (std::size_t e = 0; e < decomposition.num_edges(); ++e) {
        for (const auto& [c, d] : decomposition.dirichlet_intervals(e)) {
            const Vec2 a = dom.edge_point(e, c);
            const Vec2 b = dom.edge_point(e, d);
            if (kind_ == LocalDomainKind::InteriorDisk) {
                if (point_segment_distance(center_, a, b) <= radius_) return true;
            } else {
                const double slack = 1.0 + 1e-12;
                if (clip_segment_to_box(frame_, radius_ * slack, dom.cylinder_aspect() * radius_ * slack, a, b))
                    return true;
            }
        }
    }
    return false;
}

LocalDomain LocalDomain::scaled(double factor) const {
    if (kind_ == LocalDomainKind::BoundaryCylinder) {
        LocalDomain out(*domain_, *anchor_, radius_ * factor);
        out.center_ = center_;
        return out;
    }
    return LocalDomain(*domain_, center_, radius_ * factor);
}

std::vector<Vec2> LocalDomain::kernel() const {
    if (kind_ == LocalDomainKind::InteriorDisk) {
        const double s = radius_ / std::sqrt(2.0);
        return {center_ + Vec2(-s, -s), center_ + Vec2(s, -s), center_ + Vec2(s, s), center_ + Vec2(-s, s)};
    }
    const auto [lo, hi] = bounding_box();
    std::vector<Vec2> k{lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    const double tiny = 1e-14 * domain_->diameter();
    for (std::size_t i = 0; i < region_.size() && !k.empty(); ++i) {
        const Vec2& a = region_[i];
        const Vec2& b = region_[(i + 1) % region_.size()];
        if ((b - a).norm() <= tiny) continue;
        k = clip_half_plane(k, a, b);
    }
    return k;
}

double LocalDomain::kernel_inradius() const {
    if (kind_ == LocalDomainKind::InteriorDisk) return radius_;
    const auto k = kernel();
    if (k.size() < 3 || std::abs(signed_area(k)) <= 0.0) return 0.0;
    Vec2 c = Vec2::Zero();
    for (const auto& p : k) c += p;
    c /= static_cast<double>(k.size());
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k.size(); ++i) {
        const Vec2& a = k[i];
        const Vec2& b = k[(i + 1) % k.size()];
        if ((b - a).norm() <= 0.0) continue;
        r = std::min(r, cross(b - a, c - a) / (b - a).norm());
    }
    return std::max(r, 0.0);
}

LocalDomain local_domain(const PolygonalDomain& domain, const Vec2& x, double rho) {
    return LocalDomain(domain, x, rho);
}

}  // namespace mixedgreen
