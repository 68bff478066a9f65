#include "mixedgreen/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace mixedgreen {

namespace {

std::uint64_t edge_key(Index a, Index b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

double tri_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

double tri_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
    auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return std::atan2(std::abs(cross(q - p, r - p)), (q - p).dot(r - p));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

double point_triangle_distance(const Vec2& p, const std::array<Vec2, 3>& t) {
    const auto b = barycentric(t, p);
    if (b[0] >= 0.0 && b[1] >= 0.0 && b[2] >= 0.0) return 0.0;
    return std::min({point_segment_distance(p, t[0], t[1]), point_segment_distance(p, t[1], t[2]),
                     point_segment_distance(p, t[2], t[0])});
}

void check_budget(std::size_t nodes) {
    if (static_cast<Index>(nodes) > kMaxMeshNodes)
        throw InvalidInput("mesh node budget exceeded (" + std::to_string(nodes) + " > " +
                           std::to_string(kMaxMeshNodes) + ")");
}


// Splits the longest interior edge of every triangle whose three vertices lie
// on the boundary, so each triangle keeps a vertex off the boundary. Red and
// longest-edge refinement preserve this property.
TriangleMesh split_boundary_triangles(const TriangleMesh& mesh) {
    std::vector<Vec2> nodes = mesh.nodes();
    std::vector<std::array<Index, 3>> tris = mesh.triangles();
    std::vector<std::uint8_t> dirichlet = mesh.dirichlet_vertex();
    std::vector<std::uint8_t> on_boundary(nodes.size(), 0);
    for (const auto& b : mesh.boundary_edges())
        for (Index v : b.nodes) on_boundary[static_cast<std::size_t>(v)] = 1;
    for (bool changed = true; changed;) {
        changed = false;
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> owners;
        for (std::size_t t = 0; t < tris.size(); ++t)
            for (int i = 0; i < 3; ++i) owners[edge_key(tris[t][i], tris[t][(i + 1) % 3])].push_back(t);
        for (std::size_t t = 0; t < tris.size() && !changed; ++t) {
            const auto& tri = tris[t];
            if (!on_boundary[static_cast<std::size_t>(tri[0])] || !on_boundary[static_cast<std::size_t>(tri[1])] ||
                !on_boundary[static_cast<std::size_t>(tri[2])])
                continue;
            int best = -1;
            double longest = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Index a = tri[i], b = tri[(i + 1) % 3];
                if (owners[edge_key(a, b)].size() != 2) continue;
                const double len = (nodes[static_cast<std::size_t>(a)] - nodes[static_cast<std::size_t>(b)]).norm();
                if (len > longest) longest = len, best = i;
            }
            if (best < 0) continue;
            const Index a = tri[best], b = tri[(best + 1) % 3];
            const Index m = static_cast<Index>(nodes.size());
            nodes.push_back(0.5 * (nodes[static_cast<std::size_t>(a)] + nodes[static_cast<std::size_t>(b)]));
            dirichlet.push_back(0);
            on_boundary.push_back(0);
            for (const std::size_t o : owners[edge_key(a, b)]) {
                const auto old = tris[o];
                int i = 0;
                while (!((old[i] == a && old[(i + 1) % 3] == b) || (old[i] == b && old[(i + 1) % 3] == a))) ++i;
                tris[o] = {old[i], m, old[(i + 2) % 3]};
                tris.push_back({m, old[(i + 1) % 3], old[(i + 2) % 3]});
            }
            changed = true;
        }
    }
    return TriangleMesh(std::move(nodes), std::move(tris), mesh.boundary_edges(), std::move(dirichlet));
}

// -- structured rectangle ----------------------------------------------------

std::optional<TriangleMesh> union_jack(const PolygonalDomain& domain, const BoundaryDecomposition& dec,
                                       double target_h) {
    const auto& v = domain.vertices();
    if (v.size() != 4) return std::nullopt;
    const double tol = 1e-12 * domain.diameter();
    for (std::size_t e = 0; e < 4; ++e) {
        const Vec2 d = domain.edge_end(e) - domain.edge_start(e);
        if (std::abs(d.x()) > tol && std::abs(d.y()) > tol) return std::nullopt;
    }
    const auto [lo, hi] = domain.bounding_box();
    const Vec2 len = hi - lo;
    auto even_count = [&](double L) {
        auto n = static_cast<Index>(std::ceil(L * std::sqrt(2.0) / target_h - 1e-9));
        n = std::max<Index>(n, 2);
        return n + (n % 2);
    };
    const Index nx = even_count(len.x());
    const Index ny = even_count(len.y());
    check_budget(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    auto divisions = [&](std::size_t e) {
        const Vec2 d = domain.edge_end(e) - domain.edge_start(e);
        return std::abs(d.x()) > tol ? nx : ny;
    };
    for (const auto& tp : dec.transition_points()) {
        const double s = tp.t * static_cast<double>(divisions(tp.edge));
        if (std::abs(s - std::round(s)) > 1e-9) return std::nullopt;
    }

    const Vec2 cell(len.x() / static_cast<double>(nx), len.y() / static_cast<double>(ny));
    auto id = [&](Index i, Index j) { return j * (nx + 1) + i; };
    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (Index j = 0; j <= ny; ++j)
        for (Index i = 0; i <= nx; ++i)
            nodes.emplace_back(i == nx ? hi.x() : lo.x() + static_cast<double>(i) * cell.x(),
                               j == ny ? hi.y() : lo.y() + static_cast<double>(j) * cell.y());
    std::vector<std::array<Index, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            const Index p00 = id(i, j), p10 = id(i + 1, j), p11 = id(i + 1, j + 1), p01 = id(i, j + 1);
            if ((i + j) % 2 == 0) {
                tris.push_back({p00, p10, p11});
                tris.push_back({p00, p11, p01});
            } else {
                tris.push_back({p00, p10, p01});
                tris.push_back({p10, p11, p01});
            }
        }
    }
    auto node_at = [&](const Vec2& p) {
        const auto i = static_cast<Index>(std::llround((p.x() - lo.x()) / cell.x()));
        const auto j = static_cast<Index>(std::llround((p.y() - lo.y()) / cell.y()));
        return id(i, j);
    };
    std::vector<BoundaryEdge> boundary;
    std::vector<std::uint8_t> dirichlet(nodes.size(), 0);
    for (std::size_t e = 0; e < 4; ++e) {
        const Index n = divisions(e);
        for (Index k = 0; k < n; ++k) {
            const double t0 = static_cast<double>(k) / static_cast<double>(n);
            const double t1 = static_cast<double>(k + 1) / static_cast<double>(n);
            const Index a = node_at(domain.edge_point(e, t0));
            const Index b = node_at(domain.edge_point(e, t1));
            boundary.push_back({{a, b}, dec.label_at(e, 0.5 * (t0 + t1)), e});
            if (dec.label_at(e, t0) == BoundaryLabel::Dirichlet) dirichlet[static_cast<std::size_t>(a)] = 1;
            if (dec.label_at(e, t1) == BoundaryLabel::Dirichlet) dirichlet[static_cast<std::size_t>(b)] = 1;
        }
    }
    return TriangleMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(dirichlet));
}

// -- Delaunay refinement -------------------------------------------------------

class DelaunayRefiner {
public:
    DelaunayRefiner(const PolygonalDomain& domain, const BoundaryDecomposition& dec, double h)
        : domain_(domain), dec_(dec), h_(h) {}

    TriangleMesh run();

private:
    struct Tri {
        std::array<Index, 3> v;
        Vec2 center;
        double r2;
        bool alive;
    };
    struct Segment {
        Index a, b;
        std::size_t edge;
        double ta, tb;
    };
    struct Param {
        std::size_t edge;
        double t;
    };

    Index add_point(const Vec2& p, std::optional<Param> param);
    void insert(Index p);
    void split_segment(std::size_t s);
    bool encroaches(std::size_t s, const Vec2& p) const;
    Tri make_tri(Index a, Index b, Index c) const;
    bool is_super(const Tri& t) const { return t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3; }
    bool exempt_angle(const Tri& t) const;

    const PolygonalDomain& domain_;
    const BoundaryDecomposition& dec_;
    double h_;
    std::vector<Vec2> pts_;
    std::vector<std::optional<Param>> params_;
    std::vector<Tri> tris_;
    std::vector<Segment> segs_;
    std::vector<Index> small_angle_vertices_;
};

DelaunayRefiner::Tri DelaunayRefiner::make_tri(Index a, Index b, Index c) const {
    const Vec2& A = pts_[static_cast<std::size_t>(a)];
    const Vec2& B = pts_[static_cast<std::size_t>(b)];
    const Vec2& C = pts_[static_cast<std::size_t>(c)];
    const Vec2 ab = B - A;
    const Vec2 ac = C - A;
    const double d = 2.0 * cross(ab, ac);
    const Vec2 off(( ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d,
                   (-ac.x() * ab.squaredNorm() + ab.x() * ac.squaredNorm()) / d);
    return {{a, b, c}, A + off, off.squaredNorm(), true};
}

Index DelaunayRefiner::add_point(const Vec2& p, std::optional<Param> param) {
    pts_.push_back(p);
    params_.push_back(param);
    check_budget(pts_.size());
    const auto id = static_cast<Index>(pts_.size() - 1);
    if (id >= 3) insert(id);
    return id;
}

void DelaunayRefiner::insert(Index p) {
    const Vec2& P = pts_[static_cast<std::size_t>(p)];
    std::vector<std::array<Index, 2>> edges;
    for (auto& t : tris_) {
        if (!t.alive) continue;
        if ((P - t.center).squaredNorm() < t.r2 * (1.0 - 1e-12)) {
            t.alive = false;
            edges.push_back({t.v[0], t.v[1]});
            edges.push_back({t.v[1], t.v[2]});
            edges.push_back({t.v[2], t.v[0]});
        }
    }
    if (edges.empty()) throw NumericalFailure("Delaunay insertion found an empty cavity");
    std::map<std::uint64_t, int> count;
    for (const auto& e : edges) ++count[edge_key(e[0], e[1])];
    for (const auto& e : edges)
        if (count[edge_key(e[0], e[1])] == 1) tris_.push_back(make_tri(e[0], e[1], p));
}

bool DelaunayRefiner::encroaches(std::size_t s, const Vec2& p) const {
    const Vec2& a = pts_[static_cast<std::size_t>(segs_[s].a)];
    const Vec2& b = pts_[static_cast<std::size_t>(segs_[s].b)];
    return (p - a).dot(p - b) < -1e-10 * (b - a).squaredNorm();
}

void DelaunayRefiner::split_segment(std::size_t s) {
    const Segment seg = segs_[s];
    const double tm = 0.5 * (seg.ta + seg.tb);
    const Index m = add_point(domain_.edge_point(seg.edge, tm), Param{seg.edge, tm});
    segs_[s] = {seg.a, m, seg.edge, seg.ta, tm};
    segs_.push_back({m, seg.b, seg.edge, tm, seg.tb});
}

bool DelaunayRefiner::exempt_angle(const Tri& t) const {
    return std::any_of(t.v.begin(), t.v.end(), [&](Index v) {
        return std::find(small_angle_vertices_.begin(), small_angle_vertices_.end(), v) != small_angle_vertices_.end();
    });
}

TriangleMesh DelaunayRefiner::run() {
    const auto [lo, hi] = domain_.bounding_box();
    const Vec2 c = 0.5 * (lo + hi);
    const double big = 100.0 * domain_.diameter();
    pts_ = {c + Vec2(-big, -big), c + Vec2(big, -big), c + Vec2(0.0, big)};
    params_.assign(3, std::nullopt);
    tris_.push_back(make_tri(0, 1, 2));

    const std::size_t n = domain_.num_edges();
    std::vector<Index> vertex_ids(n);
    for (std::size_t v = 0; v < n; ++v) {
        vertex_ids[v] = add_point(domain_.vertices()[v], Param{v, 0.0});
        if (domain_.interior_angle(v) < 50.0 * kPi / 180.0) small_angle_vertices_.push_back(vertex_ids[v]);
    }
    const auto transitions = dec_.transition_points();
    for (std::size_t e = 0; e < n; ++e) {
        std::vector<double> breaks{0.0, 1.0};
        for (const auto& tp : transitions)
            if (tp.edge == e) breaks.push_back(tp.t);
        std::sort(breaks.begin(), breaks.end());
        Index prev = vertex_ids[e];
        for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            const double t0 = breaks[k];
            const double t1 = breaks[k + 1];
            const auto pieces = std::max<Index>(
                1, static_cast<Index>(std::ceil((t1 - t0) * domain_.edge_length(e) / h_ - 1e-9)));
            for (Index j = 1; j <= pieces; ++j) {
                const double ta = t0 + (t1 - t0) * static_cast<double>(j - 1) / static_cast<double>(pieces);
                const double tb = t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(pieces);
                const bool last = k + 2 == breaks.size() && j == pieces;
                const Index next =
                    last ? vertex_ids[(e + 1) % n] : add_point(domain_.edge_point(e, tb), Param{e, tb});
                segs_.push_back({prev, next, e, ta, tb});
                prev = next;
            }
        }
    }

    const double min_angle = 25.0 * kPi / 180.0;
    for (;;) {
        bool split = false;
        for (std::size_t s = 0; s < segs_.size() && !split; ++s) {
            for (std::size_t q = 3; q < pts_.size(); ++q) {
                if (static_cast<Index>(q) == segs_[s].a || static_cast<Index>(q) == segs_[s].b) continue;
                if (encroaches(s, pts_[q])) {
                    split_segment(s);
                    split = true;
                    break;
                }
            }
        }
        if (split) continue;

        std::optional<std::size_t> worst;
        double worst_r2 = 0.0;
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const auto& t = tris_[i];
            if (!t.alive || is_super(t)) continue;
            const Vec2& A = pts_[static_cast<std::size_t>(t.v[0])];
            const Vec2& B = pts_[static_cast<std::size_t>(t.v[1])];
            const Vec2& C = pts_[static_cast<std::size_t>(t.v[2])];
            if (!point_in_polygon(domain_.vertices(), (A + B + C) / 3.0)) continue;
            const double longest = std::max({(A - B).norm(), (B - C).norm(), (C - A).norm()});
            const bool skinny = tri_min_angle(A, B, C) < min_angle && !exempt_angle(t);
            if ((skinny || longest > h_) && t.r2 > worst_r2) {
                worst = i;
                worst_r2 = t.r2;
            }
        }
        if (!worst) break;
        const Tri t = tris_[*worst];
        std::vector<std::size_t> hit;
        for (std::size_t s = 0; s < segs_.size(); ++s)
            if (encroaches(s, t.center)) hit.push_back(s);
        if (!hit.empty()) {
            for (auto s : hit) split_segment(s);
        } else if (point_in_polygon(domain_.vertices(), t.center) &&
                   domain_.distance_to_boundary(t.center) > 1e-9 * domain_.diameter()) {
            add_point(t.center, std::nullopt);
        } else {
            const Vec2 centroid = (pts_[static_cast<std::size_t>(t.v[0])] + pts_[static_cast<std::size_t>(t.v[1])] +
                                   pts_[static_cast<std::size_t>(t.v[2])]) /
                                  3.0;
            add_point(centroid, std::nullopt);
        }
    }

    // Collect interior triangles and compact node numbering.
    std::vector<Index> remap(pts_.size(), -1);
    std::vector<Vec2> nodes;
    std::vector<std::array<Index, 3>> tris;
    auto map_node = [&](Index v) {
        auto& r = remap[static_cast<std::size_t>(v)];
        if (r < 0) {
            r = static_cast<Index>(nodes.size());
            nodes.push_back(pts_[static_cast<std::size_t>(v)]);
        }
        return r;
    };
    for (std::size_t q = 3; q < pts_.size(); ++q) map_node(static_cast<Index>(q));
    std::unordered_map<std::uint64_t, int> edge_count;
    for (const auto& t : tris_) {
        if (!t.alive || is_super(t)) continue;
        const Vec2 centroid = (pts_[static_cast<std::size_t>(t.v[0])] + pts_[static_cast<std::size_t>(t.v[1])] +
                               pts_[static_cast<std::size_t>(t.v[2])]) /
                              3.0;
        if (!point_in_polygon(domain_.vertices(), centroid)) continue;
        tris.push_back({map_node(t.v[0]), map_node(t.v[1]), map_node(t.v[2])});
        for (int k = 0; k < 3; ++k) ++edge_count[edge_key(tris.back()[k], tris.back()[(k + 1) % 3])];
    }
    std::vector<BoundaryEdge> boundary;
    std::vector<std::uint8_t> dirichlet(nodes.size(), 0);
    for (const auto& s : segs_) {
        const Index a = remap[static_cast<std::size_t>(s.a)];
        const Index b = remap[static_cast<std::size_t>(s.b)];
        auto it = edge_count.find(edge_key(a, b));
        if (it == edge_count.end() || it->second != 1)
            throw NumericalFailure("Delaunay refinement lost a boundary segment");
        boundary.push_back({{a, b}, dec_.label_at(s.edge, 0.5 * (s.ta + s.tb)), s.edge});
    }
    for (std::size_t q = 3; q < pts_.size(); ++q) {
        if (!params_[q]) continue;
        if (dec_.label_at(params_[q]->edge, params_[q]->t) == BoundaryLabel::Dirichlet)
            dirichlet[static_cast<std::size_t>(remap[q])] = 1;
    }
    return TriangleMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(dirichlet));
}

// -- longest-edge bisection ----------------------------------------------------

class Bisector {
public:
    explicit Bisector(const TriangleMesh& mesh)
        : nodes_(mesh.nodes()), tris_(mesh.triangles()), dirichlet_(mesh.dirichlet_vertex()) {
        for (std::size_t t = 0; t < tris_.size(); ++t) attach(static_cast<Index>(t));
        for (const auto& b : mesh.boundary_edges()) boundary_[edge_key(b.nodes[0], b.nodes[1])] = b;
    }

    [[nodiscard]] std::size_t size() const { return tris_.size(); }
    [[nodiscard]] std::array<Vec2, 3> corners(Index t) const {
        const auto& v = tris_[static_cast<std::size_t>(t)];
        return {nodes_[static_cast<std::size_t>(v[0])], nodes_[static_cast<std::size_t>(v[1])],
                nodes_[static_cast<std::size_t>(v[2])]};
    }
    [[nodiscard]] double diameter(Index t) const {
        const auto c = corners(t);
        return std::max({(c[0] - c[1]).norm(), (c[1] - c[2]).norm(), (c[2] - c[0]).norm()});
    }

    void bisect(Index t) {
        for (;;) {
            const auto [a, b] = longest_edge(t);
            const Index nb = neighbor(t, a, b);
            if (nb < 0) {
                split_edge(a, b);
                return;
            }
            const auto [c, d] = longest_edge(nb);
            if (edge_key(a, b) == edge_key(c, d)) {
                split_edge(a, b);
                return;
            }
            bisect(nb);
        }
    }

    TriangleMesh finish() {
        std::vector<BoundaryEdge> boundary;
        boundary.reserve(boundary_.size());
        for (const auto& [k, b] : boundary_) boundary.push_back(b);
        std::sort(boundary.begin(), boundary.end(), [](const BoundaryEdge& x, const BoundaryEdge& y) {
            return std::tie(x.polygon_edge, x.nodes) < std::tie(y.polygon_edge, y.nodes);
        });
        return TriangleMesh(std::move(nodes_), std::move(tris_), std::move(boundary), std::move(dirichlet_));
    }

private:
    std::pair<Index, Index> longest_edge(Index t) const {
        const auto& v = tris_[static_cast<std::size_t>(t)];
        int best = 0;
        double best_len = -1.0;
        for (int k = 0; k < 3; ++k) {
            const Index a = v[static_cast<std::size_t>(k)];
            const Index b = v[static_cast<std::size_t>((k + 1) % 3)];
            const double len = (nodes_[static_cast<std::size_t>(a)] - nodes_[static_cast<std::size_t>(b)]).norm();
            const bool tie = std::abs(len - best_len) <= 1e-12 * std::max(len, best_len);
            const auto bk = edge_key(v[static_cast<std::size_t>(best)], v[static_cast<std::size_t>((best + 1) % 3)]);
            if ((!tie && len > best_len) || (tie && edge_key(a, b) < bk)) {
                best = k;
                best_len = len;
            }
        }
        return {v[static_cast<std::size_t>(best)], v[static_cast<std::size_t>((best + 1) % 3)]};
    }

    Index neighbor(Index t, Index a, Index b) const {
        const auto& owners = edges_.at(edge_key(a, b));
        return owners[0] == t ? owners[1] : owners[0];
    }

    void attach(Index t) {
        const auto& v = tris_[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            auto [it, fresh] = edges_.try_emplace(edge_key(v[static_cast<std::size_t>(k)],
                                                           v[static_cast<std::size_t>((k + 1) % 3)]),
                                                  std::array<Index, 2>{-1, -1});
            (it->second[0] < 0 ? it->second[0] : it->second[1]) = t;
        }
    }

    void detach(Index t) {
        const auto& v = tris_[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            const auto key = edge_key(v[static_cast<std::size_t>(k)], v[static_cast<std::size_t>((k + 1) % 3)]);
            auto& o = edges_.at(key);
            if (o[0] == t) o[0] = o[1];
            o[1] = -1;
            if (o[0] < 0) edges_.erase(key);
        }
    }

    void split_edge(Index a, Index b) {
        const auto key = edge_key(a, b);
        const auto owners = edges_.at(key);
        const Index m = static_cast<Index>(nodes_.size());
        nodes_.push_back(0.5 * (nodes_[static_cast<std::size_t>(a)] + nodes_[static_cast<std::size_t>(b)]));
        dirichlet_.push_back(0);
        check_budget(nodes_.size());
        if (auto it = boundary_.find(key); it != boundary_.end()) {
            BoundaryEdge e = it->second;
            boundary_.erase(it);
            if (e.label == BoundaryLabel::Dirichlet) dirichlet_.back() = 1;
            boundary_[edge_key(e.nodes[0], m)] = {{e.nodes[0], m}, e.label, e.polygon_edge};
            boundary_[edge_key(m, e.nodes[1])] = {{m, e.nodes[1]}, e.label, e.polygon_edge};
        }
        for (Index t : owners) {
            if (t < 0) continue;
            detach(t);
            auto v = tris_[static_cast<std::size_t>(t)];
            while (edge_key(v[0], v[1]) != key) std::rotate(v.begin(), v.begin() + 1, v.end());
            tris_[static_cast<std::size_t>(t)] = {v[0], m, v[2]};
            tris_.push_back({m, v[1], v[2]});
            attach(t);
            attach(static_cast<Index>(tris_.size() - 1));
        }
    }

    std::vector<Vec2> nodes_;
    std::vector<std::array<Index, 3>> tris_;
    std::vector<std::uint8_t> dirichlet_;
    std::unordered_map<std::uint64_t, std::array<Index, 2>> edges_;
    std::map<std::uint64_t, BoundaryEdge> boundary_;
};

}  // namespace

std::array<double, 3> barycentric(const std::array<Vec2, 3>& t, const Vec2& p) {
    const double area2 = cross(t[1] - t[0], t[2] - t[0]);
    const double l1 = cross(p - t[0], t[2] - t[0]) / area2;
    const double l2 = cross(t[1] - t[0], p - t[0]) / area2;
    return {1.0 - l1 - l2, l1, l2};
}

// -- TriangleMesh ----------------------------------------------------------------

TriangleMesh::TriangleMesh(std::vector<Vec2> nodes, std::vector<std::array<Index, 3>> triangles,
                           std::vector<BoundaryEdge> boundary, std::vector<std::uint8_t> dirichlet_vertex)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_(std::move(boundary)),
      dirichlet_vertex_(std::move(dirichlet_vertex)) {
    const auto n = static_cast<Index>(nodes_.size());
    for (const auto& t : triangles_)
        for (Index v : t)
            if (v < 0 || v >= n) throw InvalidInput("triangle references a node out of range");
    for (const auto& b : boundary_)
        for (Index v : b.nodes)
            if (v < 0 || v >= n) throw InvalidInput("boundary edge references a node out of range");
    for (Index t = 0; t < num_triangles(); ++t) {
        if (area(t) <= 0.0) throw InvalidInput("triangle " + std::to_string(t) + " is not positively oriented");
        h_ = std::max(h_, diameter(t));
    }
    if (dirichlet_vertex_.empty()) {
        dirichlet_vertex_.assign(nodes_.size(), 0);
        for (const auto& b : boundary_)
            if (b.label == BoundaryLabel::Dirichlet)
                for (Index v : b.nodes) dirichlet_vertex_[static_cast<std::size_t>(v)] = 1;
    } else if (dirichlet_vertex_.size() != nodes_.size()) {
        throw InvalidInput("Dirichlet flags do not match the node count");
    }
}

std::array<Vec2, 3> TriangleMesh::corners(Index t) const {
    const auto& v = triangles_[static_cast<std::size_t>(t)];
    return {nodes_[static_cast<std::size_t>(v[0])], nodes_[static_cast<std::size_t>(v[1])],
            nodes_[static_cast<std::size_t>(v[2])]};
}

double TriangleMesh::area(Index t) const {
    const auto c = corners(t);
    return tri_signed_area(c[0], c[1], c[2]);
}

double TriangleMesh::diameter(Index t) const {
    const auto c = corners(t);
    return std::max({(c[0] - c[1]).norm(), (c[1] - c[2]).norm(), (c[2] - c[0]).norm()});
}

double TriangleMesh::min_angle(Index t) const {
    const auto c = corners(t);
    return tri_min_angle(c[0], c[1], c[2]);
}

double TriangleMesh::min_angle_degrees() const {
    double m = kPi;
    for (Index t = 0; t < num_triangles(); ++t) m = std::min(m, min_angle(t));
    return m * 180.0 / kPi;
}

double TriangleMesh::total_area() const {
    double s = 0.0;
    for (Index t = 0; t < num_triangles(); ++t) s += area(t);
    return s;
}

void TriangleMesh::write(std::ostream& out) const {
    std::ostringstream os;
    os.precision(17);
    os << "NODES " << nodes_.size() << '\n';
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        os << nodes_[i].x() << ' ' << nodes_[i].y() << ' ' << int(dirichlet_vertex_[i]) << '\n';
    os << "TRIANGLES " << triangles_.size() << '\n';
    for (const auto& t : triangles_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "BOUNDARY " << boundary_.size() << '\n';
    for (const auto& b : boundary_)
        os << b.nodes[0] << ' ' << b.nodes[1] << ' ' << label_char(b.label) << ' ' << b.polygon_edge << '\n';
    out << os.str();
}

TriangleMesh TriangleMesh::read(std::istream& in) {
    auto expect = [&](const char* section) {
        std::string word;
        std::size_t count = 0;
        if (!(in >> word >> count) || word != section) throw InvalidInput(std::string("mesh file: expected ") + section);
        return count;
    };
    std::vector<Vec2> nodes(expect("NODES"));
    std::vector<std::uint8_t> dirichlet(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        int flag = 0;
        if (!(in >> nodes[i].x() >> nodes[i].y() >> flag)) throw InvalidInput("mesh file: bad node record");
        dirichlet[i] = static_cast<std::uint8_t>(flag != 0);
    }
    std::vector<std::array<Index, 3>> tris(expect("TRIANGLES"));
    for (auto& t : tris)
        if (!(in >> t[0] >> t[1] >> t[2])) throw InvalidInput("mesh file: bad triangle record");
    std::vector<BoundaryEdge> boundary(expect("BOUNDARY"));
    for (auto& b : boundary) {
        char label = 0;
        if (!(in >> b.nodes[0] >> b.nodes[1] >> label >> b.polygon_edge) || (label != 'D' && label != 'N'))
            throw InvalidInput("mesh file: bad boundary record");
        b.label = label == 'D' ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
    }
    return TriangleMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(dirichlet));
}

// -- construction and refinement -----------------------------------------------

TriangleMesh triangulate(const PolygonalDomain& domain, const BoundaryDecomposition& decomposition, double target_h) {
    if (!(target_h > 0.0) || !std::isfinite(target_h)) throw InvalidInput("target_h must be positive");
    const double estimate = 4.0 * domain.area() / (target_h * target_h) + domain.perimeter() / target_h;
    if (estimate > static_cast<double>(kMaxMeshNodes))
        throw InvalidInput("target_h is below the feasibility floor of the node budget");
    if (auto m = union_jack(domain, decomposition, target_h)) return std::move(*m);

    const double coarse = std::max(target_h, domain.diameter() / 16.0);
    TriangleMesh mesh = split_boundary_triangles(DelaunayRefiner(domain, decomposition, coarse).run());
    while (mesh.h() > target_h * (1.0 + 1e-12)) mesh = refine(mesh);
    return mesh;
}

TriangleMesh refine(const TriangleMesh& mesh) {
    std::unordered_map<std::uint64_t, Index> mid;
    std::vector<Vec2> nodes = mesh.nodes();
    std::vector<std::uint8_t> dirichlet = mesh.dirichlet_vertex();
    auto midpoint = [&](Index a, Index b) {
        auto [it, fresh] = mid.try_emplace(edge_key(a, b), static_cast<Index>(nodes.size()));
        if (fresh) {
            nodes.push_back(0.5 * (nodes[static_cast<std::size_t>(a)] + nodes[static_cast<std::size_t>(b)]));
            dirichlet.push_back(0);
        }
        return it->second;
    };
    std::vector<std::array<Index, 3>> tris;
    tris.reserve(mesh.triangles().size() * 4);
    for (const auto& t : mesh.triangles()) {
        const Index m01 = midpoint(t[0], t[1]);
        const Index m12 = midpoint(t[1], t[2]);
        const Index m20 = midpoint(t[2], t[0]);
        tris.push_back({t[0], m01, m20});
        tris.push_back({m01, t[1], m12});
        tris.push_back({m20, m12, t[2]});
        tris.push_back({m01, m12, m20});
    }
    check_budget(nodes.size());
    std::vector<BoundaryEdge> boundary;
    boundary.reserve(mesh.boundary_edges().size() * 2);
    for (const auto& b : mesh.boundary_edges()) {
        const Index m = mid.at(edge_key(b.nodes[0], b.nodes[1]));
        if (b.label == BoundaryLabel::Dirichlet) dirichlet[static_cast<std::size_t>(m)] = 1;
        boundary.push_back({{b.nodes[0], m}, b.label, b.polygon_edge});
        boundary.push_back({{m, b.nodes[1]}, b.label, b.polygon_edge});
    }
    return TriangleMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(dirichlet));
}

TriangleMesh graded_refine_toward(const TriangleMesh& mesh, const Vec2& point, int levels) {
    return graded_refine_toward(mesh, std::span<const Vec2>(&point, 1), levels);
}

TriangleMesh graded_refine_toward(const TriangleMesh& mesh, std::span<const Vec2> points, int levels) {
    if (levels < 0) throw InvalidInput("graded refinement needs levels >= 0");
    const PointLocator locator(mesh);
    std::vector<double> h0;
    for (const auto& p : points) {
        if (locator.locate(p).triangle < 0) throw InvalidInput("graded refinement center lies outside the mesh");
        h0.push_back(locator.local_h(p));
    }
    Bisector b(mesh);
    for (int k = 1; k <= levels; ++k) {
        for (;;) {
            std::vector<std::pair<Index, double>> marked;
            for (std::size_t t = 0; t < b.size(); ++t) {
                const auto c = b.corners(static_cast<Index>(t));
                const double d = b.diameter(static_cast<Index>(t));
                double target = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < points.size(); ++i)
                    if (point_triangle_distance(points[i], c) <= 4.0 * std::ldexp(h0[i], -(k - 1)))
                        target = std::min(target, std::ldexp(h0[i], -k));
                if (d > target * (1.0 + 1e-12)) marked.emplace_back(static_cast<Index>(t), target);
            }
            if (marked.empty()) break;
            // A slot may already hold a smaller child by the time it is reached.
            for (const auto& [t, target] : marked)
                if (b.diameter(t) > target * (1.0 + 1e-12)) b.bisect(t);
        }
    }
    return b.finish();
}

// -- PointLocator --------------------------------------------------------------

PointLocator::PointLocator(const TriangleMesh& mesh) : mesh_(&mesh) {
    if (mesh.num_triangles() == 0) throw InvalidInput("point location on an empty mesh");
    Vec2 lo = mesh.nodes().front();
    Vec2 hi = lo;
    for (const auto& p : mesh.nodes()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec2 ext = (hi - lo).cwiseMax(Vec2::Constant(1e-300));
    const double cells = std::max(1.0, std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0));
    const double side = std::sqrt(ext.x() * ext.y() / (cells * cells));
    nx_ = std::clamp(static_cast<int>(std::ceil(ext.x() / side)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::ceil(ext.y() / side)), 1, 4096);
    lo_ = lo;
    cell_size_ = Vec2(ext.x() / nx_, ext.y() / ny_);
    buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const Vec2 tlo = c[0].cwiseMin(c[1]).cwiseMin(c[2]);
        const Vec2 thi = c[0].cwiseMax(c[1]).cwiseMax(c[2]);
        const auto a = cell(tlo);
        const auto b = cell(thi);
        for (int j = a[1]; j <= b[1]; ++j)
            for (int i = a[0]; i <= b[0]; ++i)
                buckets_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)]
                    .push_back(t);
    }
}

std::array<int, 2> PointLocator::cell(const Vec2& p) const {
    const int i = std::clamp(static_cast<int>(std::floor((p.x() - lo_.x()) / cell_size_.x())), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y() - lo_.y()) / cell_size_.y())), 0, ny_ - 1);
    return {i, j};
}

Location PointLocator::locate(const Vec2& p) const {
    const auto c = cell(p);
    Location best;
    double best_min = -std::numeric_limits<double>::infinity();
    for (Index t : buckets_[static_cast<std::size_t>(c[1]) * static_cast<std::size_t>(nx_) +
                            static_cast<std::size_t>(c[0])]) {
        const auto b = barycentric(mesh_->corners(t), p);
        const double m = std::min({b[0], b[1], b[2]});
        if (m > best_min) {
            best_min = m;
            best = {t, b};
        }
        if (m >= 0.0) break;
    }
    if (best_min < -1e-9) return {};
    return best;
}

std::vector<Index> PointLocator::candidates(const Vec2& lo, const Vec2& hi) const {
    const auto a = cell(lo);
    const auto b = cell(hi);
    std::vector<Index> out;
    for (int j = a[1]; j <= b[1]; ++j)
        for (int i = a[0]; i <= b[0]; ++i) {
            const auto& bucket =
                buckets_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)];
            out.insert(out.end(), bucket.begin(), bucket.end());
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double PointLocator::local_h(const Vec2& p, double radius) const {
    const double r = std::max(radius, 1e-12 * mesh_->h());
    double h = 0.0;
    for (Index t : candidates(p - Vec2(r, r), p + Vec2(r, r)))
        if (point_triangle_distance(p, mesh_->corners(t)) <= r) h = std::max(h, mesh_->diameter(t));
    return h;
}

}  // namespace mixedgreen
