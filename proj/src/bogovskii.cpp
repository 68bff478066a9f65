#include "mixedgreen/bogovskii.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace mixedgreen {

namespace {

constexpr double kMeanTolerance = 1e-10;

bool closed_contains(const LocalDomain& region, const Vec2& y) {
    const double r = region.radius() * (1.0 + 1e-9);
    if (region.kind() == LocalDomainKind::InteriorDisk) return (y - region.center()).norm() <= r;
    const Vec2 l = region.frame().to_local(y);
    return std::abs(l.x()) <= r && std::abs(l.y()) <= r * region.domain().cylinder_aspect();
}

std::uint64_t edge_key(Index a, Index b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

/// Drops triangles without a vertex inside the union, then keeps the component of largest area.
std::vector<Index> prune(const TriangleMesh& mesh, std::vector<Index> tris) {
    for (bool changed = true; changed && !tris.empty();) {
        changed = false;
        std::unordered_map<std::uint64_t, int> count;
        for (const Index t : tris) {
            const auto& v = mesh.triangles()[static_cast<std::size_t>(t)];
            for (int i = 0; i < 3; ++i) ++count[edge_key(v[i], v[(i + 1) % 3])];
        }
        std::unordered_map<Index, bool> on_rim;
        for (const Index t : tris) {
            const auto& v = mesh.triangles()[static_cast<std::size_t>(t)];
            for (int i = 0; i < 3; ++i) {
                if (count[edge_key(v[i], v[(i + 1) % 3])] == 1) on_rim[v[i]] = on_rim[v[(i + 1) % 3]] = true;
            }
        }
        std::vector<Index> kept;
        for (const Index t : tris) {
            const auto& v = mesh.triangles()[static_cast<std::size_t>(t)];
            if (on_rim.count(v[0]) && on_rim.count(v[1]) && on_rim.count(v[2])) {
                changed = true;
                continue;
            }
            kept.push_back(t);
        }
        tris = std::move(kept);
    }
    if (tris.empty()) return tris;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> owners;
    for (std::size_t k = 0; k < tris.size(); ++k) {
        const auto& v = mesh.triangles()[static_cast<std::size_t>(tris[k])];
        for (int i = 0; i < 3; ++i) owners[edge_key(v[i], v[(i + 1) % 3])].push_back(k);
    }
    std::vector<int> component(tris.size(), -1);
    std::vector<double> area;
    for (std::size_t s = 0; s < tris.size(); ++s) {
        if (component[s] >= 0) continue;
        const int c = static_cast<int>(area.size());
        area.push_back(0.0);
        std::vector<std::size_t> stack{s};
        component[s] = c;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            area[static_cast<std::size_t>(c)] += mesh.area(tris[k]);
            const auto& v = mesh.triangles()[static_cast<std::size_t>(tris[k])];
            for (int i = 0; i < 3; ++i) {
                for (const std::size_t o : owners[edge_key(v[i], v[(i + 1) % 3])]) {
                    if (component[o] < 0) {
                        component[o] = c;
                        stack.push_back(o);
                    }
                }
            }
        }
    }
    const int best = static_cast<int>(std::max_element(area.begin(), area.end()) - area.begin());
    std::vector<Index> out;
    for (std::size_t k = 0; k < tris.size(); ++k)
        if (component[k] == best) out.push_back(tris[k]);
    std::sort(out.begin(), out.end());
    return out;
}

struct Candidate {
    LocalDomain region;
    LocalDomain core;
    std::vector<Index> triangles;
    std::vector<Index> core_triangles;
    Vec2 anchor;
};

std::optional<Candidate> make_candidate(const TriangleMesh& mesh, const PointLocator& locator, LocalDomain region,
                                        LocalDomain core) {
    const auto box = region.bounding_box();
    std::vector<Index> tris;
    for (const Index t : locator.candidates(box[0], box[1])) {
        const auto c = mesh.corners(t);
        if (closed_contains(region, c[0]) && closed_contains(region, c[1]) && closed_contains(region, c[2]))
            tris.push_back(t);
    }
    std::sort(tris.begin(), tris.end());
    tris = prune(mesh, std::move(tris));
    if (tris.empty()) return std::nullopt;
    std::vector<Index> core_tris;
    for (const Index t : tris) {
        const auto c = mesh.corners(t);
        if (core.contains((c[0] + c[1] + c[2]) / 3.0)) core_tris.push_back(t);
    }
    if (core_tris.empty()) return std::nullopt;
    const Vec2 anchor = region.anchor() ? region.anchor()->point : region.center();
    return Candidate{std::move(region), std::move(core), std::move(tris), std::move(core_tris), anchor};
}

bool lexicographic_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

bool share_any(const std::vector<Index>& a, const std::vector<Index>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i; else ++j;
    }
    return false;
}

}  // namespace

double ChainCover::min_overlap_ratio() const {
    double m = kInfinity;
    for (std::size_t k = 1; k < links.size(); ++k) m = std::min(m, links[k].overlap_area / (R0 * R0));
    return links.size() > 1 ? m : 0.0;
}

ChainCover build_chain(const FESpace& space, const BoundaryDecomposition& decomposition, double R0) {
    const PolygonalDomain& domain = decomposition.domain();
    const TriangleMesh& mesh = space.mesh();
    if (!(R0 > 0.0)) throw InvalidInput("chain scale R0 must be positive");
    ChainCover chain;
    chain.R0 = R0;
    chain.flux_radius = R0 / (2.0 * domain.lipschitz_M());
    const OpeningWitness witness = find_open_interval(domain, decomposition, BoundaryLabel::Neumann, chain.flux_radius);
    if (!witness.found) throw NumericalFailure("no open N interval to carry the flux", "NOpen");
    chain.flux_anchor = witness.center;

    const PointLocator& locator = space.locator();
    auto root = make_candidate(mesh, locator, LocalDomain(domain, witness.center, R0),
                               LocalDomain(domain, witness.center, R0 / 2));
    if (!root) throw NumericalFailure("mesh too coarse for the chain scale R0");

    std::vector<Candidate> pool;
    const auto box = domain.bounding_box();
    const double a = R0 / 2;
    for (double x = box[0].x() + a / 2; x < box[1].x(); x += a) {
        for (double y = box[0].y() + a / 2; y < box[1].y(); y += a) {
            const Vec2 p(x, y);
            if (!domain.contains(p) || domain.distance_to_boundary(p) <= 0.0) continue;
            if (auto c = make_candidate(mesh, locator, local_domain(domain, p, R0), local_domain(domain, p, R0 / 2)))
                pool.push_back(std::move(*c));
        }
    }
    for (std::size_t e = 0; e < domain.num_edges(); ++e) {
        const int n = std::max(1, static_cast<int>(std::ceil(domain.edge_length(e) / (R0 / 4))));
        for (int i = 0; i < n; ++i) {
            const BoundaryPoint bp = domain.boundary_point(e, static_cast<double>(i) / n);
            if (auto c = make_candidate(mesh, locator, LocalDomain(domain, bp, R0), LocalDomain(domain, bp, R0 / 2)))
                pool.push_back(std::move(*c));
        }
    }

    const auto ntri = static_cast<std::size_t>(mesh.num_triangles());
    std::vector<std::uint8_t> covered(ntri, 0);
    std::size_t num_covered = 0;
    const auto cover = [&](const Candidate& c) {
        for (const Index t : c.core_triangles) {
            if (!covered[static_cast<std::size_t>(t)]) {
                covered[static_cast<std::size_t>(t)] = 1;
                ++num_covered;
            }
        }
    };
    std::vector<Candidate> selected;
    cover(*root);
    selected.push_back(std::move(*root));
    std::vector<std::uint8_t> used(pool.size(), 0);
    while (num_covered < ntri) {
        std::ptrdiff_t best = -1;
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            std::size_t gain = 0;
            bool touches = false;
            for (const Index t : pool[i].core_triangles) {
                if (covered[static_cast<std::size_t>(t)]) touches = true; else ++gain;
            }
            if (!touches || gain == 0) continue;
            if (gain > best_gain ||
                (gain == best_gain && lexicographic_less(pool[i].anchor, pool[static_cast<std::size_t>(best)].anchor))) {
                best = static_cast<std::ptrdiff_t>(i);
                best_gain = gain;
            }
        }
        if (best < 0) throw NumericalFailure("local domain cores do not cover the mesh; mesh too coarse for R0");
        used[static_cast<std::size_t>(best)] = 1;
        cover(pool[static_cast<std::size_t>(best)]);
        selected.push_back(std::move(pool[static_cast<std::size_t>(best)]));
    }

    // Breadth-first order over the core overlap graph, ties by anchor.
    std::vector<std::size_t> order{0};
    std::vector<std::uint8_t> seen(selected.size(), 0);
    seen[0] = 1;
    for (std::size_t head = 0; head < order.size(); ++head) {
        std::vector<std::size_t> next;
        for (std::size_t j = 0; j < selected.size(); ++j) {
            if (!seen[j] && share_any(selected[order[head]].core_triangles, selected[j].core_triangles)) next.push_back(j);
        }
        std::sort(next.begin(), next.end(), [&](std::size_t p, std::size_t q) {
            return lexicographic_less(selected[p].anchor, selected[q].anchor);
        });
        for (const std::size_t j : next) {
            seen[j] = 1;
            order.push_back(j);
        }
    }
    if (order.size() != selected.size()) throw NumericalFailure("chain overlap graph is disconnected");

    std::vector<std::uint8_t> in_prev(ntri, 0);
    for (const std::size_t j : order) {
        Candidate& c = selected[j];
        ChainLink link{std::move(c.region), std::move(c.triangles), std::move(c.core_triangles), 0.0, 0.0};
        for (const Index t : link.triangles) {
            link.area += mesh.area(t);
            if (in_prev[static_cast<std::size_t>(t)]) link.overlap_area += mesh.area(t);
        }
        if (!chain.links.empty() && link.overlap_area <= 0.0) throw NumericalFailure("chain link without overlap");
        for (const Index t : link.triangles) in_prev[static_cast<std::size_t>(t)] = 1;
        chain.links.push_back(std::move(link));
    }
    return chain;
}

// -- local systems -------------------------------------------------------------

struct BogovskiiSolver::LocalSystem {
    std::vector<Index> velocity_dofs;
    std::vector<Index> pressure_dofs;
    bool pinned = false;
    std::unique_ptr<SaddlePointSolver> lu;

    /// Minimal-norm velocity with B u = −F on the local pressures.
    [[nodiscard]] Vector solve(const Vector& F, Index num_velocity_dofs) const {
        const auto nu = static_cast<Index>(velocity_dofs.size());
        const auto start = static_cast<std::size_t>(pinned ? 1 : 0);
        Vector rhs = Vector::Zero(lu->rows());
        for (std::size_t i = start; i < pressure_dofs.size(); ++i)
            rhs[nu + static_cast<Index>(i - start)] = -F[pressure_dofs[i]];
        const Vector x = lu->solve(rhs, kSolveTolerance);
        Vector c = Vector::Zero(num_velocity_dofs);
        for (Index i = 0; i < nu; ++i) c[velocity_dofs[static_cast<std::size_t>(i)]] = x[i];
        return c;
    }
};

namespace {

SparseMatrix extract(const SparseMatrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols,
                     std::vector<Index>& row_map) {
    for (std::size_t i = 0; i < rows.size(); ++i) row_map[static_cast<std::size_t>(rows[i])] = static_cast<Index>(i);
    std::vector<Triplet> trip;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (SparseMatrix::InnerIterator it(m, cols[j]); it; ++it) {
            const Index r = row_map[static_cast<std::size_t>(it.row())];
            if (r >= 0) trip.emplace_back(r, static_cast<Index>(j), it.value());
        }
    }
    for (const Index r : rows) row_map[static_cast<std::size_t>(r)] = -1;
    SparseMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

}  // namespace

BogovskiiSolver::BogovskiiSolver(std::shared_ptr<const FESpace> space, const BoundaryDecomposition& decomposition,
                                 double R0)
    : space_(std::move(space)), domain_(&decomposition.domain()), R0_(R0), stokes_(space_),
      chain_(build_chain(*space_, decomposition, R0)), quad_(domain_quadrature(*space_)) {
    const FESpace& V = *space_;
    if (V.pressure_order() != 1) throw InvalidInput("the divergence solver needs the linear pressure space");
    const TriangleMesh& mesh = V.mesh();
    tri_begin_.assign(static_cast<std::size_t>(mesh.num_triangles()) + 1, 0);
    for (std::size_t k = 0; k < quad_.size(); ++k) ++tri_begin_[static_cast<std::size_t>(quad_.triangle[k]) + 1];
    std::partial_sum(tri_begin_.begin(), tri_begin_.end(), tri_begin_.begin());

    const auto nnodes = static_cast<std::size_t>(V.num_velocity_nodes());
    std::vector<int> global_count(nnodes, 0);
    for (Index t = 0; t < mesh.num_triangles(); ++t)
        for (const Index n : V.velocity_nodes(t)) ++global_count[static_cast<std::size_t>(n)];
    std::vector<std::uint8_t> on_boundary(nnodes, 0);
    for (std::size_t b = 0; b < mesh.boundary_edges().size(); ++b) {
        for (const Index v : mesh.boundary_edges()[b].nodes) on_boundary[static_cast<std::size_t>(v)] = 1;
        on_boundary[static_cast<std::size_t>(V.boundary_edge_node(b))] = 1;
    }

    const SparseMatrix H = stokes_.gradient_stiffness() + stokes_.velocity_mass() / (R0_ * R0_);
    const SparseMatrix Bt = SparseMatrix(stokes_.divergence().transpose());
    std::vector<Index> vmap(static_cast<std::size_t>(V.num_velocity_dofs()), -1);

    const auto build = [&](const std::vector<Index>& tris, const std::vector<std::uint8_t>* window, bool pinned) {
        auto sys = std::make_unique<LocalSystem>();
        sys->pinned = pinned;
        std::unordered_map<Index, int> local_count;
        std::vector<Index> pressure;
        for (const Index t : tris) {
            for (const Index n : V.velocity_nodes(t)) ++local_count[n];
            for (const Index v : mesh.triangles()[static_cast<std::size_t>(t)]) pressure.push_back(v);
        }
        std::sort(pressure.begin(), pressure.end());
        pressure.erase(std::unique(pressure.begin(), pressure.end()), pressure.end());
        std::vector<Index> nodes;
        for (const auto& [n, c] : local_count) {
            const auto un = static_cast<std::size_t>(n);
            if (c != global_count[un] || V.dirichlet_node(n)) continue;
            if (on_boundary[un] && (window == nullptr || !(*window)[un])) continue;
            nodes.push_back(n);
        }
        std::sort(nodes.begin(), nodes.end());
        for (const Index n : nodes) {
            sys->velocity_dofs.push_back(2 * n);
            sys->velocity_dofs.push_back(2 * n + 1);
        }
        sys->pressure_dofs = pressure;
        std::vector<Index> rows(pressure.begin() + (pinned ? 1 : 0), pressure.end());
        const SparseMatrix Hl = extract(H, sys->velocity_dofs, sys->velocity_dofs, vmap);
        const SparseMatrix Bl = extract(Bt, sys->velocity_dofs, rows, vmap);  // velocity × pressure
        const Index nu = Hl.rows();
        const auto np = static_cast<Index>(rows.size());
        if (nu == 0) throw NumericalFailure("local domain has no free velocity nodes; mesh too coarse for R0");
        std::vector<Triplet> trip;
        for (Index j = 0; j < Hl.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(Hl, j); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
        for (Index j = 0; j < Bl.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(Bl, j); it; ++it) {
                trip.emplace_back(it.row(), nu + it.col(), it.value());
                trip.emplace_back(nu + it.col(), it.row(), it.value());
            }
        }
        SparseMatrix K(nu + np, nu + np);
        K.setFromTriplets(trip.begin(), trip.end());
        sys->lu = std::make_unique<SaddlePointSolver>(K, nu);
        return sys;
    };

    for (const ChainLink& link : chain_.links) systems_.push_back(build(link.triangles, nullptr, true));

    // Flux window: N edges of the first link (vertices need both boundary neighbours in the window).
    const ChainLink& root = chain_.links.front();
    std::vector<std::uint8_t> in_root(static_cast<std::size_t>(mesh.num_triangles()), 0);
    for (const Index t : root.triangles) in_root[static_cast<std::size_t>(t)] = 1;
    std::unordered_map<std::uint64_t, Index> edge_owner;
    for (const Index t : root.triangles) {
        const auto& v = mesh.triangles()[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) edge_owner[edge_key(v[i], v[(i + 1) % 3])] = t;
    }
    std::vector<std::uint8_t> window(nnodes, 0);
    std::vector<int> window_edges_at(nnodes, 0), boundary_edges_at(nnodes, 0);
    for (std::size_t b = 0; b < mesh.boundary_edges().size(); ++b) {
        const BoundaryEdge& e = mesh.boundary_edges()[b];
        for (const Index v : e.nodes) ++boundary_edges_at[static_cast<std::size_t>(v)];
        if (e.label != BoundaryLabel::Neumann || !edge_owner.count(edge_key(e.nodes[0], e.nodes[1]))) continue;
        window[static_cast<std::size_t>(V.boundary_edge_node(b))] = 1;
        for (const Index v : e.nodes) ++window_edges_at[static_cast<std::size_t>(v)];
        chain_.flux_window += (mesh.nodes()[static_cast<std::size_t>(e.nodes[1])] -
                               mesh.nodes()[static_cast<std::size_t>(e.nodes[0])]).norm();
    }
    for (Index v = 0; v < mesh.num_nodes(); ++v) {
        const auto uv = static_cast<std::size_t>(v);
        if (window_edges_at[uv] > 0 && window_edges_at[uv] == boundary_edges_at[uv]) window[uv] = 1;
    }
    if (chain_.flux_window <= 0.0) throw NumericalFailure("first chain link has no N edge to carry the flux", "NOpen");
    flux_system_ = build(root.triangles, &window, false);

    Vector indicator = Vector::Zero(static_cast<Index>(quad_.size()));
    for (const Index t : root.triangles)
        for (std::size_t k = tri_begin_[static_cast<std::size_t>(t)]; k < tri_begin_[static_cast<std::size_t>(t) + 1]; ++k)
            indicator[static_cast<Index>(k)] = 1.0 / root.area;
    eta_ = std::make_unique<VelocityField>(space_, flux_system_->solve(pressure_loads(indicator), V.num_velocity_dofs()));
}

BogovskiiSolver::~BogovskiiSolver() = default;

Vector BogovskiiSolver::sample(const std::function<double(const Vec2&)>& f) const {
    Vector v(static_cast<Index>(quad_.size()));
    for (std::size_t k = 0; k < quad_.size(); ++k) v[static_cast<Index>(k)] = f(quad_.point[k]);
    return v;
}

Vector BogovskiiSolver::pressure_loads(const Vector& f) const {
    if (f.size() != static_cast<Index>(quad_.size())) throw InvalidInput("divergence datum has the wrong node count");
    Vector F = Vector::Zero(space_->num_pressure_dofs());
    for (std::size_t k = 0; k < quad_.size(); ++k) {
        const double wf = quad_.weight[k] * f[static_cast<Index>(k)];
        if (wf == 0.0) continue;
        const auto& v = space_->mesh().triangles()[static_cast<std::size_t>(quad_.triangle[k])];
        for (int i = 0; i < 3; ++i) F[v[static_cast<std::size_t>(i)]] += wf * quad_.bary[k][static_cast<std::size_t>(i)];
    }
    return F;
}

std::vector<Vector> BogovskiiSolver::decompose(const Vector& f) const {
    if (f.size() != static_cast<Index>(quad_.size())) throw InvalidInput("divergence datum has the wrong node count");
    const TriangleMesh& mesh = space_->mesh();
    const std::size_t n = chain_.links.size();
    std::vector<std::size_t> first(static_cast<std::size_t>(mesh.num_triangles()), n);
    for (std::size_t j = n; j-- > 0;)
        for (const Index t : chain_.links[j].triangles) first[static_cast<std::size_t>(t)] = j;
    for (const std::size_t j : first)
        if (j == n) throw InvalidInput("chain does not cover the mesh");

    std::vector<Vector> parts(n, Vector::Zero(f.size()));
    Vector r = f;
    const auto nodes_of = [this](Index t) {
        return std::pair{tri_begin_[static_cast<std::size_t>(t)], tri_begin_[static_cast<std::size_t>(t) + 1]};
    };
    for (std::size_t k = n; k-- > 1;) {
        double mass = 0.0, overlap = 0.0;
        for (const Index t : chain_.links[k].triangles) {
            const auto [b, e] = nodes_of(t);
            if (first[static_cast<std::size_t>(t)] == k) {
                for (std::size_t q = b; q < e; ++q) mass += quad_.weight[q] * r[static_cast<Index>(q)];
            } else {
                overlap += mesh.area(t);
            }
        }
        Vector& fk = parts[k];
        for (const Index t : chain_.links[k].triangles) {
            const auto [b, e] = nodes_of(t);
            const bool fresh = first[static_cast<std::size_t>(t)] == k;
            for (std::size_t q = b; q < e; ++q) {
                const auto i = static_cast<Index>(q);
                fk[i] = fresh ? r[i] : -mass / overlap;
                r[i] -= fk[i];
            }
        }
    }
    parts[0] = r;
    return parts;
}

VelocityField BogovskiiSolver::local_solve(std::size_t link, const Vector& f_link) const {
    if (link >= systems_.size()) throw InvalidInput("chain link index out of range");
    double mass = 0.0, total = 0.0;
    for (std::size_t k = 0; k < quad_.size(); ++k) {
        mass += quad_.weight[k] * f_link[static_cast<Index>(k)];
        total += quad_.weight[k] * std::abs(f_link[static_cast<Index>(k)]);
    }
    if (std::abs(mass) > kMeanTolerance * std::max(total, 1e-300) && total > 0.0)
        throw InvalidInput("local divergence datum must have zero mean");
    if (total == 0.0) return VelocityField::zero(space_);
    return {space_, systems_[link]->solve(pressure_loads(f_link), space_->num_velocity_dofs())};
}

std::vector<VelocityField> BogovskiiSolver::stages(const Vector& f) const {
    const std::vector<Vector> parts = decompose(f);
    std::vector<VelocityField> out;
    out.reserve(parts.size());
    const ChainLink& root = chain_.links.front();
    double mass = 0.0;
    for (std::size_t k = 0; k < quad_.size(); ++k) mass += quad_.weight[k] * parts[0][static_cast<Index>(k)];
    Vector f0 = parts[0];
    for (const Index t : root.triangles)
        for (std::size_t q = tri_begin_[static_cast<std::size_t>(t)]; q < tri_begin_[static_cast<std::size_t>(t) + 1]; ++q)
            f0[static_cast<Index>(q)] -= mass / root.area;
    out.emplace_back(space_, local_solve(0, f0).coefficients() + mass * eta_->coefficients());
    for (std::size_t j = 1; j < parts.size(); ++j) out.push_back(local_solve(j, parts[j]));
    return out;
}

VelocityField BogovskiiSolver::solve(const Vector& f) const {
    Vector c = Vector::Zero(space_->num_velocity_dofs());
    for (const VelocityField& u : stages(f)) c += u.coefficients();
    return {space_, std::move(c)};
}

BogovskiiReport BogovskiiSolver::check(const Vector& f) const {
    BogovskiiReport rep;
    const VelocityField u = solve(f);
    const FESpace& V = *space_;
    const Vector F = pressure_loads(f);
    const Vector r = stokes_.divergence() * u.coefficients() + F;
    const Vector magnitude = stokes_.divergence().cwiseAbs() * u.coefficients().cwiseAbs() + F.cwiseAbs();
    const double scale = magnitude.lpNorm<Eigen::Infinity>();
    rep.divergence_residual = scale > 0.0 ? r.lpNorm<Eigen::Infinity>() / scale : 0.0;
    for (Index n = 0; n < V.num_velocity_nodes(); ++n) {
        if (V.dirichlet_node(n))
            rep.dirichlet_trace = std::max(rep.dirichlet_trace, std::hypot(u.coefficients()[2 * n], u.coefficients()[2 * n + 1]));
    }
    const TriangleMesh& mesh = V.mesh();
    for (std::size_t b = 0; b < mesh.boundary_edges().size(); ++b) {
        const BoundaryEdge& e = mesh.boundary_edges()[b];
        if (e.label != BoundaryLabel::Neumann) continue;
        const Vec2 a = mesh.nodes()[static_cast<std::size_t>(e.nodes[0])];
        const Vec2 d = mesh.nodes()[static_cast<std::size_t>(e.nodes[1])] - a;
        const Vec2 normal(d.y(), -d.x());  // length-weighted outward normal
        const auto value = [&u](Index n) { return Vec2(u.coefficients()[2 * n], u.coefficients()[2 * n + 1]); };
        const Vec2 mean = (value(e.nodes[0]) + 4.0 * value(V.boundary_edge_node(b)) + value(e.nodes[1])) / 6.0;
        rep.neumann_flux += mean.dot(normal);
    }
    double fnorm2 = 0.0;
    for (std::size_t k = 0; k < quad_.size(); ++k) fnorm2 += quad_.weight[k] * f[static_cast<Index>(k)] * f[static_cast<Index>(k)];
    const double fnorm = std::sqrt(fnorm2);
    const SobolevSeminorms s = sobolev_seminorms(u, R0_);
    rep.stability = fnorm > 0.0 ? s.scaled_h1 / fnorm : 0.0;

    const std::vector<Vector> parts = decompose(f);
    double sum = 0.0;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        double n2 = 0.0;
        for (std::size_t k = 0; k < quad_.size(); ++k)
            n2 += quad_.weight[k] * parts[j][static_cast<Index>(k)] * parts[j][static_cast<Index>(k)];
        sum += std::sqrt(n2);
        if (j == 0 || n2 == 0.0) continue;
        const Vector uj = local_solve(j, parts[j]).coefficients();
        const double grad = std::sqrt(std::max(0.0, uj.dot(stokes_.gradient_stiffness() * uj)));
        rep.local_constant = std::max(rep.local_constant, grad * R0_ / std::sqrt(n2));
    }
    rep.decomposition_constant = fnorm > 0.0 ? sum / fnorm : 0.0;
    return rep;
}

}  // namespace mixedgreen
