#include "mixedgreen/fe_space.hpp"

#include <algorithm>
#include <unordered_map>

namespace mixedgreen {

namespace {

std::uint64_t edge_key(Index a, Index b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
    return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],         4.0 * l[1] * l[2],         4.0 * l[2] * l[0]};
}

std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& l, const std::array<Vec2, 3>& g) {
    return {(4.0 * l[0] - 1.0) * g[0],        (4.0 * l[1] - 1.0) * g[1],        (4.0 * l[2] - 1.0) * g[2],
            4.0 * (l[0] * g[1] + l[1] * g[0]), 4.0 * (l[1] * g[2] + l[2] * g[1]), 4.0 * (l[2] * g[0] + l[0] * g[2])};
}

FESpace::FESpace(std::shared_ptr<const TriangleMesh> mesh, int pressure_order)
    : mesh_(std::move(mesh)), pressure_order_(pressure_order) {
    if (!mesh_ || mesh_->num_triangles() == 0) throw InvalidInput("finite element space needs a nonempty mesh");
    if (pressure_order != 1 && pressure_order != 2) throw InvalidInput("pressure order must be 1 or 2");
    locator_ = std::make_unique<PointLocator>(*mesh_);

    std::unordered_map<std::uint64_t, Index> ids;
    tri_edges_.reserve(mesh_->triangles().size());
    for (const auto& t : mesh_->triangles()) {
        std::array<Index, 3> te{};
        for (int k = 0; k < 3; ++k) {
            const Index a = t[static_cast<std::size_t>(k)];
            const Index b = t[static_cast<std::size_t>((k + 1) % 3)];
            auto [it, fresh] = ids.try_emplace(edge_key(a, b), static_cast<Index>(edges_.size()));
            if (fresh) edges_.push_back({std::min(a, b), std::max(a, b)});
            te[static_cast<std::size_t>(k)] = it->second;
        }
        tri_edges_.push_back(te);
    }

    dirichlet_.assign(static_cast<std::size_t>(num_velocity_nodes()), 0);
    for (Index v = 0; v < num_vertices(); ++v) dirichlet_[static_cast<std::size_t>(v)] = mesh_->dirichlet_vertex()[static_cast<std::size_t>(v)];
    for (const auto& b : mesh_->boundary_edges()) {
        const auto it = ids.find(edge_key(b.nodes[0], b.nodes[1]));
        if (it == ids.end()) throw InvalidInput("boundary edge is not an edge of the mesh");
        const Index node = num_vertices() + it->second;
        boundary_edge_node_.push_back(node);
        if (b.label == BoundaryLabel::Dirichlet) dirichlet_[static_cast<std::size_t>(node)] = 1;
    }

    free_index_.assign(static_cast<std::size_t>(num_velocity_dofs()), -1);
    for (Index n = 0; n < num_velocity_nodes(); ++n) {
        if (dirichlet_[static_cast<std::size_t>(n)]) {
            ++num_dirichlet_;
            continue;
        }
        for (Index c = 0; c < 2; ++c) {
            free_index_[static_cast<std::size_t>(2 * n + c)] = num_free_++;
            free_dofs_.push_back(2 * n + c);
        }
    }
}

ElementGeometry FESpace::geometry(Index t) const {
    ElementGeometry g;
    g.corners = mesh_->corners(t);
    const auto& x = g.corners;
    const double area2 = cross(x[1] - x[0], x[2] - x[0]);
    g.area = 0.5 * area2;
    for (int i = 0; i < 3; ++i) {
        const Vec2 d = x[static_cast<std::size_t>((i + 2) % 3)] - x[static_cast<std::size_t>((i + 1) % 3)];
        g.grad_lambda[static_cast<std::size_t>(i)] = Vec2(-d.y(), d.x()) / area2;
    }
    return g;
}

std::array<Index, 6> FESpace::velocity_nodes(Index t) const {
    const auto& v = mesh_->triangles()[static_cast<std::size_t>(t)];
    const auto& e = tri_edges_[static_cast<std::size_t>(t)];
    const Index nv = num_vertices();
    return {v[0], v[1], v[2], nv + e[0], nv + e[1], nv + e[2]};
}

Vec2 FESpace::node_position(Index node) const {
    if (node < num_vertices()) return mesh_->nodes()[static_cast<std::size_t>(node)];
    const auto& e = edges_[static_cast<std::size_t>(node - num_vertices())];
    return 0.5 * (mesh_->nodes()[static_cast<std::size_t>(e[0])] + mesh_->nodes()[static_cast<std::size_t>(e[1])]);
}

bool FESpace::has_dirichlet_edges() const noexcept {
    return std::any_of(mesh_->boundary_edges().begin(), mesh_->boundary_edges().end(),
                       [](const BoundaryEdge& b) { return b.label == BoundaryLabel::Dirichlet; });
}

bool FESpace::has_neumann_edges() const noexcept {
    return std::any_of(mesh_->boundary_edges().begin(), mesh_->boundary_edges().end(),
                       [](const BoundaryEdge& b) { return b.label == BoundaryLabel::Neumann; });
}

int pressure_basis(const FESpace& space, Index t, const std::array<double, 3>& bary, std::array<double, 6>& values,
                   std::array<Index, 6>& dofs) {
    if (space.pressure_order() == 1) {
        const auto& v = space.mesh().triangles()[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            values[static_cast<std::size_t>(i)] = bary[static_cast<std::size_t>(i)];
            dofs[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
        }
        return 3;
    }
    values = p2_values(bary);
    dofs = space.velocity_nodes(t);
    return 6;
}

// -- fields --------------------------------------------------------------------

VelocityField::VelocityField(std::shared_ptr<const FESpace> space, Vector coefficients)
    : space_(std::move(space)), c_(std::move(coefficients)) {
    if (c_.size() != space_->num_velocity_dofs()) throw InvalidInput("velocity coefficient size mismatch");
}

VelocityField VelocityField::zero(std::shared_ptr<const FESpace> space) {
    const Index n = space->num_velocity_dofs();
    return {std::move(space), Vector::Zero(n)};
}

Vec2 VelocityField::value(Index t, const std::array<double, 3>& bary) const {
    const auto nodes = space_->velocity_nodes(t);
    const auto phi = p2_values(bary);
    Vec2 u = Vec2::Zero();
    for (int a = 0; a < 6; ++a) {
        const Index n = nodes[static_cast<std::size_t>(a)];
        u += phi[static_cast<std::size_t>(a)] * Vec2(c_[2 * n], c_[2 * n + 1]);
    }
    return u;
}

Mat2 VelocityField::gradient(Index t, const std::array<double, 3>& bary) const {
    const auto nodes = space_->velocity_nodes(t);
    const auto grads = p2_gradients(bary, space_->geometry(t).grad_lambda);
    Mat2 g = Mat2::Zero();
    for (int a = 0; a < 6; ++a) {
        const Index n = nodes[static_cast<std::size_t>(a)];
        g += Vec2(c_[2 * n], c_[2 * n + 1]) * grads[static_cast<std::size_t>(a)].transpose();
    }
    return g;
}

Vec2 VelocityField::value(const Vec2& p) const {
    const auto loc = space_->locator().locate(p);
    if (loc.triangle < 0) throw InvalidInput("evaluation point lies outside the mesh");
    return value(loc.triangle, loc.bary);
}

Mat2 VelocityField::gradient(const Vec2& p) const {
    const auto loc = space_->locator().locate(p);
    if (loc.triangle < 0) throw InvalidInput("evaluation point lies outside the mesh");
    return gradient(loc.triangle, loc.bary);
}

PressureField::PressureField(std::shared_ptr<const FESpace> space, Vector coefficients)
    : space_(std::move(space)), c_(std::move(coefficients)) {
    if (c_.size() != space_->num_pressure_dofs()) throw InvalidInput("pressure coefficient size mismatch");
}

PressureField PressureField::zero(std::shared_ptr<const FESpace> space) {
    const Index n = space->num_pressure_dofs();
    return {std::move(space), Vector::Zero(n)};
}

double PressureField::value(Index t, const std::array<double, 3>& bary) const {
    std::array<double, 6> psi{};
    std::array<Index, 6> dofs{};
    const int n = pressure_basis(*space_, t, bary, psi, dofs);
    double p = 0.0;
    for (int i = 0; i < n; ++i) p += psi[static_cast<std::size_t>(i)] * c_[dofs[static_cast<std::size_t>(i)]];
    return p;
}

double PressureField::value(const Vec2& p) const {
    const auto loc = space_->locator().locate(p);
    if (loc.triangle < 0) throw InvalidInput("evaluation point lies outside the mesh");
    return value(loc.triangle, loc.bary);
}

// -- relabeling ----------------------------------------------------------------

TriangleMesh relabel(const TriangleMesh& mesh, const BoundaryDecomposition& decomposition) {
    const auto& dom = decomposition.domain();
    auto param = [&](std::size_t e, const Vec2& p) {
        const Vec2 ab = dom.edge_end(e) - dom.edge_start(e);
        return std::clamp((p - dom.edge_start(e)).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    };
    std::vector<BoundaryEdge> boundary = mesh.boundary_edges();
    std::vector<std::uint8_t> dirichlet(static_cast<std::size_t>(mesh.num_nodes()), 0);
    for (auto& b : boundary) {
        const Vec2& a = mesh.nodes()[static_cast<std::size_t>(b.nodes[0])];
        const Vec2& c = mesh.nodes()[static_cast<std::size_t>(b.nodes[1])];
        const double ta = param(b.polygon_edge, a);
        const double tc = param(b.polygon_edge, c);
        b.label = decomposition.label_at(b.polygon_edge, 0.5 * (ta + tc));
        if (decomposition.label_at(b.polygon_edge, ta) == BoundaryLabel::Dirichlet)
            dirichlet[static_cast<std::size_t>(b.nodes[0])] = 1;
        if (decomposition.label_at(b.polygon_edge, tc) == BoundaryLabel::Dirichlet)
            dirichlet[static_cast<std::size_t>(b.nodes[1])] = 1;
    }
    return TriangleMesh(mesh.nodes(), mesh.triangles(), std::move(boundary), std::move(dirichlet));
}

}  // namespace mixedgreen
