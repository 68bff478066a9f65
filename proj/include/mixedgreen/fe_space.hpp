#pragma once

/// @file fe_space.hpp
/// @brief Continuous quadratic velocity / continuous linear pressure spaces
/// and the discrete fields living on them.

#include "mixedgreen/mesh.hpp"

#include <array>
#include <memory>
#include <vector>

namespace mixedgreen {

/// Per-triangle affine data.
struct ElementGeometry {
    std::array<Vec2, 3> corners;
    double area = 0.0;
    std::array<Vec2, 3> grad_lambda;

    [[nodiscard]] Vec2 point(const std::array<double, 3>& bary) const {
        return bary[0] * corners[0] + bary[1] * corners[1] + bary[2] * corners[2];
    }
};

/// Quadratic Lagrange basis: vertex functions λ_i(2λ_i − 1), then edge
/// functions 4λ0λ1, 4λ1λ2, 4λ2λ0.
[[nodiscard]] std::array<double, 6> p2_values(const std::array<double, 3>& bary);
[[nodiscard]] std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& bary,
                                               const std::array<Vec2, 3>& grad_lambda);

class FESpace {
public:
    /// `pressure_order` 1 is the stable pair; 2 gives an equal-order pair used
    /// to exercise inf-sup breakdown detection.
    explicit FESpace(std::shared_ptr<const TriangleMesh> mesh, int pressure_order = 1);

    [[nodiscard]] const TriangleMesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const TriangleMesh>& mesh_ptr() const noexcept { return mesh_; }
    [[nodiscard]] const PointLocator& locator() const noexcept { return *locator_; }
    [[nodiscard]] ElementGeometry geometry(Index t) const;

    [[nodiscard]] int pressure_order() const noexcept { return pressure_order_; }
    [[nodiscard]] Index num_vertices() const noexcept { return mesh_->num_nodes(); }
    [[nodiscard]] Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }
    /// Velocity nodes: mesh vertices followed by edge midpoints.
    [[nodiscard]] Index num_velocity_nodes() const noexcept { return num_vertices() + num_edges(); }
    /// Interleaved: dof 2·node + component.
    [[nodiscard]] Index num_velocity_dofs() const noexcept { return 2 * num_velocity_nodes(); }
    [[nodiscard]] Index num_pressure_dofs() const noexcept {
        return pressure_order_ == 1 ? num_vertices() : num_velocity_nodes();
    }

    [[nodiscard]] const std::array<Index, 2>& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }
    /// Six velocity nodes of a triangle in basis order.
    [[nodiscard]] std::array<Index, 6> velocity_nodes(Index t) const;
    [[nodiscard]] Vec2 node_position(Index node) const;

    [[nodiscard]] bool dirichlet_node(Index node) const { return dirichlet_[static_cast<std::size_t>(node)] != 0; }
    [[nodiscard]] Index num_dirichlet_nodes() const noexcept { return num_dirichlet_; }
    /// Index among unconstrained velocity dofs, or -1 on D.
    [[nodiscard]] Index free_index(Index dof) const { return free_index_[static_cast<std::size_t>(dof)]; }
    [[nodiscard]] Index num_free_dofs() const noexcept { return num_free_; }
    [[nodiscard]] const std::vector<Index>& free_dofs() const noexcept { return free_dofs_; }
    /// Velocity node at the midpoint of each mesh boundary edge, aligned with mesh().boundary_edges().
    [[nodiscard]] Index boundary_edge_node(std::size_t b) const { return boundary_edge_node_[b]; }

    [[nodiscard]] bool has_dirichlet_edges() const noexcept;
    [[nodiscard]] bool has_neumann_edges() const noexcept;

private:
    std::shared_ptr<const TriangleMesh> mesh_;
    std::unique_ptr<PointLocator> locator_;
    int pressure_order_;
    std::vector<std::array<Index, 2>> edges_;
    std::vector<std::array<Index, 3>> tri_edges_;
    std::vector<Index> boundary_edge_node_;
    std::vector<std::uint8_t> dirichlet_;
    Index num_dirichlet_ = 0;
    std::vector<Index> free_index_;
    std::vector<Index> free_dofs_;
    Index num_free_ = 0;
};

class VelocityField {
public:
    VelocityField(std::shared_ptr<const FESpace> space, Vector coefficients);
    [[nodiscard]] static VelocityField zero(std::shared_ptr<const FESpace> space);
    /// Nodal interpolant of a vector function.
    template <class F>
    [[nodiscard]] static VelocityField interpolate(std::shared_ptr<const FESpace> space, F&& f) {
        Vector c(space->num_velocity_dofs());
        for (Index n = 0; n < space->num_velocity_nodes(); ++n) {
            const Vec2 v = f(space->node_position(n));
            c[2 * n] = v.x();
            c[2 * n + 1] = v.y();
        }
        return {std::move(space), std::move(c)};
    }

    [[nodiscard]] const FESpace& space() const noexcept { return *space_; }
    [[nodiscard]] const std::shared_ptr<const FESpace>& space_ptr() const noexcept { return space_; }
    [[nodiscard]] const Vector& coefficients() const noexcept { return c_; }

    [[nodiscard]] Vec2 value(Index t, const std::array<double, 3>& bary) const;
    /// Row i, column j holds ∂u_i/∂y_j.
    [[nodiscard]] Mat2 gradient(Index t, const std::array<double, 3>& bary) const;
    /// Throws InvalidInput when p lies outside the mesh.
    [[nodiscard]] Vec2 value(const Vec2& p) const;
    [[nodiscard]] Mat2 gradient(const Vec2& p) const;

private:
    std::shared_ptr<const FESpace> space_;
    Vector c_;
};

class PressureField {
public:
    PressureField(std::shared_ptr<const FESpace> space, Vector coefficients);
    [[nodiscard]] static PressureField zero(std::shared_ptr<const FESpace> space);
    template <class F>
    [[nodiscard]] static PressureField interpolate(std::shared_ptr<const FESpace> space, F&& f) {
        Vector c(space->num_pressure_dofs());
        for (Index n = 0; n < c.size(); ++n) c[n] = f(space->node_position(n));
        return {std::move(space), std::move(c)};
    }

    [[nodiscard]] const FESpace& space() const noexcept { return *space_; }
    [[nodiscard]] const Vector& coefficients() const noexcept { return c_; }
    [[nodiscard]] double value(Index t, const std::array<double, 3>& bary) const;
    [[nodiscard]] double value(const Vec2& p) const;

private:
    std::shared_ptr<const FESpace> space_;
    Vector c_;
};

/// Pressure basis values on a triangle (3 for linear, 6 for quadratic pressure).
[[nodiscard]] int pressure_basis(const FESpace& space, Index t, const std::array<double, 3>& bary,
                                 std::array<double, 6>& values, std::array<Index, 6>& dofs);

/// Copy of the mesh with boundary labels and D vertex flags recomputed from
/// another decomposition of the same polygon. Its transition points must be mesh nodes.
[[nodiscard]] TriangleMesh relabel(const TriangleMesh& mesh, const BoundaryDecomposition& decomposition);

}  // namespace mixedgreen
