#pragma once

/// @file stokes.hpp
/// @brief The mixed Stokes saddle system: a(u, v) = 2∫ε(u):ε(v), the
/// divergence coupling, load functionals (λ, μ), the forward operator T and
/// its inverse.

#include "mixedgreen/fe_space.hpp"
#include "mixedgreen/linear_solver.hpp"

#include <functional>
#include <memory>
#include <mutex>

namespace mixedgreen {

/// Data of the mixed problem. Unset members are zero.
struct Loads {
    std::function<Vec2(const Vec2&)> body_force;
    std::function<double(const Vec2&)> divergence;
    std::function<Vec2(const Vec2&)> divergence_gradient;
    /// Traction on N, given the point and the outward unit normal.
    std::function<Vec2(const Vec2&, const Vec2&)> traction;
    /// Dirichlet values on D; handled by lifting.
    std::function<Vec2(const Vec2&)> dirichlet;
};

/// λ over all velocity dofs (entries on D are ignored by the solver), μ over pressure dofs.
struct LoadVectors {
    Vector lambda;
    Vector mu;
};

struct StokesSolution {
    VelocityField u;
    PressureField p;
    /// Block residuals of the saddle system relative to the full right-hand side.
    double velocity_residual = 0.0;
    double pressure_residual = 0.0;
};

/// Relative residual bound every solve must meet.
inline constexpr double kSolveTolerance = 1e-10;

class StokesProblem {
public:
    explicit StokesProblem(std::shared_ptr<const FESpace> space);

    [[nodiscard]] const FESpace& space() const noexcept { return *space_; }
    [[nodiscard]] const std::shared_ptr<const FESpace>& space_ptr() const noexcept { return space_; }

    /// 2∫ε(φ_i):ε(φ_j) over all velocity dofs.
    [[nodiscard]] const SparseMatrix& stiffness() const noexcept { return A_; }
    /// ∫∇φ_i:∇φ_j.
    [[nodiscard]] const SparseMatrix& gradient_stiffness() const noexcept { return G_; }
    [[nodiscard]] const SparseMatrix& velocity_mass() const noexcept { return Mv_; }
    /// Rows: pressure dofs; columns: velocity dofs; entries −∫q div φ.
    [[nodiscard]] const SparseMatrix& divergence() const noexcept { return B_; }
    [[nodiscard]] const SparseMatrix& pressure_mass() const noexcept { return Mp_; }
    /// Restriction of a velocity-by-velocity matrix to the free dofs.
    [[nodiscard]] SparseMatrix restrict_free(const SparseMatrix& m) const;
    /// Restriction of B to the free velocity columns.
    [[nodiscard]] SparseMatrix divergence_free_columns() const;

    /// True when N = ∅ and the pressure is normalized to zero mean.
    [[nodiscard]] bool pressure_pinned() const noexcept { return pinned_; }

    /// λ(φ) = ∫f·φ + ∫_N f_N·φ dσ − ∫∇g·φ and μ(q) = ∫g q.
    [[nodiscard]] LoadVectors assemble(const Loads& loads) const;
    /// Discrete T^{-1}(λ, μ) with homogeneous Dirichlet data.
    [[nodiscard]] StokesSolution solve(const LoadVectors& loads) const;
    /// Assembles, lifts Dirichlet data, solves.
    [[nodiscard]] StokesSolution solve(const Loads& loads) const;
    /// λ = A u + Bᵀ p, μ = B u.
    [[nodiscard]] LoadVectors apply_T(const VelocityField& u, const PressureField& p) const;

    /// inf over pressures of sup over free velocities of ∫q div v / (‖q‖ ‖v‖_{H¹}),
    /// restricted to mean-zero pressures when N = ∅. Computed as the square root
    /// of the smallest eigenvalue of the Schur complement pencil by Lanczos.
    [[nodiscard]] double inf_sup_constant() const;

private:
    void check_solvable() const;
    const SaddlePointSolver& factorization() const;

    std::shared_ptr<const FESpace> space_;
    SparseMatrix A_, G_, Mv_, B_, Mp_;
    bool pinned_ = false;
    mutable std::once_flag lu_once_;
    mutable std::unique_ptr<SaddlePointSolver> solver_;
};

/// Smallest eigenvalue of the symmetric pencil (S, M) with S applied
/// matrix-free, by Lanczos in the M inner product with full
/// reorthogonalization. `deflate` (optional) is an M-orthogonal projector
/// applied to every Krylov vector.
[[nodiscard]] double smallest_pencil_eigenvalue(const std::function<Vector(const Vector&)>& apply_S,
                                                const SparseMatrix& M,
                                                const std::function<void(Vector&)>& deflate, Index max_steps,
                                                double tol, std::uint64_t seed = 12345);

}  // namespace mixedgreen
