#pragma once

/// @file linear_solver.hpp
/// @brief Sparse symmetric factorizations with a residual contract.

#include "mixedgreen/types.hpp"

#include <memory>

namespace mixedgreen {

/// Symmetric saddle-point solver for K = [H Bᵀ; B −C] with H positive definite
/// on the first `num_primal` unknowns and C positive semidefinite. After
/// symmetric equilibration, factors the quasi-definite shift K − diag(0, δ) by
/// sparse LDLᵀ and refines against K. The residual contract is measured on the
/// equilibrated system.
/// Needs the constraint block to have full row rank.
class SaddlePointSolver {
public:
    SaddlePointSolver(const SparseMatrix& matrix, Index num_primal, double relative_shift = 1e-8);
    ~SaddlePointSolver();
    SaddlePointSolver(SaddlePointSolver&&) noexcept;
    SaddlePointSolver& operator=(SaddlePointSolver&&) noexcept;

    /// Refines to the roundoff floor, then throws NumericalFailure unless ‖b − Kx‖ ≤ tol ‖b‖.
    [[nodiscard]] Vector solve(const Vector& rhs, double tol, double* achieved = nullptr) const;
    [[nodiscard]] Index rows() const noexcept { return matrix_.rows(); }

private:
    struct Impl;
    SparseMatrix matrix_;
    std::unique_ptr<Impl> impl_;
};

/// Sparse Cholesky for symmetric positive definite matrices.
class SparseCholesky {
public:
    explicit SparseCholesky(const SparseMatrix& matrix);
    ~SparseCholesky();
    SparseCholesky(SparseCholesky&&) noexcept;
    SparseCholesky& operator=(SparseCholesky&&) noexcept;

    [[nodiscard]] Vector solve(const Vector& rhs) const;
    [[nodiscard]] Index rows() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mixedgreen
