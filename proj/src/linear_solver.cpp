#include "mixedgreen/linear_solver.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/SparseCholesky>

namespace mixedgreen {

struct SaddlePointSolver::Impl {
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    Vector scale;
};

SaddlePointSolver::SaddlePointSolver(const SparseMatrix& matrix, Index num_primal, double relative_shift)
    : impl_(std::make_unique<Impl>()) {
    if (matrix.rows() != matrix.cols() || num_primal < 0 || num_primal > matrix.rows())
        throw InvalidInput("saddle-point block sizes do not match the matrix");
    // Symmetric equilibration by row maxima.
    Vector rowmax = Vector::Zero(matrix.rows());
    for (Index j = 0; j < matrix.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(matrix, j); it; ++it)
            rowmax[it.row()] = std::max(rowmax[it.row()], std::abs(it.value()));
    impl_->scale = Vector::Ones(matrix.rows());
    for (Index i = 0; i < matrix.rows(); ++i)
        if (rowmax[i] > 0.0) impl_->scale[i] = 1.0 / std::sqrt(rowmax[i]);
    matrix_ = impl_->scale.asDiagonal() * matrix * impl_->scale.asDiagonal();
    Vector shift = Vector::Zero(matrix_.rows());
    shift.tail(matrix_.rows() - num_primal).setConstant(relative_shift);
    SparseMatrix diagonal(matrix_.rows(), matrix_.rows());
    diagonal.setIdentity();
    diagonal = shift.asDiagonal() * diagonal;
    impl_->ldlt.compute(matrix_ - diagonal);
    if (impl_->ldlt.info() != Eigen::Success) throw NumericalFailure("saddle-point factorization failed");
}

SaddlePointSolver::~SaddlePointSolver() = default;
SaddlePointSolver::SaddlePointSolver(SaddlePointSolver&&) noexcept = default;
SaddlePointSolver& SaddlePointSolver::operator=(SaddlePointSolver&&) noexcept = default;

Vector SaddlePointSolver::solve(const Vector& original, double tol, double* achieved) const {
    const Vector rhs = impl_->scale.cwiseProduct(original);
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        if (achieved) *achieved = 0.0;
        return Vector::Zero(rhs.size());
    }
    // Refine down to the roundoff floor; the contract is checked afterwards.
    Vector x = impl_->ldlt.solve(rhs);
    Vector r = rhs - matrix_ * x;
    double rel = r.norm() / bnorm;
    for (int step = 0; step < 40 && std::isfinite(rel) && rel > 1e-15; ++step) {
        const Vector candidate = x + impl_->ldlt.solve(r);
        const Vector next_r = rhs - matrix_ * candidate;
        const double next = next_r.norm() / bnorm;
        if (!(next < 0.5 * rel)) break;
        x = candidate;
        r = next_r;
        rel = next;
    }
    if (achieved) *achieved = rel;
    if (!(rel <= tol)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "saddle-point solve missed the residual contract: relative residual %.3e", rel);
        throw NumericalFailure(msg);
    }
    return impl_->scale.cwiseProduct(x);
}

struct SparseCholesky::Impl {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

SparseCholesky::SparseCholesky(const SparseMatrix& matrix) : impl_(std::make_unique<Impl>()) {
    impl_->ldlt.compute(matrix);
    if (impl_->ldlt.info() != Eigen::Success) throw NumericalFailure("sparse Cholesky factorization failed");
    if ((impl_->ldlt.vectorD().array() <= 0.0).any())
        throw NumericalFailure("matrix is not positive definite");
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

Vector SparseCholesky::solve(const Vector& rhs) const { return impl_->ldlt.solve(rhs); }

Index SparseCholesky::rows() const noexcept { return impl_->ldlt.rows(); }

}  // namespace mixedgreen
