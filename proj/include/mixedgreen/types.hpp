#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixedgreen {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Index = std::int64_t;

inline constexpr double kPi = 3.14159265358979323846;

/// Malformed or out-of-range input. The CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data that cannot satisfy the constraints of the problem (e.g. a divergence
/// datum with nonzero mass and no traction boundary to carry the flux).
class IncompatibleData : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// A numerical failure: singular systems, breakdown, unmet residual contracts.
/// `hypothesis` names the violated structural assumption when one is known
/// (e.g. "DOpen", "NOpen", "Korn").
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::string hypothesis = {})
        : std::runtime_error(what), hypothesis_(std::move(hypothesis)) {}

    [[nodiscard]] const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string hypothesis_;
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace mixedgreen
