#include "mixedgreen/quadrature.hpp"

namespace mixedgreen {

namespace {

constexpr double kA1 = 0.44594849091596488632;
constexpr double kW1 = 0.22338158967801146570;
constexpr double kA2 = 0.09157621350977074346;
constexpr double kW2 = 0.10995174365532186764;

constexpr std::array<std::array<double, 3>, 6> kTriPoints{{
    {1.0 - 2.0 * kA1, kA1, kA1},
    {kA1, 1.0 - 2.0 * kA1, kA1},
    {kA1, kA1, 1.0 - 2.0 * kA1},
    {1.0 - 2.0 * kA2, kA2, kA2},
    {kA2, 1.0 - 2.0 * kA2, kA2},
    {kA2, kA2, 1.0 - 2.0 * kA2},
}};
constexpr std::array<double, 6> kTriWeights{kW1, kW1, kW1, kW2, kW2, kW2};

// 0.5 ± sqrt(3/5)/2
constexpr double kG = 0.38729833462074168852;
constexpr std::array<double, 3> kLinePoints{0.5 - kG, 0.5, 0.5 + kG};
constexpr std::array<double, 3> kLineWeights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

TriangleQuadrature triangle_rule_degree4() { return {kTriPoints, kTriWeights}; }

LineQuadrature line_rule_degree5() { return {kLinePoints, kLineWeights}; }

}  // namespace mixedgreen
