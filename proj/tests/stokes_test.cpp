#include "support.hpp"

#include "mixedgreen/manufactured.hpp"
#include "mixedgreen/quadrature.hpp"

#include <gtest/gtest.h>

#include <random>

namespace mixedgreen {
namespace {

using testing::unit_square;

TEST(Assemble, ZeroDataGivesZeroLoads) {
    const auto s = unit_square({0}, 0.25);
    const StokesProblem problem(s.space);
    const LoadVectors lv = problem.assemble({});
    EXPECT_EQ(lv.lambda.size(), s.space->num_velocity_dofs());
    EXPECT_EQ(lv.mu.size(), s.space->num_pressure_dofs());
    EXPECT_EQ(lv.lambda.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(lv.mu.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assemble, ConstantDownwardForceIsMinusMassVector) {
    const auto s = unit_square({0}, 0.25);
    const StokesProblem problem(s.space);
    Loads loads;
    loads.body_force = [](const Vec2&) { return Vec2(0.0, -1.0); };
    const LoadVectors lv = problem.assemble(loads);
    Vector e2 = Vector::Zero(s.space->num_velocity_dofs());
    for (Index n = 0; n < s.space->num_velocity_nodes(); ++n) e2[2 * n + 1] = 1.0;
    const Vector mass = problem.velocity_mass() * e2;
    EXPECT_LT((lv.lambda + mass).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(-lv.lambda.sum(), 1.0, 1e-13);
    EXPECT_EQ(lv.mu.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assemble, RigidRotationHasZeroEnergy) {
    const auto s = unit_square({0}, 0.125);
    const StokesProblem problem(s.space);
    const VelocityField w = VelocityField::interpolate(s.space, [](const Vec2& y) { return Vec2(-y.y(), y.x()); });
    const Vector& c = w.coefficients();
    EXPECT_LT(std::abs(c.dot(problem.stiffness() * c)), 1e-12);
    EXPECT_GT(c.dot(problem.gradient_stiffness() * c), 1.0);
}

TEST(Assemble, BilinearFormIsSymmetric) {
    const auto s = testing::from_file("domains/l_shape.json", 0.1);
    const StokesProblem problem(s.space);
    const SparseMatrix& A = problem.stiffness();
    const SparseMatrix At = A.transpose();
    EXPECT_LT((A - At).norm(), 1e-14 * A.norm());
    EXPECT_LT((problem.gradient_stiffness() - SparseMatrix(problem.gradient_stiffness().transpose())).norm(), 1e-14);
}

TEST(Solve, ZeroLoadsGiveZeroSolution) {
    const auto s = unit_square({0, 3}, 0.25);
    const StokesProblem problem(s.space);
    const StokesSolution sol = problem.solve(Loads{});
    EXPECT_EQ(sol.u.coefficients().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sol.p.coefficients().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solve, DivergenceConstraintHoldsForEveryPressure) {
    const auto s = testing::from_file("domains/hexagon.json", 0.1);
    const StokesProblem problem(s.space);
    Loads loads;
    loads.divergence = [](const Vec2& y) { return std::sin(3 * y.x()) + y.y(); };
    loads.divergence_gradient = [](const Vec2& y) { return Vec2(3 * std::cos(3 * y.x()), 1.0); };
    loads.body_force = [](const Vec2& y) { return Vec2(y.y(), -y.x()); };
    const StokesSolution sol = problem.solve(loads);
    EXPECT_LE(sol.velocity_residual, kSolveTolerance);
    EXPECT_LE(sol.pressure_residual, kSolveTolerance);
    // B u = μ means ∫ q (div u + g) = 0 for every pressure basis function q.
    const LoadVectors lv = problem.assemble(loads);
    const Vector Bu = problem.divergence() * sol.u.coefficients();
    EXPECT_LT((Bu - lv.mu).cwiseAbs().maxCoeff(), 1e-10 * lv.mu.cwiseAbs().maxCoeff());
}

TEST(Solve, IncompatibleDivergenceWithoutNeumann) {
    const auto s = unit_square({0, 1, 2, 3}, 0.25);
    const StokesProblem problem(s.space);
    EXPECT_TRUE(problem.pressure_pinned());
    Loads loads;
    loads.divergence = [](const Vec2&) { return 1.0; };
    EXPECT_THROW((void)problem.solve(loads), IncompatibleData);
    // Mean-zero data are fine and the pressure comes back mean-zero.
    loads.divergence = [](const Vec2& y) { return y.x() - 0.5; };
    loads.divergence_gradient = [](const Vec2&) { return Vec2(1.0, 0.0); };
    const StokesSolution sol = problem.solve(loads);
    const Vector ones = Vector::Ones(s.space->num_pressure_dofs());
    EXPECT_LT(std::abs(ones.dot(problem.pressure_mass() * sol.p.coefficients())), 1e-12);
}

TEST(Solve, NoDirichletNamesTheHypothesis) {
    const auto s = unit_square({}, 0.25);
    const StokesProblem problem(s.space);
    try {
        (void)problem.solve(Loads{});
        FAIL() << "expected NumericalFailure";
    } catch (const NumericalFailure& e) {
        EXPECT_EQ(e.hypothesis(), "DOpen");
    }
}

TEST(ApplyT, ZeroMapsToZero) {
    const auto s = unit_square({0}, 0.25);
    const StokesProblem problem(s.space);
    const LoadVectors lv = problem.apply_T(VelocityField::zero(s.space), PressureField::zero(s.space));
    EXPECT_EQ(lv.lambda.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(lv.mu.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ApplyT, RoundTripOnRandomPairs) {
    for (const auto& name : testing::shipped_domains()) {
        const auto s = testing::from_file(name, 0.125);
        const StokesProblem problem(s.space);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal;
        Vector u(s.space->num_velocity_dofs()), p(s.space->num_pressure_dofs());
        for (Index i = 0; i < u.size(); ++i) u[i] = s.space->free_index(i) < 0 ? 0.0 : normal(rng);
        for (Index i = 0; i < p.size(); ++i) p[i] = normal(rng);
        const LoadVectors lv = problem.apply_T(VelocityField(s.space, u), PressureField(s.space, p));
        const StokesSolution back = problem.solve(lv);
        EXPECT_LE((back.u.coefficients() - u).norm() / u.norm(), 1e-8) << name;
        EXPECT_LE((back.p.coefficients() - p).norm() / p.norm(), 1e-8) << name;
    }
}

TEST(ApplyT, ManufacturedPairReproducesLoads) {
    const ExactSolution exact = trigonometric_solution();
    const Loads loads = exact_loads(exact);
    double previous = kInfinity;
    for (const double h : {0.25, 0.125, 0.0625}) {
        const auto s = unit_square({0, 3}, h);
        const StokesProblem problem(s.space);
        const VelocityField u = VelocityField::interpolate(s.space, exact.u);
        const PressureField p = PressureField::interpolate(s.space, exact.p);
        const LoadVectors applied = problem.apply_T(u, p);
        const LoadVectors assembled = problem.assemble(loads);
        double diff = 0.0, scale = 0.0;
        for (const Index dof : s.space->free_dofs()) {
            diff = std::max(diff, std::abs(applied.lambda[dof] - assembled.lambda[dof]));
            scale = std::max(scale, std::abs(assembled.lambda[dof]));
        }
        // Nodal loads scale like h²; compare relative to the load size.
        EXPECT_LT(diff / scale, previous);
        previous = diff / scale;
    }
    EXPECT_LT(previous, 0.01);
}

/// ∫_N (2ε(u_h)ν − p_h ν − f_N)·φ for a fixed smooth φ.
double traction_residual(const StokesSolution& sol, const PolygonalDomain& domain, const ExactSolution& exact) {
    const auto phi = [](const Vec2& y) { return Vec2(std::sin(kPi * y.x()) + y.y(), y.y() * y.y() - y.x()); };
    const TriangleMesh& mesh = sol.u.space().mesh();
    const LineQuadrature rule = line_rule_degree5();
    double total = 0.0;
    for (const BoundaryEdge& b : mesh.boundary_edges()) {
        if (b.label != BoundaryLabel::Neumann) continue;
        const Vec2& a = mesh.nodes()[b.nodes[0]];
        const Vec2& c = mesh.nodes()[b.nodes[1]];
        const Vec2 nu = domain.outward_normal(b.polygon_edge);
        const double len = (c - a).norm();
        for (std::size_t i = 0; i < rule.weights.size(); ++i) {
            const Vec2 y = (1 - rule.points[i]) * a + rule.points[i] * c;
            const Vec2 inside = y - 1e-9 * nu;
            const Mat2 g = sol.u.gradient(inside);
            const Vec2 th = (g + g.transpose()) * nu - sol.p.value(inside) * nu;
            const Mat2 ge = exact.grad_u(y);
            const Vec2 te = (ge + ge.transpose()) * nu - exact.p(y) * nu;
            total += rule.weights[i] * len * (th - te).dot(phi(y));
        }
    }
    return std::abs(total);
}

TEST(Solve, TractionResidualVanishesUnderRefinement) {
    const ExactSolution exact = trigonometric_solution();
    std::vector<double> res;
    for (const double h : {0.125, 0.0625, 0.03125}) {
        const auto s = unit_square({0, 3}, h);
        const StokesSolution sol = StokesProblem(s.space).solve(exact_loads(exact));
        res.push_back(traction_residual(sol, s.dom(), exact));
    }
    EXPECT_LT(res[1], res[0]);
    EXPECT_LT(res[2], res[1]);
    EXPECT_LT(res[2], 1e-2);
}

TEST(Solve, DirichletLiftingMatchesTrace) {
    const ExactSolution exact = trigonometric_solution();
    const auto s = unit_square({0, 3}, 0.125);
    const StokesSolution sol = StokesProblem(s.space).solve(exact_loads(exact));
    for (Index n = 0; n < s.space->num_velocity_nodes(); ++n) {
        if (!s.space->dirichlet_node(n)) continue;
        const Vec2 y = s.space->node_position(n);
        EXPECT_NEAR(sol.u.coefficients()[2 * n], exact.u(y).x(), 1e-14);
        EXPECT_NEAR(sol.u.coefficients()[2 * n + 1], exact.u(y).y(), 1e-14);
    }
}

TEST(InfSup, PositiveAndStableUnderRefinement) {
    std::vector<double> beta;
    for (const double h : {0.25, 0.125, 0.0625}) {
        const auto s = unit_square({0}, h);
        beta.push_back(StokesProblem(s.space).inf_sup_constant());
    }
    for (const double b : beta) EXPECT_GT(b, 0.05);
    for (std::size_t k = 1; k < beta.size(); ++k) EXPECT_NEAR(beta[k] / beta[0], 1.0, 0.2);
}

TEST(InfSup, EqualOrderPairBreaksDown) {
    const auto s = unit_square({0, 1, 2, 3}, 0.0);
    const auto stable = testing::make_space(s.dom(), s.dec(), 0.125, 1);
    const auto equal = testing::make_space(s.dom(), s.dec(), 0.125, 2);
    const double b_stable = StokesProblem(stable).inf_sup_constant();
    const double b_equal = StokesProblem(equal).inf_sup_constant();
    EXPECT_GT(b_stable, 0.05);
    EXPECT_LT(b_equal, 1e-6);
}

}  // namespace
}  // namespace mixedgreen
