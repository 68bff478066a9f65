#include "mixedgreen/stokes.hpp"

#include "mixedgreen/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace mixedgreen {

StokesProblem::StokesProblem(std::shared_ptr<const FESpace> space) : space_(std::move(space)) {
    const FESpace& V = *space_;
    const Index nv = V.num_velocity_dofs();
    const Index np = V.num_pressure_dofs();
    std::vector<Triplet> a, g, mv, b, mp;
    const auto rule = triangle_rule_degree4();
    for (Index t = 0; t < V.mesh().num_triangles(); ++t) {
        const auto geo = V.geometry(t);
        const auto nodes = V.velocity_nodes(t);
        Eigen::Matrix<double, 12, 12> Al = Eigen::Matrix<double, 12, 12>::Zero();
        Eigen::Matrix<double, 12, 12> Gl = Eigen::Matrix<double, 12, 12>::Zero();
        Eigen::Matrix<double, 6, 6> Ml = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 12> Bl = Eigen::Matrix<double, 6, 12>::Zero();
        Eigen::Matrix<double, 6, 6> Pl = Eigen::Matrix<double, 6, 6>::Zero();
        std::array<Index, 6> pdofs{};
        int npl = 3;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& l = rule.points[q];
            const double w = rule.weights[q] * geo.area;
            const auto phi = p2_values(l);
            const auto dphi = p2_gradients(l, geo.grad_lambda);
            std::array<double, 6> psi{};
            npl = pressure_basis(V, t, l, psi, pdofs);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    const double gg = dphi[i].dot(dphi[j]);
                    Ml(i, j) += w * phi[i] * phi[j];
                    for (int c = 0; c < 2; ++c) {
                        Gl(2 * i + c, 2 * j + c) += w * gg;
                        for (int d = 0; d < 2; ++d)
                            Al(2 * i + c, 2 * j + d) += w * ((c == d ? gg : 0.0) + dphi[i][d] * dphi[j][c]);
                    }
                }
            }
            for (int i = 0; i < npl; ++i) {
                for (int j = 0; j < 6; ++j)
                    for (int d = 0; d < 2; ++d) Bl(i, 2 * j + d) -= w * psi[i] * dphi[j][d];
                for (int j = 0; j < npl; ++j) Pl(i, j) += w * psi[i] * psi[j];
            }
        }
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                for (int c = 0; c < 2; ++c) {
                    mv.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, Ml(i, j));
                    for (int d = 0; d < 2; ++d) {
                        a.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + d, Al(2 * i + c, 2 * j + d));
                        if (c == d) g.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + d, Gl(2 * i + c, 2 * j + d));
                    }
                }
            }
        }
        for (int i = 0; i < npl; ++i) {
            for (int j = 0; j < 6; ++j)
                for (int d = 0; d < 2; ++d) b.emplace_back(pdofs[i], 2 * nodes[j] + d, Bl(i, 2 * j + d));
            for (int j = 0; j < npl; ++j) mp.emplace_back(pdofs[i], pdofs[j], Pl(i, j));
        }
    }
    A_.resize(nv, nv);
    A_.setFromTriplets(a.begin(), a.end());
    G_.resize(nv, nv);
    G_.setFromTriplets(g.begin(), g.end());
    Mv_.resize(nv, nv);
    Mv_.setFromTriplets(mv.begin(), mv.end());
    B_.resize(np, nv);
    B_.setFromTriplets(b.begin(), b.end());
    Mp_.resize(np, np);
    Mp_.setFromTriplets(mp.begin(), mp.end());
    pinned_ = !V.has_neumann_edges();
}

SparseMatrix StokesProblem::restrict_free(const SparseMatrix& m) const {
    const FESpace& V = *space_;
    std::vector<Triplet> trip;
    for (Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            const Index r = V.free_index(it.row());
            const Index c = V.free_index(it.col());
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    SparseMatrix out(V.num_free_dofs(), V.num_free_dofs());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseMatrix StokesProblem::divergence_free_columns() const {
    const FESpace& V = *space_;
    std::vector<Triplet> trip;
    for (Index k = 0; k < B_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(B_, k); it; ++it) {
            const Index c = V.free_index(it.col());
            if (c >= 0) trip.emplace_back(it.row(), c, it.value());
        }
    SparseMatrix out(B_.rows(), V.num_free_dofs());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

LoadVectors StokesProblem::assemble(const Loads& loads) const {
    const FESpace& V = *space_;
    LoadVectors out{Vector::Zero(V.num_velocity_dofs()), Vector::Zero(V.num_pressure_dofs())};
    const auto rule = triangle_rule_degree4();
    if (loads.body_force || loads.divergence_gradient || loads.divergence) {
        for (Index t = 0; t < V.mesh().num_triangles(); ++t) {
            const auto geo = V.geometry(t);
            const auto nodes = V.velocity_nodes(t);
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const auto& l = rule.points[q];
                const double w = rule.weights[q] * geo.area;
                const Vec2 x = geo.point(l);
                Vec2 f = Vec2::Zero();
                if (loads.body_force) f += loads.body_force(x);
                if (loads.divergence_gradient) f -= loads.divergence_gradient(x);
                const auto phi = p2_values(l);
                for (int a = 0; a < 6; ++a) {
                    out.lambda[2 * nodes[a]] += w * f.x() * phi[a];
                    out.lambda[2 * nodes[a] + 1] += w * f.y() * phi[a];
                }
                if (loads.divergence) {
                    const double gx = loads.divergence(x);
                    std::array<double, 6> psi{};
                    std::array<Index, 6> dofs{};
                    const int n = pressure_basis(V, t, l, psi, dofs);
                    for (int i = 0; i < n; ++i) out.mu[dofs[i]] += w * gx * psi[i];
                }
            }
        }
    }
    if (loads.traction) {
        const auto line = line_rule_degree5();
        const auto& bedges = V.mesh().boundary_edges();
        for (std::size_t k = 0; k < bedges.size(); ++k) {
            const auto& be = bedges[k];
            if (be.label != BoundaryLabel::Neumann) continue;
            const Vec2& pa = V.mesh().nodes()[static_cast<std::size_t>(be.nodes[0])];
            const Vec2& pb = V.mesh().nodes()[static_cast<std::size_t>(be.nodes[1])];
            const double len = (pb - pa).norm();
            const Vec2 normal = Vec2(pb.y() - pa.y(), pa.x() - pb.x()) / len;
            const std::array<Index, 3> nodes{be.nodes[0], be.nodes[1], V.boundary_edge_node(k)};
            for (std::size_t q = 0; q < line.points.size(); ++q) {
                const double s = line.points[q];
                const double w = line.weights[q] * len;
                const Vec2 tr = loads.traction((1.0 - s) * pa + s * pb, normal);
                const std::array<double, 3> phi{(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
                for (int a = 0; a < 3; ++a) {
                    out.lambda[2 * nodes[a]] += w * tr.x() * phi[a];
                    out.lambda[2 * nodes[a] + 1] += w * tr.y() * phi[a];
                }
            }
        }
    }
    return out;
}

void StokesProblem::check_solvable() const {
    if (!space_->has_dirichlet_edges())
        throw NumericalFailure("D has no arc of positive length: rigid motions make the saddle system singular",
                               "DOpen");
}

const SaddlePointSolver& StokesProblem::factorization() const {
    std::call_once(lu_once_, [this] {
        const FESpace& V = *space_;
        const Index nf = V.num_free_dofs();
        // With N empty the pressure is fixed up to a constant; dof 0 is dropped.
        const Index skip = pinned_ ? 1 : 0;
        const Index np = V.num_pressure_dofs() - skip;
        std::vector<Triplet> trip;
        const SparseMatrix Af = restrict_free(A_);
        const SparseMatrix Bf = divergence_free_columns();
        for (Index k = 0; k < Af.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(Af, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
        for (Index k = 0; k < Bf.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(Bf, k); it; ++it) {
                if (it.row() < skip) continue;
                trip.emplace_back(nf + it.row() - skip, it.col(), it.value());
                trip.emplace_back(it.col(), nf + it.row() - skip, it.value());
            }
        SparseMatrix K(nf + np, nf + np);
        K.setFromTriplets(trip.begin(), trip.end());
        solver_ = std::make_unique<SaddlePointSolver>(K, nf);
    });
    return *solver_;
}

StokesSolution StokesProblem::solve(const LoadVectors& loads) const {
    check_solvable();
    const FESpace& V = *space_;
    if (loads.lambda.size() != V.num_velocity_dofs() || loads.mu.size() != V.num_pressure_dofs())
        throw InvalidInput("load vectors do not match the finite element space");
    const Index nf = V.num_free_dofs();
    const Index np = V.num_pressure_dofs();
    const Index skip = pinned_ ? 1 : 0;
    Vector mu = loads.mu;
    if (pinned_) {
        const double total = mu.sum();
        const double scale = mu.cwiseAbs().sum();
        if (std::abs(total) > 1e-9 * scale && std::abs(total) > 1e-14)
            throw IncompatibleData("divergence datum has nonzero total mass " + std::to_string(total) +
                                   " but N is empty, so no boundary flux can balance it");
        const Vector m = Mp_ * Vector::Ones(np);
        mu -= (total / m.sum()) * m;
    }
    Vector rhs = Vector::Zero(nf + np - skip);
    for (Index i = 0; i < nf; ++i) rhs[i] = loads.lambda[V.free_dofs()[static_cast<std::size_t>(i)]];
    rhs.tail(np - skip) = mu.tail(np - skip);

    const Vector x = factorization().solve(rhs, kSolveTolerance);

    Vector u = Vector::Zero(V.num_velocity_dofs());
    for (Index i = 0; i < nf; ++i) u[V.free_dofs()[static_cast<std::size_t>(i)]] = x[i];
    Vector p = Vector::Zero(np);
    p.tail(np - skip) = x.tail(np - skip);
    if (pinned_) {
        const Vector m = Mp_ * Vector::Ones(np);
        p.array() -= m.dot(p) / m.sum();
    }

    StokesSolution sol{VelocityField(space_, u), PressureField(space_, p)};
    const double bnorm = std::sqrt(rhs.head(nf).squaredNorm() + mu.squaredNorm());
    if (bnorm > 0.0) {
        const LoadVectors back = apply_T(sol.u, sol.p);
        Vector rv(nf);
        for (Index i = 0; i < nf; ++i) {
            const Index dof = V.free_dofs()[static_cast<std::size_t>(i)];
            rv[i] = loads.lambda[dof] - back.lambda[dof];
        }
        sol.velocity_residual = rv.norm() / bnorm;
        sol.pressure_residual = (mu - back.mu).norm() / bnorm;
        if (sol.velocity_residual > kSolveTolerance || sol.pressure_residual > kSolveTolerance)
            throw NumericalFailure("Stokes solve missed the residual contract");
    }
    return sol;
}

StokesSolution StokesProblem::solve(const Loads& loads) const {
    LoadVectors lv = assemble(loads);
    if (!loads.dirichlet) return solve(lv);
    const FESpace& V = *space_;
    Vector ud = Vector::Zero(V.num_velocity_dofs());
    for (Index n = 0; n < V.num_velocity_nodes(); ++n) {
        if (!V.dirichlet_node(n)) continue;
        const Vec2 v = loads.dirichlet(V.node_position(n));
        ud[2 * n] = v.x();
        ud[2 * n + 1] = v.y();
    }
    lv.lambda -= A_ * ud;
    lv.mu -= B_ * ud;
    StokesSolution sol = solve(lv);
    sol.u = VelocityField(space_, sol.u.coefficients() + ud);
    return sol;
}

LoadVectors StokesProblem::apply_T(const VelocityField& u, const PressureField& p) const {
    if (&u.space() != space_.get() || &p.space() != space_.get())
        throw InvalidInput("fields belong to a different finite element space");
    return {A_ * u.coefficients() + B_.transpose() * p.coefficients(), B_ * u.coefficients()};
}

double StokesProblem::inf_sup_constant() const {
    const SparseMatrix H = restrict_free(G_ + Mv_);
    const SparseCholesky chol(H);
    const SparseMatrix Bf = divergence_free_columns();
    const SparseMatrix BfT = Bf.transpose();
    auto apply_S = [&](const Vector& x) -> Vector { return Bf * chol.solve(BfT * x); };
    std::function<void(Vector&)> deflate;
    Vector mass_ones;
    double total = 0.0;
    if (pinned_) {
        mass_ones = Mp_ * Vector::Ones(Mp_.rows());
        total = mass_ones.sum();
        deflate = [&](Vector& x) { x.array() -= mass_ones.dot(x) / total; };
    }
    const double lambda = smallest_pencil_eigenvalue(apply_S, Mp_, deflate, 600, 1e-9);
    return std::sqrt(std::max(lambda, 0.0));
}

double smallest_pencil_eigenvalue(const std::function<Vector(const Vector&)>& apply_S, const SparseMatrix& M,
                                  const std::function<void(Vector&)>& deflate, Index max_steps, double tol,
                                  std::uint64_t seed) {
    const Index n = M.rows();
    const SparseCholesky mchol(M);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(rng);
    if (deflate) deflate(v);
    v /= std::sqrt(v.dot(M * v));

    std::vector<Vector> Q;
    std::vector<Vector> MQ;
    std::vector<double> alpha;
    std::vector<double> beta;
    const Index steps = std::min(max_steps, n);
    double theta = 0.0;
    for (Index j = 0; j < steps; ++j) {
        Q.push_back(v);
        MQ.push_back(M * v);
        const Vector Sv = apply_S(v);
        Vector w = mchol.solve(Sv);
        alpha.push_back(v.dot(Sv));
        // Deflate after reorthogonalization too: near breakdown w is roundoff and
        // would otherwise carry the deflated mode into the next Krylov vector.
        for (int pass = 0; pass < 2; ++pass) {
            if (deflate) deflate(w);
            for (std::size_t i = 0; i < Q.size(); ++i) w -= MQ[i].dot(w) * Q[i];
        }
        if (deflate) deflate(w);
        const double b = std::sqrt(std::max(w.dot(M * w), 0.0));

        const auto m = static_cast<Index>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (Index i = 0; i < m; ++i) {
            T(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues()[0];
        const double scale = std::max(std::abs(es.eigenvalues()[m - 1]), 1e-300);
        const double estimate = b * std::abs(es.eigenvectors()(m - 1, 0));
        if (estimate <= tol * scale || b <= 1e-14 * scale) break;
        beta.push_back(b);
        v = w / b;
    }
    return theta;
}

}  // namespace mixedgreen
