#include <hopdesign/sqp.hpp>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace hopdesign::sqp;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Nlp circle_equality() {
    Nlp nlp;
    nlp.dimension = 2;
    nlp.objective = [](const Vector& x) { return x.squaredNorm(); };
    nlp.equality = [](const Vector& x) { return Vector::Constant(1, x[0] + x[1] - 1.0); };
    return nlp;
}

Nlp bounded_parabola() {
    Nlp nlp;
    nlp.dimension = 1;
    nlp.objective = [](const Vector& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
    nlp.inequality = [](const Vector& x) { return Vector::Constant(1, x[0] - 1.0); };
    return nlp;
}

Nlp rosenbrock() {
    Nlp nlp;
    nlp.dimension = 2;
    nlp.objective = [](const Vector& x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); };
    return nlp;
}

}  // namespace

TEST(Lagrangian, Examples) {
    Nlp a;
    a.dimension = 1;
    a.objective = [](const Vector& x) { return x[0] * x[0]; };
    a.equality = [](const Vector& x) { return Vector::Constant(1, x[0] - 1.0); };
    EXPECT_DOUBLE_EQ(lagrangian(a, {vec({2}), vec({3}), Vector(0), {}}), 7.0);
    EXPECT_DOUBLE_EQ(lagrangian(a, {vec({2}), vec({0}), Vector(0), {}}), 4.0);

    Nlp b;
    b.dimension = 1;
    b.objective = [](const Vector& x) { return x[0]; };
    b.inequality = [](const Vector& x) { return Vector::Constant(1, x[0]); };
    EXPECT_DOUBLE_EQ(lagrangian(b, {vec({-1}), Vector(0), vec({2}), {}}), -3.0);
}

TEST(KktResidual, VanishesAtAnalyticPoints) {
    const auto r1 = kkt_residual(circle_equality(), {vec({0.5, 0.5}), vec({-1}), Vector(0), {}});
    EXPECT_LE(r1.cwiseAbs().maxCoeff(), 1e-9);
    const auto r2 = kkt_residual(bounded_parabola(), {vec({1}), Vector(0), vec({2}), {0}});
    ASSERT_EQ(r2.size(), 2);
    EXPECT_LE(r2.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(KktResidual, FirstBlockIsObjectiveGradientWithoutMultipliers) {
    const auto r = kkt_residual(rosenbrock(), make_point(rosenbrock(), vec({-1.2, 1})));
    EXPECT_NEAR(r[0], -215.6, 1e-5);
    EXPECT_NEAR(r[1], -88.0, 1e-5);
}

TEST(KktJacobian, Examples) {
    Nlp sq;
    sq.dimension = 1;
    sq.objective = [](const Vector& x) { return x[0] * x[0]; };
    const Matrix j1 = kkt_jacobian(sq, make_point(sq, vec({0.7})));
    ASSERT_EQ(j1.rows(), 1);
    EXPECT_NEAR(j1(0, 0), 2.0, 1e-6);

    const Matrix j2 = kkt_jacobian(circle_equality(), {vec({0.2, 0.9}), vec({0}), Vector(0), {}});
    Matrix expected(3, 3);
    expected << 2, 0, 1, 0, 2, 1, 1, 1, 0;
    EXPECT_LE((j2 - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(KktJacobian, FiniteDifferenceHessianOfBilinear) {
    Nlp nlp;
    nlp.dimension = 2;
    nlp.objective = [](const Vector& x) { return x[0] * x[1]; };
    const Matrix H = fd_hessian_lagrangian(nlp, make_point(nlp, vec({0.3, -2.0})));
    EXPECT_NEAR(H(0, 1), 1.0, 1e-5);
    EXPECT_NEAR(H(1, 0), 1.0, 1e-5);
    EXPECT_NEAR(H(0, 0), 0.0, 1e-5);
}

TEST(NewtonStep, ExactOnEqualityConstrainedQuadratic) {
    const auto nlp = circle_equality();
    const auto step = newton_step(nlp, {vec({4, -7}), vec({10}), Vector(0), {}});
    EXPECT_NEAR(step.next.d[0], 0.5, 1e-6);
    EXPECT_NEAR(step.next.d[1], 0.5, 1e-6);
    EXPECT_NEAR(step.next.lambda[0], -1.0, 1e-6);
    EXPECT_EQ(step.alpha, 1.0);
}

TEST(NewtonStep, ZeroStepAtKktPoint) {
    const auto nlp = bounded_parabola();
    const auto step = newton_step(nlp, {vec({1}), Vector(0), vec({2}), {0}});
    EXPECT_NEAR(step.next.d[0], 1.0, 1e-8);
    EXPECT_NEAR(step.next.mu[0], 2.0, 1e-6);
}

TEST(NewtonStep, QuadraticConvergenceOnRosenbrock) {
    const auto nlp = rosenbrock();
    KktPoint p = make_point(nlp, vec({-1.2, 1}));
    std::vector<double> norms;
    for (int k = 0; k < 60; ++k) {
        const double r = kkt_residual(nlp, p).cwiseAbs().maxCoeff();
        norms.push_back(r);
        if (r < 1e-9) break;
        p = newton_step(nlp, p).next;
    }
    ASSERT_GE(norms.size(), 4u);
    EXPECT_LT(norms.back(), 1e-7);
    // Final contraction: r_{k+1} <= C r_k^2 on the last steps before round-off.
    const std::size_t n = norms.size();
    const double ratio = norms[n - 1] / (norms[n - 2] * norms[n - 2]);
    EXPECT_LT(ratio, 1e3);
    EXPECT_NEAR(p.d[0], 1.0, 1e-6);
}

TEST(NewtonStep, SingularSystemReportsCondition) {
    Nlp nlp;
    nlp.dimension = 2;
    nlp.objective = [](const Vector& x) { return x[0] * x[0]; };
    EXPECT_THROW(newton_step(nlp, make_point(nlp, vec({1, 1}))), SingularKktError);
}

TEST(QpSubproblem, ZeroStepAtOptimum) {
    const auto qp = qp_subproblem(circle_equality(), {vec({0.5, 0.5}), vec({-1}), Vector(0), {}});
    EXPECT_LE(qp.step.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_FALSE(qp.relaxed);
}

TEST(QpSubproblem, InactiveInequalityDropsOut) {
    auto with_far = circle_equality();
    with_far.inequality = [](const Vector& x) { return Vector::Constant(1, x[0] - 100.0); };
    const KktPoint p{vec({2, 3}), vec({0}), vec({0}), {}};
    const auto a = qp_subproblem(with_far, p);
    const auto b = qp_subproblem(circle_equality(), {vec({2, 3}), vec({0}), Vector(0), {}});
    EXPECT_LE((a.step - b.step).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(a.mu[0], 0.0);
}

TEST(QpSubproblem, OneDimensionalBoundHandSolution) {
    const auto nlp = bounded_parabola();
    const auto qp = qp_subproblem(nlp, make_point(nlp, vec({0})));
    EXPECT_NEAR(qp.step[0], 1.0, 1e-8);
    EXPECT_NEAR(qp.mu[0], 2.0, 1e-5);
}

TEST(QpSubproblem, InconsistentLinearizationIsRelaxed) {
    Nlp nlp;
    nlp.dimension = 1;
    nlp.objective = [](const Vector& x) { return x[0] * x[0]; };
    nlp.inequality = [](const Vector& x) {
        Vector g(2);
        g << x[0] - 1.0, 2.0 - x[0];
        return g;
    };
    const auto qp = qp_subproblem(nlp, make_point(nlp, vec({0})));
    EXPECT_TRUE(qp.relaxed);
}

TEST(Solve, EqualityFixture) {
    const auto rep = solve(circle_equality(), vec({3, -2}));
    ASSERT_TRUE(rep.converged) << rep.message;
    EXPECT_NEAR(rep.solution.d[0], 0.5, 1e-6);
    EXPECT_NEAR(rep.solution.d[1], 0.5, 1e-6);
    EXPECT_NEAR(rep.solution.lambda[0], -1.0, 1e-5);
    EXPECT_LE(rep.kkt_residual_norm, 1e-6);
    EXPECT_LE(rep.iterations, 20);
}

TEST(Solve, InequalityFixture) {
    const auto rep = solve(bounded_parabola(), vec({0}));
    ASSERT_TRUE(rep.converged) << rep.message;
    EXPECT_NEAR(rep.solution.d[0], 1.0, 1e-6);
    EXPECT_NEAR(rep.solution.mu[0], 2.0, 1e-6);
    EXPECT_EQ(rep.solution.active_set, std::vector<int>{0});
}

TEST(Solve, Rosenbrock) {
    SqpOptions options;
    options.max_iterations = 200;
    options.record_trace = true;
    const auto rep = solve(rosenbrock(), vec({-1.2, 1}), options);
    ASSERT_TRUE(rep.converged) << rep.message;
    EXPECT_NEAR(rep.solution.d[0], 1.0, 1e-4);
    EXPECT_NEAR(rep.solution.d[1], 1.0, 1e-4);
    EXPECT_LE(rep.iterations, 200);
    for (std::size_t k = 1; k < rep.trace.size(); ++k) EXPECT_LE(rep.trace[k].objective, rep.trace[k - 1].objective + 1e-12);
}

TEST(Solve, ConvergedPointsSatisfyComplementarity) {
    Nlp nlp;
    nlp.dimension = 2;
    nlp.objective = [](const Vector& x) { return std::pow(x[0] - 3, 2) + std::pow(x[1] + 1, 2); };
    nlp = with_side_constraints(nlp, vec({0, 0}), vec({2, 2}));
    const auto rep = solve(nlp, vec({1, 1}));
    ASSERT_TRUE(rep.converged) << rep.message;
    EXPECT_NEAR(rep.solution.d[0], 2.0, 1e-6);
    EXPECT_NEAR(rep.solution.d[1], 0.0, 1e-6);
    const Vector g = nlp.inequality(rep.solution.d);
    EXPECT_EQ(g.size(), 4);
    for (Eigen::Index s = 0; s < g.size(); ++s) {
        EXPECT_GE(rep.solution.mu[s], 0.0);
        EXPECT_LE(std::abs(rep.solution.mu[s] * g[s]), 1e-6);
    }
}

TEST(Solve, NonConvergenceIsReportedHonestly) {
    SqpOptions options;
    options.max_iterations = 2;
    const auto rep = solve(rosenbrock(), vec({-1.2, 1}), options);
    EXPECT_FALSE(rep.converged);
    EXPECT_GT(rep.kkt_residual_norm, 1e-6);
}

TEST(SideConstraints, FoldIntoTwoRowsPerVariable) {
    Nlp nlp;
    nlp.dimension = 3;
    nlp.objective = [](const Vector& x) { return x.sum(); };
    nlp.inequality = [](const Vector& x) { return Vector::Constant(1, x[0]); };
    const auto folded = with_side_constraints(nlp, Vector::Zero(3), Vector::Ones(3));
    EXPECT_EQ(folded.inequality(vec({0.5, 0.5, 0.5})).size(), 1 + 2 * 3);
}

TEST(FdGradient, LinearIsExact) {
    const auto g = fd_gradient([](const Vector& x) { return 3 * x[0] - 2 * x[1]; }, vec({1e3, -4}), 1e-3);
    EXPECT_NEAR(g[0], 3.0, 1e-9);
    EXPECT_NEAR(g[1], -2.0, 1e-9);
}

TEST(FdGradient, SumOfSquares) {
    const Vector x = vec({0.3, -1.7, 2.2});
    const auto g = fd_gradient([](const Vector& v) { return v.squaredNorm(); }, x, 1e-6);
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(g[i], 2 * x[i], 1e-8);
}

TEST(Bfgs, RecoversQuadraticHessianWithExactLineSearch) {
    Matrix A(3, 3);
    A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const Vector b = vec({1, -2, 0.5});
    Matrix B = Matrix::Identity(3, 3) * 0.5;
    Vector x = vec({2, 2, -1});
    for (int k = 0; k < 3; ++k) {
        const Vector grad = A * x - b;
        const Vector p = -B.ldlt().solve(grad);
        const double alpha = -grad.dot(p) / p.dot(A * p);
        const Vector s = alpha * p;
        const Vector y = A * s;
        B = bfgs_update(B, s, y);
        x += s;
    }
    EXPECT_LE((B - A).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bfgs, DampingKeepsPositiveDefinite) {
    Matrix B = Matrix::Identity(2, 2);
    const Vector s = vec({1, 0});
    const Vector y = vec({-1, 0.2});  // negative curvature
    const Matrix B1 = bfgs_update(B, s, y);
    EXPECT_LE((B1 - B1.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(B1);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}
