#pragma once

// Sequential quadratic programming for small dense NLPs
//
//     min f(d)   s.t.  g(d) <= 0,  h(d) = 0
//
// Each iteration solves a QP built from a damped-BFGS model of the
// Lagrangian Hessian and the linearized constraints, then globalizes the step
// with a backtracking line search on the l1 exact-penalty merit function.
// The Newton iteration on the KKT system (kkt_residual / kkt_jacobian /
// newton_step) is exposed separately.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hopdesign::sqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ScalarFunction = std::function<double(const Vector&)>;
using VectorFunction = std::function<Vector(const Vector&)>;

struct Nlp {
    ScalarFunction objective;
    VectorFunction inequality;  // g(d) <= 0; may be empty
    VectorFunction equality;    // h(d) = 0; may be empty
    int dimension = 0;

    Vector g(const Vector& d) const { return inequality ? inequality(d) : Vector(0); }
    Vector h(const Vector& d) const { return equality ? equality(d) : Vector(0); }
};

/// Appends the box lower <= d <= upper as exactly 2R inequality rows
/// (d - upper <= 0, then lower - d <= 0) after the existing ones.
inline Nlp with_side_constraints(Nlp nlp, const Vector& lower, const Vector& upper) {
    if (lower.size() != nlp.dimension || upper.size() != nlp.dimension)
        throw std::invalid_argument("with_side_constraints: bound length differs from dimension");
    VectorFunction inner = nlp.inequality;
    nlp.inequality = [inner, lower, upper](const Vector& d) {
        const Vector g = inner ? inner(d) : Vector(0);
        Vector out(g.size() + 2 * d.size());
        out << g, d - upper, lower - d;
        return out;
    };
    return nlp;
}

struct KktPoint {
    Vector d;
    Vector lambda;  // equality multipliers
    Vector mu;      // inequality multipliers, >= 0
    std::vector<int> active_set;
};

struct IterationTrace {
    int iteration = 0;
    double objective = 0.0;
    double merit = 0.0;
    double residual = 0.0;
    double step_norm = 0.0;
    double alpha = 0.0;
};

struct SqpReport {
    KktPoint solution;
    double objective_value = 0.0;
    double kkt_residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool qp_relaxed = false;
    std::string message;
    std::vector<IterationTrace> trace;
};

struct SqpOptions {
    double tolerance = 1e-6;
    int max_iterations = 100;
    double activity_tolerance = 1e-8;
    double fd_relative_step = 6.0554544523933395e-06;  // cbrt(machine epsilon)
    bool record_trace = false;
};

class SingularKktError : public std::runtime_error {
  public:
    explicit SingularKktError(double condition_estimate)
        : std::runtime_error("KKT matrix singular or badly conditioned (condition estimate " +
                             std::to_string(condition_estimate) + ")"),
          condition_(condition_estimate) {}
    double condition_estimate() const { return condition_; }

  private:
    double condition_;
};

// ---------------------------------------------------------------------------
// Derivatives

inline Vector fd_gradient(const ScalarFunction& f, const Vector& d,
                          double relative_step = 6.0554544523933395e-06) {
    if (!(relative_step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
    Vector grad(d.size());
    Vector x = d;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double h = relative_step * std::max(1.0, std::abs(d[i]));
        x[i] = d[i] + h;
        const double up = f(x);
        x[i] = d[i] - h;
        const double down = f(x);
        x[i] = d[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

/// Rows are constraint gradients (m x n).
inline Matrix fd_jacobian(const VectorFunction& c, const Vector& d, Eigen::Index rows,
                          double relative_step = 6.0554544523933395e-06) {
    Matrix jac(rows, d.size());
    if (rows == 0) return jac;
    Vector x = d;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double h = relative_step * std::max(1.0, std::abs(d[i]));
        x[i] = d[i] + h;
        const Vector up = c(x);
        x[i] = d[i] - h;
        const Vector down = c(x);
        x[i] = d[i];
        jac.col(i) = (up - down) / (2.0 * h);
    }
    return jac;
}

/// Damped BFGS update. When the curvature s'y falls below 0.2 s'Bs the
/// secant vector is blended towards Bs (Powell), so the result stays
/// symmetric positive definite.
inline Matrix bfgs_update(const Matrix& B, const Vector& s, const Vector& y) {
    const Vector Bs = B * s;
    const double sBs = s.dot(Bs);
    if (!(sBs > 1e-300)) return B;
    const double sy = s.dot(y);
    double theta = 1.0;
    if (sy < 0.2 * sBs) theta = 0.8 * sBs / (sBs - sy);
    const Vector r = theta * y + (1.0 - theta) * Bs;
    const double sr = s.dot(r);
    if (!(sr > 0.0)) return B;
    Matrix out = B - (Bs * Bs.transpose()) / sBs + (r * r.transpose()) / sr;
    return 0.5 * (out + out.transpose());
}

// ---------------------------------------------------------------------------
// Lagrangian and KKT system

inline double lagrangian(const Nlp& nlp, const KktPoint& p) {
    double value = nlp.objective(p.d);
    const Vector h = nlp.h(p.d);
    const Vector g = nlp.g(p.d);
    if (h.size() != p.lambda.size() || g.size() != p.mu.size())
        throw std::invalid_argument("lagrangian: multiplier dimensions do not match constraints");
    if (h.size() > 0) value += p.lambda.dot(h);
    if (g.size() > 0) value += p.mu.dot(g);
    return value;
}

namespace detail {

inline Vector lagrangian_gradient(const Vector& grad_f, const Matrix& jac_h, const Matrix& jac_g, const Vector& lambda,
                                  const Vector& mu) {
    Vector out = grad_f;
    if (jac_h.rows() > 0) out += jac_h.transpose() * lambda;
    if (jac_g.rows() > 0) out += jac_g.transpose() * mu;
    return out;
}

inline double violation_l1(const Vector& g, const Vector& h) {
    double v = h.cwiseAbs().sum();
    for (Eigen::Index i = 0; i < g.size(); ++i) v += std::max(0.0, g[i]);
    return v;
}

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace detail

inline std::vector<int> active_constraints(const Vector& g, double activity_tolerance = 1e-8) {
    std::vector<int> active;
    const double scale = 1.0 + detail::inf_norm(g);
    for (Eigen::Index s = 0; s < g.size(); ++s)
        if (std::abs(g[s]) <= activity_tolerance * scale) active.push_back(static_cast<int>(s));
    return active;
}

/// Completes a point with zero multipliers and the active set at d.
inline KktPoint make_point(const Nlp& nlp, Vector d, double activity_tolerance = 1e-8) {
    KktPoint p;
    const Vector g = nlp.g(d);
    p.lambda = Vector::Zero(nlp.h(d).size());
    p.mu = Vector::Zero(g.size());
    p.active_set = active_constraints(g, activity_tolerance);
    p.d = std::move(d);
    return p;
}

/// Finite-difference Hessian of the Lagrangian from second differences of
/// its values.
inline Matrix fd_hessian_lagrangian(const Nlp& nlp, const KktPoint& p, double relative_step = 1.2207e-4) {
    const Eigen::Index n = p.d.size();
    auto L = [&](const Vector& d) {
        KktPoint q{d, p.lambda, p.mu, {}};
        return lagrangian(nlp, q);
    };
    Matrix H(n, n);
    Vector x = p.d;
    const double center = L(x);
    std::vector<double> step(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) step[static_cast<std::size_t>(i)] = relative_step * std::max(1.0, std::abs(p.d[i]));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = step[static_cast<std::size_t>(i)];
        x[i] = p.d[i] + hi;
        const double up = L(x);
        x[i] = p.d[i] - hi;
        const double down = L(x);
        x[i] = p.d[i];
        H(i, i) = (up - 2.0 * center + down) / (hi * hi);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double hj = step[static_cast<std::size_t>(j)];
            double acc = 0.0;
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    x[i] = p.d[i] + si * hi;
                    x[j] = p.d[j] + sj * hj;
                    acc += si * sj * L(x);
                }
            x[i] = p.d[i];
            x[j] = p.d[j];
            H(i, j) = H(j, i) = acc / (4.0 * hi * hj);
        }
    }
    return H;
}

/// Stacked KKT residual: gradient of the Lagrangian, equality values, and
/// the values of the inequalities in the point's active set.
inline Vector kkt_residual(const Nlp& nlp, const KktPoint& p, double relative_step = 6.0554544523933395e-06) {
    const Vector h = nlp.h(p.d);
    const Vector g = nlp.g(p.d);
    const Vector grad_f = fd_gradient(nlp.objective, p.d, relative_step);
    const Matrix jac_h = fd_jacobian([&](const Vector& d) { return nlp.h(d); }, p.d, h.size(), relative_step);
    const Matrix jac_g = fd_jacobian([&](const Vector& d) { return nlp.g(d); }, p.d, g.size(), relative_step);
    const Vector grad_l = detail::lagrangian_gradient(grad_f, jac_h, jac_g, p.lambda, p.mu);

    Vector out(grad_l.size() + h.size() + static_cast<Eigen::Index>(p.active_set.size()));
    out.head(grad_l.size()) = grad_l;
    out.segment(grad_l.size(), h.size()) = h;
    for (std::size_t a = 0; a < p.active_set.size(); ++a)
        out[grad_l.size() + h.size() + static_cast<Eigen::Index>(a)] = g[p.active_set[a]];
    return out;
}

/// Symmetric bordered KKT matrix. Uses `hessian` for the Lagrangian block
/// when given, otherwise a finite-difference Hessian.
inline Matrix kkt_jacobian(const Nlp& nlp, const KktPoint& p, const Matrix* hessian = nullptr,
                           double relative_step = 6.0554544523933395e-06) {
    const Eigen::Index n = p.d.size();
    const Eigen::Index q = p.lambda.size();
    const Eigen::Index a = static_cast<Eigen::Index>(p.active_set.size());
    const Matrix H = hessian ? *hessian : fd_hessian_lagrangian(nlp, p);
    const Matrix jac_h = fd_jacobian([&](const Vector& d) { return nlp.h(d); }, p.d, q, relative_step);
    const Matrix jac_g = fd_jacobian([&](const Vector& d) { return nlp.g(d); }, p.d, p.mu.size(), relative_step);

    Matrix J = Matrix::Zero(n + q + a, n + q + a);
    J.topLeftCorner(n, n) = H;
    if (q > 0) {
        J.block(0, n, n, q) = jac_h.transpose();
        J.block(n, 0, q, n) = jac_h;
    }
    for (Eigen::Index k = 0; k < a; ++k) {
        const Vector row = jac_g.row(p.active_set[static_cast<std::size_t>(k)]).transpose();
        J.block(0, n + q + k, n, 1) = row;
        J.block(n + q + k, 0, 1, n) = row.transpose();
    }
    return J;
}

struct NewtonResult {
    KktPoint next;
    double alpha = 1.0;
    double condition_estimate = 1.0;
};

inline double l1_merit(const Nlp& nlp, const Vector& d, double weight) {
    return nlp.objective(d) + weight * detail::violation_l1(nlp.g(d), nlp.h(d));
}

/// One Newton iteration on the KKT system, damped by backtracking on the l1
/// merit function. Throws SingularKktError when the system cannot be solved
/// reliably.
inline NewtonResult newton_step(const Nlp& nlp, const KktPoint& p, const Matrix* hessian = nullptr) {
    const Vector psi = kkt_residual(nlp, p);
    const Matrix J = kkt_jacobian(nlp, p, hessian);
    Eigen::FullPivLU<Matrix> lu(J);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13) || !lu.isInvertible()) throw SingularKktError(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    const Vector s = lu.solve(-psi);

    const Eigen::Index n = p.d.size();
    const Eigen::Index q = p.lambda.size();
    NewtonResult out;
    out.condition_estimate = 1.0 / rcond;
    out.next = p;

    Vector lambda_full = p.lambda + s.segment(n, q);
    Vector mu_full = p.mu;
    for (std::size_t k = 0; k < p.active_set.size(); ++k)
        mu_full[p.active_set[k]] += s[n + q + static_cast<Eigen::Index>(k)];
    double weight = 1.0;
    if (q > 0) weight = std::max(weight, 1.5 * lambda_full.cwiseAbs().maxCoeff());
    if (mu_full.size() > 0) weight = std::max(weight, 1.5 * mu_full.cwiseAbs().maxCoeff());

    const Vector sd = s.head(n);
    const double merit0 = l1_merit(nlp, p.d, weight);
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, alpha *= 0.5) {
        if (l1_merit(nlp, p.d + alpha * sd, weight) <= merit0) {
            accepted = true;
            break;
        }
    }
    if (!accepted) alpha = 1.0;

    out.alpha = alpha;
    out.next.d = p.d + alpha * sd;
    out.next.lambda = p.lambda + alpha * s.segment(n, q);
    for (std::size_t k = 0; k < p.active_set.size(); ++k)
        out.next.mu[p.active_set[k]] += alpha * s[n + q + static_cast<Eigen::Index>(k)];
    out.next.active_set = active_constraints(nlp.g(out.next.d));
    return out;
}

// ---------------------------------------------------------------------------
// QP subproblem

struct QpResult {
    Vector step;
    Vector lambda;
    Vector mu;
    bool relaxed = false;
    int iterations = 0;
};

namespace detail {

// Primal active-set method for min 1/2 z'Gz + c'z  s.t. Ae z = be, Ai z <= bi
// from a feasible z. G must be positive definite. Multipliers follow the
// convention G z + c + Ae' lambda + Ai' mu = 0 with mu >= 0.
struct ActiveSetQp {
    Matrix G;
    Vector c;
    Matrix Ae;
    Vector be;
    Matrix Ai;
    Vector bi;

    struct Solution {
        Vector z;
        Vector lambda;
        Vector mu;
        int iterations = 0;
        bool ok = false;
    };

    Solution solve(Vector z, std::vector<int> working) const {
        const Eigen::Index n = G.rows();
        const Eigen::Index me = Ae.rows();
        const Eigen::Index mi = Ai.rows();
        Solution out;
        out.lambda = Vector::Zero(me);
        out.mu = Vector::Zero(mi);
        const int max_iterations = 50 * static_cast<int>(n + me + mi + 1);

        for (int it = 0; it < max_iterations; ++it) {
            out.iterations = it + 1;
            const Eigen::Index w = static_cast<Eigen::Index>(working.size());
            Matrix K = Matrix::Zero(n + me + w, n + me + w);
            K.topLeftCorner(n, n) = G;
            if (me > 0) {
                K.block(0, n, n, me) = Ae.transpose();
                K.block(n, 0, me, n) = Ae;
            }
            for (Eigen::Index k = 0; k < w; ++k) {
                K.block(0, n + me + k, n, 1) = Ai.row(working[static_cast<std::size_t>(k)]).transpose();
                K.block(n + me + k, 0, 1, n) = Ai.row(working[static_cast<std::size_t>(k)]);
            }
            Vector rhs = Vector::Zero(n + me + w);
            rhs.head(n) = -(G * z + c);
            Eigen::FullPivLU<Matrix> lu(K);
            if (!lu.isInvertible()) return out;
            const Vector sol = lu.solve(rhs);
            Vector p = sol.head(n);
            const double zero_step = 1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff()) + 1e-15 * rhs.cwiseAbs().maxCoeff();
            if (me + w >= n || p.cwiseAbs().maxCoeff() <= zero_step) p.setZero();

            if (p.isZero(0.0)) {
                int worst = -1;
                double most_negative = -1e-12;
                for (Eigen::Index k = 0; k < w; ++k) {
                    const double m = sol[n + me + k];
                    if (m < most_negative) {
                        most_negative = m;
                        worst = static_cast<int>(k);
                    }
                }
                if (worst < 0) {
                    out.z = z;
                    out.lambda = sol.segment(n, me);
                    for (Eigen::Index k = 0; k < w; ++k)
                        out.mu[working[static_cast<std::size_t>(k)]] = std::max(0.0, sol[n + me + k]);
                    out.ok = true;
                    return out;
                }
                working.erase(working.begin() + worst);
                continue;
            }

            double alpha = 1.0;
            int blocking = -1;
            for (Eigen::Index i = 0; i < mi; ++i) {
                if (std::find(working.begin(), working.end(), static_cast<int>(i)) != working.end()) continue;
                const double ap = Ai.row(i).dot(p);
                if (ap <= 1e-14) continue;
                const double room = std::max(0.0, bi[i] - Ai.row(i).dot(z));
                const double a = room / ap;
                if (a < alpha) {
                    alpha = a;
                    blocking = static_cast<int>(i);
                }
            }
            z += alpha * p;
            if (blocking >= 0) working.push_back(blocking);
        }
        return out;
    }
};

}  // namespace detail

/// Solves the QP model of the NLP at p:
///   min grad_f' D + 1/2 D' H D  s.t.  g + Jg D <= 0,  h + Jh D = 0
/// with elastic slacks (l1 penalty) on every linearized constraint so the
/// subproblem is always feasible. `relaxed` reports nonzero slacks, i.e.
/// an inconsistent linearization. The returned multipliers are the new
/// estimates; the step in multiplier space is (lambda - p.lambda, mu - p.mu).
inline QpResult qp_from_model(const Matrix& H, const Vector& grad_f, const Vector& g, const Matrix& jac_g,
                              const Vector& h, const Matrix& jac_h, double elastic_weight = -1.0) {
    // Exact for multipliers below the weight; the default scales with the gradient.
    if (!(elastic_weight > 0.0)) elastic_weight = 1e4 * std::max(1.0, detail::inf_norm(grad_f));
    const Eigen::Index n = grad_f.size();
    const Eigen::Index q = h.size();
    const Eigen::Index s = g.size();
    const Eigen::Index nz = n + 2 * q + s;

    detail::ActiveSetQp qp;
    qp.G = Matrix::Zero(nz, nz);
    qp.G.topLeftCorner(n, n) = H;
    qp.G.bottomRightCorner(nz - n, nz - n) = Matrix::Identity(nz - n, nz - n);
    qp.c = Vector::Constant(nz, elastic_weight);
    qp.c.head(n) = grad_f;

    // jac_h D - s+ + s- = -h
    qp.Ae = Matrix::Zero(q, nz);
    qp.be = -h;
    if (q > 0) {
        qp.Ae.leftCols(n) = jac_h;
        qp.Ae.block(0, n, q, q) = -Matrix::Identity(q, q);
        qp.Ae.block(0, n + q, q, q) = Matrix::Identity(q, q);
    }
    // jac_g D - t <= -g, then -slack <= 0 for every slack
    qp.Ai = Matrix::Zero(s + 2 * q + s, nz);
    qp.bi = Vector::Zero(s + 2 * q + s);
    if (s > 0) {
        qp.Ai.block(0, 0, s, n) = jac_g;
        qp.Ai.block(0, n + 2 * q, s, s) = -Matrix::Identity(s, s);
        qp.bi.head(s) = -g;
    }
    qp.Ai.block(s, n, 2 * q + s, 2 * q + s) = -Matrix::Identity(2 * q + s, 2 * q + s);

    Vector z = Vector::Zero(nz);
    // with D = 0: -s+ + s- = -h  =>  s+ = h when h >= 0, s- = -h otherwise
    for (Eigen::Index k = 0; k < q; ++k) {
        z[n + k] = std::max(0.0, h[k]);
        z[n + q + k] = std::max(0.0, -h[k]);
    }
    for (Eigen::Index k = 0; k < s; ++k) z[n + 2 * q + k] = std::max(0.0, g[k]);

    // Initial working set: constraints tight at z, kept linearly independent.
    std::vector<int> working;
    Matrix rows(0, nz);
    if (q > 0) rows = qp.Ae;
    for (Eigen::Index i = 0; i < qp.Ai.rows(); ++i) {
        if (std::abs(qp.Ai.row(i).dot(z) - qp.bi[i]) > 1e-14 * std::max(1.0, std::abs(qp.bi[i]))) continue;
        Matrix trial(rows.rows() + 1, nz);
        trial << rows, qp.Ai.row(i);
        Eigen::FullPivLU<Matrix> lu(trial);
        if (lu.rank() == trial.rows()) {
            rows = trial;
            working.push_back(static_cast<int>(i));
        }
    }

    const auto sol = qp.solve(z, working);
    if (!sol.ok) throw std::runtime_error("QP subproblem: active-set iteration failed");

    QpResult out;
    out.iterations = sol.iterations;
    out.step = sol.z.head(n);
    out.lambda = sol.lambda;
    out.mu = sol.mu.head(s);
    const double slack = (nz > n) ? sol.z.tail(nz - n).cwiseAbs().maxCoeff() : 0.0;
    out.relaxed = slack > 1e-9;
    return out;
}

/// QP subproblem at p using `hessian` as the Lagrangian Hessian model
/// (finite differences when null).
inline QpResult qp_subproblem(const Nlp& nlp, const KktPoint& p, const Matrix* hessian = nullptr,
                              double relative_step = 6.0554544523933395e-06) {
    const Vector g = nlp.g(p.d);
    const Vector h = nlp.h(p.d);
    const Vector grad_f = fd_gradient(nlp.objective, p.d, relative_step);
    const Matrix jac_g = fd_jacobian([&](const Vector& d) { return nlp.g(d); }, p.d, g.size(), relative_step);
    const Matrix jac_h = fd_jacobian([&](const Vector& d) { return nlp.h(d); }, p.d, h.size(), relative_step);
    const Matrix H = hessian ? *hessian : fd_hessian_lagrangian(nlp, p);
    return qp_from_model(H, grad_f, g, jac_g, h, jac_h);
}

// ---------------------------------------------------------------------------
// Driver

inline SqpReport solve(const Nlp& nlp, const Vector& d0, const SqpOptions& options = {}) {
    if (d0.size() != nlp.dimension) throw std::invalid_argument("sqp::solve: start vector has wrong dimension");
    const double step = options.fd_relative_step;
    const Eigen::Index n = d0.size();

    struct Eval {
        Vector d;
        double f = 0.0;
        Vector g, h, grad_f;
        Matrix jac_g, jac_h;
    };
    auto evaluate = [&](const Vector& d) {
        Eval e;
        e.d = d;
        e.f = nlp.objective(d);
        e.g = nlp.g(d);
        e.h = nlp.h(d);
        e.grad_f = fd_gradient(nlp.objective, d, step);
        e.jac_g = fd_jacobian([&](const Vector& x) { return nlp.g(x); }, d, e.g.size(), step);
        e.jac_h = fd_jacobian([&](const Vector& x) { return nlp.h(x); }, d, e.h.size(), step);
        if (!std::isfinite(e.f)) throw std::runtime_error("sqp::solve: objective not finite");
        return e;
    };

    Eval cur = evaluate(d0);
    Vector lambda = Vector::Zero(cur.h.size());
    Vector mu = Vector::Zero(cur.g.size());
    Matrix B = Matrix::Identity(n, n);
    double weight = 1.0;

    SqpReport report;
    auto residual = [&](const Eval& e, const Vector& lam, const Vector& m) {
        const Vector grad_l = detail::lagrangian_gradient(e.grad_f, e.jac_h, e.jac_g, lam, m);
        double r = std::max(detail::inf_norm(grad_l), detail::inf_norm(e.h));
        for (Eigen::Index s = 0; s < e.g.size(); ++s) {
            r = std::max(r, std::max(0.0, e.g[s]));
            r = std::max(r, std::abs(m[s] * e.g[s]));
        }
        return r;
    };

    auto finish = [&](bool converged, std::string message, int iterations) {
        report.converged = converged;
        report.message = std::move(message);
        report.iterations = iterations;
        report.solution.d = cur.d;
        report.solution.lambda = lambda;
        report.solution.mu = mu;
        report.solution.active_set = active_constraints(cur.g, options.activity_tolerance);
        report.objective_value = cur.f;
        report.kkt_residual_norm = residual(cur, lambda, mu);
        return report;
    };

    for (int k = 0; k < options.max_iterations; ++k) {
        const double r = residual(cur, lambda, mu);
        if (r <= options.tolerance) return finish(true, "converged", k);

        QpResult qp;
        try {
            qp = qp_from_model(B, cur.grad_f, cur.g, cur.jac_g, cur.h, cur.jac_h);
        } catch (const std::exception& e) {
            return finish(false, e.what(), k);
        }
        report.qp_relaxed = report.qp_relaxed || qp.relaxed;

        const Vector& D = qp.step;
        if (D.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, cur.d.cwiseAbs().maxCoeff())) {
            lambda = qp.lambda;
            mu = qp.mu;
            if (residual(cur, lambda, mu) <= options.tolerance) return finish(true, "converged", k + 1);
            return finish(false, "zero step without convergence", k + 1);
        }

        double max_multiplier = 0.0;
        if (qp.lambda.size() > 0) max_multiplier = std::max(max_multiplier, qp.lambda.cwiseAbs().maxCoeff());
        if (qp.mu.size() > 0) max_multiplier = std::max(max_multiplier, qp.mu.maxCoeff());
        weight = std::max(weight, 1.1 * max_multiplier + 1e-3);

        const double viol0 = detail::violation_l1(cur.g, cur.h);
        const double merit0 = cur.f + weight * viol0;
        const double slope = cur.grad_f.dot(D) - weight * viol0;

        double alpha = 1.0;
        bool accepted = false;
        double merit = merit0;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
            const Vector trial = cur.d + alpha * D;
            const double ft = nlp.objective(trial);
            if (!std::isfinite(ft)) continue;
            merit = ft + weight * detail::violation_l1(nlp.g(trial), nlp.h(trial));
            const bool armijo = slope < 0.0 ? merit <= merit0 + 1e-4 * alpha * slope : merit < merit0;
            if (armijo) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            lambda = qp.lambda;
            mu = qp.mu;
            if (residual(cur, lambda, mu) <= options.tolerance) return finish(true, "converged", k + 1);
            return finish(false, "line search failed", k + 1);
        }

        Eval next = evaluate(cur.d + alpha * D);
        const Vector new_lambda = lambda + alpha * (qp.lambda - lambda);
        const Vector new_mu = (mu + alpha * (qp.mu - mu)).cwiseMax(0.0);
        const Vector y = detail::lagrangian_gradient(next.grad_f, next.jac_h, next.jac_g, new_lambda, new_mu) -
                         detail::lagrangian_gradient(cur.grad_f, cur.jac_h, cur.jac_g, new_lambda, new_mu);
        B = bfgs_update(B, next.d - cur.d, y);

        if (options.record_trace)
            report.trace.push_back({k, next.f, merit, r, (alpha * D).norm(), alpha});
        cur = std::move(next);
        lambda = new_lambda;
        mu = new_mu;
    }
    const double r = residual(cur, lambda, mu);
    return finish(r <= options.tolerance, r <= options.tolerance ? "converged" : "iteration limit", options.max_iterations);
}

}  // namespace hopdesign::sqp
