#include "lifs/collage.hpp"

#include <cmath>

namespace lifs {

QuadraticForm QuadraticForm::make(Eigen::MatrixXd gram, Eigen::VectorXd load) {
    if (gram.rows() != gram.cols() || gram.rows() != load.size())
        throw Error("quadratic form: dimension mismatch");
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("quadratic form must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) throw Error("quadratic form must be positive definite");
    QuadraticForm f;
    f.gram = std::move(gram);
    f.load = std::move(load);
    f.c1 = std::sqrt(lo);
    f.c2 = std::sqrt(hi);
    return f;
}

QuadraticForm l2_form(const Grid& grid, const std::vector<double>& target_values) {
    const int n = grid.size();
    if (static_cast<int>(target_values.size()) != n) throw Error("l2_form: length mismatch");
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(n, n) / n;
    Eigen::VectorXd t(n);
    for (int k = 0; k < n; ++k) t(k) = target_values[k];
    return QuadraticForm::make(std::move(gram), t / n);
}

QuadraticForm poisson_form(int n_interior, const std::vector<double>& source_values) {
    const int n = n_interior;
    if (static_cast<int>(source_values.size()) != n) throw Error("poisson_form: length mismatch");
    const double h = 1.0 / (n + 1);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        k(i, i) = 2.0 / h;
        if (i > 0) k(i, i - 1) = -1.0 / h;
        if (i + 1 < n) k(i, i + 1) = -1.0 / h;
    }
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = h * source_values[i];
    return QuadraticForm::make(std::move(k), std::move(b));
}

ParametricRB::ParametricRB(const LocalIFS1D& ifs, const std::vector<SampledFunction>& scalings,
                           const std::vector<std::vector<SampledFunction>>& directions,
                           const Grid& grid)
    : base_([&] {
          std::vector<SampledFunction> zeros;
          for (int i = 1; i <= ifs.size(); ++i)
              zeros.push_back(SampledFunction::constant(0.0, ifs.domain(i)));
          return DiscreteRB(RBSpec(ifs, zeros, scalings), grid);
      }()) {
    const int n = base_.size();
    const int m = static_cast<int>(directions.size());
    if (m == 0) throw Error("parametric RB needs at least one direction");
    basis_.resize(n, m);
    for (int j = 0; j < m; ++j) {
        DiscreteRB rb(RBSpec(ifs, directions[j], scalings), grid);
        for (int k = 0; k < n; ++k) basis_(k, j) = rb.lambda_vec()[k];
    }
    // Lipschitz constant of F(.;0) in the Euclidean norm underlying c1/c2.
    // The columns of the base matrix are mutually orthogonal (one nonzero per
    // row), so the operator 2-norm is the largest column norm.
    std::vector<double> colsq(n, 0.0);
    const auto& src = base_.source_index();
    const auto& srow = base_.scaling_diag();
    for (int k = 0; k < n; ++k) colsq[src[k]] += srow[k] * srow[k];
    for (double v : colsq) c_ = std::max(c_, std::sqrt(v));
    if (!(c_ < 1.0)) throw ContractivityViolated("scaling part must be contractive");
}

Eigen::VectorXd ParametricRB::apply_base(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(base_.size());
    const auto& src = base_.source_index();
    const auto& s = base_.scaling_diag();
    for (int k = 0; k < base_.size(); ++k) out(k) = s[k] * u(src[k]);
    return out;
}

Eigen::VectorXd ParametricRB::apply(const Eigen::VectorXd& u, const Eigen::VectorXd& alpha) const {
    return apply_base(u) + basis_ * alpha;
}

Eigen::VectorXd ParametricRB::fixed_point(const Eigen::VectorXd& alpha, double tol) const {
    const int n = base_.size();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lam = basis_ * alpha;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd next = apply_base(f) + lam;
        double r = (next - f).cwiseAbs().maxCoeff();
        f = std::move(next);
        if (r <= tol) break;
    }
    return f;
}

GOperatorResult g_operator(const ParametricRB& prb, const QuadraticForm& form,
                           const Eigen::VectorXd& u) {
    Eigen::VectorXd fu0 = prb.apply_base(u);
    const Eigen::MatrixXd& b = prb.basis();
    // minimize Psi(fu0 + B alpha): (B^T G B) alpha = B^T (load - G fu0)
    Eigen::MatrixXd normal = b.transpose() * form.gram * b;
    Eigen::VectorXd rhs = b.transpose() * (form.load - form.gram * fu0);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularNormalEquations("degenerate basis in G-operator");
    GOperatorResult r;
    r.alpha = ldlt.solve(rhs);
    r.g_u = fu0 + b * r.alpha;
    return r;
}

CollageFitResult collage_fit(const ParametricRB& prb, const QuadraticForm& form, double tol,
                             int max_iter) {
    if (!(tol > 0.0)) throw Error("tol must be positive");
    CollageFitResult res;
    res.gamma = prb.contraction_c() * form.c2 / form.c1;
    if (!(res.gamma < 1.0))
        throw GammaNotLessThanOne("gamma = c c2/c1 = " + format_full(res.gamma) + " >= 1");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(prb.grid_size());
    for (int k = 0; k < max_iter; ++k) {
        GOperatorResult g = g_operator(prb, form, u);
        res.residual = (g.g_u - u).norm();
        u = g.g_u;
        res.alpha = g.alpha;
        res.iters = k + 1;
        if (res.residual <= tol) break;
    }
    res.u_tilde = u;
    res.vn_residual = (u - prb.fixed_point(res.alpha)).norm();
    return res;
}

double contraction_estimate(const ParametricRB& prb, const QuadraticForm& form, int trials,
                            std::uint64_t seed) {
    if (trials < 10) throw Error("contraction_estimate needs >= 10 trials");
    Rng rng(seed);
    double worst = 0.0;
    const int n = prb.grid_size();
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd u(n), v(n);
        for (int k = 0; k < n; ++k) {
            u(k) = rng.uniform(-1.0, 1.0);
            v(k) = rng.uniform(-1.0, 1.0);
        }
        double d = (u - v).norm();
        if (d == 0.0) continue;  // degenerate pair, skip
        double num = (g_operator(prb, form, u).g_u - g_operator(prb, form, v).g_u).norm();
        worst = std::max(worst, num / d);
    }
    return worst;
}

QuasiOptimality quasi_optimality_check(double c, double gamma, double reference_best_error,
                                       double collage_error, double tolerance) {
    if (!(gamma < 1.0 && c > 0.0)) throw Error("quasi-optimality requires gamma < 1, c > 0");
    QuasiOptimality q;
    q.bound = (1.0 / c + 1.0) / (1.0 / gamma - 1.0) * reference_best_error;
    q.holds = collage_error <= q.bound + tolerance;
    return q;
}

}  // namespace lifs
