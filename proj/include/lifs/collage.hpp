#pragma once

#include <Eigen/Dense>

#include "lifs/rb.hpp"

namespace lifs {

/// Symmetric positive-definite quadratic form Psi(u) = 1/2 u^T G u - b^T u
/// with the energy-norm equivalence constants c1, c2 (square roots of the
/// extreme eigenvalues of G).
struct QuadraticForm {
    Eigen::MatrixXd gram;
    Eigen::VectorXd load;
    double c1 = 0.0;
    double c2 = 0.0;

    static QuadraticForm make(Eigen::MatrixXd gram, Eigen::VectorXd load);

    double energy_norm(const Eigen::VectorXd& v) const { return std::sqrt(v.dot(gram * v)); }
};

/// L^2-fitting form on a grid of n points: uniform rectangle-rule weights
/// 1/n, load b(v) = a(target, v).
QuadraticForm l2_form(const Grid& grid, const std::vector<double>& target_values);

/// 1D Dirichlet Poisson model form: stiffness from central second
/// differences on the interior points (boundary rows eliminated), load from
/// a source term.  Operates on the interior value vector.
QuadraticForm poisson_form(int n_interior, const std::vector<double>& source_values);

/// RB-operator family F(u; alpha) = F(u; 0) + sum alpha_j basis_j, where
/// F(u; 0) is the pure-scaling part (lambda = 0) and each basis function is
/// the lambda^g image of one parameter direction.
class ParametricRB {
  public:
    /// directions[j] is the N-tuple of lambda functions of parameter j.
    ParametricRB(const LocalIFS1D& ifs, const std::vector<SampledFunction>& scalings,
                 const std::vector<std::vector<SampledFunction>>& directions, const Grid& grid);

    int dim() const { return static_cast<int>(basis_.cols()); }
    int grid_size() const { return base_.size(); }
    /// Lipschitz constant of F(.;0) in the Euclidean norm (the norm the
    /// c1/c2 equivalence constants refer to): the operator 2-norm of the
    /// base matrix, exact because its columns are mutually orthogonal.
    double contraction_c() const { return c_; }
    const Eigen::MatrixXd& basis() const { return basis_; }
    const DiscreteRB& base() const { return base_; }
    const Grid& grid() const { return base_.grid(); }

    /// F(u; 0): pure-scaling application (lambda = 0).
    Eigen::VectorXd apply_base(const Eigen::VectorXd& u) const;
    /// F(u; alpha).
    Eigen::VectorXd apply(const Eigen::VectorXd& u, const Eigen::VectorXd& alpha) const;

    /// Fixed point of F(.; alpha) by direct RB solve (oracle for V_N
    /// membership checks).
    Eigen::VectorXd fixed_point(const Eigen::VectorXd& alpha, double tol = 1e-13) const;

  private:
    DiscreteRB base_;        // lambda = 0 operator
    Eigen::MatrixXd basis_;  // n x M, column j = F(0; e_j)
    double c_ = 0.0;
};

struct GOperatorResult {
    Eigen::VectorXd g_u;
    Eigen::VectorXd alpha;
};

/// G(u) = argmin over the affine set F(u;0) + span(basis) of Psi.
GOperatorResult g_operator(const ParametricRB& prb, const QuadraticForm& form,
                           const Eigen::VectorXd& u);

struct CollageFitResult {
    Eigen::VectorXd u_tilde;
    Eigen::VectorXd alpha;
    int iters = 0;
    double residual = 0.0;       // ||G(u) - u|| at exit
    double vn_residual = 0.0;    // ||u_tilde - fixed_point(alpha)||
    double gamma = 0.0;          // c c2 / c1
};

CollageFitResult collage_fit(const ParametricRB& prb, const QuadraticForm& form, double tol,
                             int max_iter);

/// Max of ||G(u) - G(v)|| / ||u - v|| over random pairs.
double contraction_estimate(const ParametricRB& prb, const QuadraticForm& form, int trials,
                            std::uint64_t seed = 1);

struct QuasiOptimality {
    double bound = 0.0;
    bool holds = false;
};

QuasiOptimality quasi_optimality_check(double c, double gamma, double reference_best_error,
                                       double collage_error, double tolerance = 1e-9);

}  // namespace lifs
