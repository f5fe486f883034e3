#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lifs/common.hpp"
#include "lifs/local_ifs.hpp"

namespace lifs {

/// Truncated derivative vector of a polynomial at a point: entry k is the
/// raw k-th derivative value (not divided by k!).  Degree is tight: the last
/// entry is nonzero.
struct JetVector {
    Eigen::VectorXd values;  // length degree + 1
    int degree = 0;
};

/// Trim trailing (near-)zero entries so the degree is tight.
JetVector make_jet(const Eigen::VectorXd& raw, double tol = 0.0);

/// Polynomial coefficients a_k = k-th derivative at zero, so
/// p(x) = sum a_k x^k / k!.  Requires a_M != 0.
JetVector jet_at(const std::vector<double>& coefficients, double x);

/// Taylor basis vector v(t) with v_k = t^k / k!, truncation m + 1.
Eigen::VectorXd taylor_basis(double t, int m);

/// Upper-left triangular Hankel matrix [A(x)]_{ij} = f_{i+j}.
Eigen::MatrixXd hankel_matrix(const JetVector& jet);

/// Lower triangular Toeplitz matrix [V(t)]_{ij} = v_{i-j} for i >= j.
/// Equals exp(t * shift) exactly at this truncation.
Eigen::MatrixXd toeplitz_shift(double t, int m);

/// Dilation D_s = diag(s^k).
Eigen::MatrixXd dilation(double s, int m);

/// Translated jet: computed as both A(x) v(t) and V(t)^T f(x) (the Toeplitz
/// group acts on row jets from the right); the two routes must agree to
/// 1e-10.
JetVector taylor_translate(const JetVector& jet, double t);

/// Moore-Penrose inverse of the truncated Hankel A: geometric-series form
/// sum_{k<=M} L^k (1/a_M) P_M with L = I - (1/a_M) P_M A nilpotent.
Eigen::MatrixXd hankel_pseudoinverse(const Eigen::MatrixXd& a);

/// W_s(x) = A(x) D_s A(x)^+; upper triangular with diagonal
/// {s^M, ..., s, 1} (the anti-triangular Hankel conjugation reverses the
/// dilation order), so the eigenvalues are {1, s, ..., s^M}.
Eigen::MatrixXd fractel_linear(const JetVector& jet, double s);

/// Affine jet-space map w(t, y) = (l_x(t), linear y + offset) leaving the
/// graph of the jet function invariant.
struct Fractel {
    AffineMap1D l;           // l_x(t) = (1 - s) x + s t
    Eigen::MatrixXd linear;  // W_s(x) - theta e_M e_M^T
    Eigen::VectorXd offset;  // theta f_M(x) e_M; f_M is constant on the graph
};

Fractel make_theta_fractel(const JetVector& jet_at_x, double x, double s, double theta);

/// Reconstruct the jet of the polynomial at a dyadic point x = 0.d_1...d_J
/// using the two-map theta-regularized IFS (fractels at 0 and 1, s = 1/2)
/// and the digit recursion y <- W_d y + b_d.
JetVector poly_ifs_reconstruct(const std::vector<double>& coefficients, double s, double theta,
                               int digits, double x);

}  // namespace lifs
