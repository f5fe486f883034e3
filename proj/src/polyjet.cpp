#include "lifs/polyjet.hpp"

#include <cmath>

namespace lifs {

JetVector make_jet(const Eigen::VectorXd& raw, double tol) {
    int m = static_cast<int>(raw.size()) - 1;
    while (m > 0 && std::abs(raw(m)) <= tol) --m;
    JetVector j;
    j.values = raw.head(m + 1);
    j.degree = m;
    return j;
}

JetVector jet_at(const std::vector<double>& coefficients, double x) {
    const int m = static_cast<int>(coefficients.size()) - 1;
    if (m < 0) throw Error("empty coefficient list");
    if (coefficients[m] == 0.0 && m > 0)
        throw ZeroLeadingCoefficient("leading coefficient a_M must be nonzero");
    JetVector j;
    j.degree = m;
    j.values = Eigen::VectorXd::Zero(m + 1);
    // f_k(x) = sum_j a_{k+j} x^j / j!
    for (int k = 0; k <= m; ++k) {
        double term = 1.0;  // x^j / j!
        double acc = 0.0;
        for (int jj = 0; k + jj <= m; ++jj) {
            acc += coefficients[k + jj] * term;
            term *= x / (jj + 1);
        }
        j.values(k) = acc;
    }
    return j;
}

Eigen::VectorXd taylor_basis(double t, int m) {
    Eigen::VectorXd v(m + 1);
    double term = 1.0;
    for (int k = 0; k <= m; ++k) {
        v(k) = term;
        term *= t / (k + 1);
    }
    return v;
}

Eigen::MatrixXd hankel_matrix(const JetVector& jet) {
    const int n = jet.degree + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) a(i, j) = jet.values(i + j);
    return a;
}

Eigen::MatrixXd toeplitz_shift(double t, int m) {
    Eigen::VectorXd v = taylor_basis(t, m);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= i; ++j) out(i, j) = v(i - j);
    return out;
}

Eigen::MatrixXd dilation(double s, int m) {
    Eigen::VectorXd d(m + 1);
    double p = 1.0;
    for (int k = 0; k <= m; ++k) {
        d(k) = p;
        p *= s;
    }
    return d.asDiagonal();
}

JetVector taylor_translate(const JetVector& jet, double t) {
    const int m = jet.degree;
    Eigen::VectorXd via_hankel = hankel_matrix(jet) * taylor_basis(t, m);
    // translation acts on (column) jets through V(t)^T: f(x+t)^T = f(x)^T V(t)
    Eigen::VectorXd via_toeplitz = toeplitz_shift(t, m).transpose() * jet.values;
    if ((via_hankel - via_toeplitz).cwiseAbs().maxCoeff() > 1e-10)
        throw Error("taylor_translate: A(x)v(t) and V(t)^T f(x) disagree");
    JetVector out;
    out.values = via_toeplitz;
    out.degree = m;
    return out;
}

Eigen::MatrixXd hankel_pseudoinverse(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const int m = n - 1;
    const double a_m = a(m, 0);
    if (a_m == 0.0) throw DegenerateHankel("antidiagonal element a_M is zero");
    // reversal permutation P_M
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) p(i, m - i) = 1.0;
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n) - (1.0 / a_m) * (p * a);
    // L is strictly lower triangular Toeplitz, so L^{M+1} = 0 and the
    // geometric series terminates
    Eigen::MatrixXd series = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= m; ++k) {
        power = power * l;
        series += power;
    }
    return series * ((1.0 / a_m) * p);
}

Eigen::MatrixXd fractel_linear(const JetVector& jet, double s) {
    if (!(s > 0.0 && s < 1.0)) throw Error("fractel scale must satisfy 0 < s < 1");
    Eigen::MatrixXd a = hankel_matrix(jet);
    return a * dilation(s, jet.degree) * hankel_pseudoinverse(a);
}

Fractel make_theta_fractel(const JetVector& jet_at_x, double x, double s, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ThetaOutOfRange("theta must be in [0,1]");
    const int m = jet_at_x.degree;
    Fractel w;
    w.l = AffineMap1D{s, (1.0 - s) * x};
    w.linear = fractel_linear(jet_at_x, s);
    // Regularize the eigenvalue-1 direction: the top component f_M is
    // constant along the graph, so W y and (W - theta e_M e_M^T) y +
    // theta f_M e_M agree on every graph point while the unit eigenvalue
    // becomes 1 - theta (unique attractor for theta > 0).
    w.linear(m, m) -= theta;
    w.offset = Eigen::VectorXd::Zero(m + 1);
    w.offset(m) = theta * jet_at_x.values(m);
    return w;
}

JetVector poly_ifs_reconstruct(const std::vector<double>& coefficients, double s, double theta,
                               int digits, double x) {
    if (s != 0.5) throw Error("two-map construction requires s = 1/2");
    const double scaled = std::ldexp(x, digits);
    if (scaled != std::floor(scaled) || x < 0.0 || x >= 1.0)
        throw NonDyadicPoint("x is not a " + std::to_string(digits) + "-digit dyadic point");
    long long idx = static_cast<long long>(scaled);

    JetVector jet0 = jet_at(coefficients, 0.0);
    JetVector jet1 = jet_at(coefficients, 1.0);
    Fractel w[2] = {make_theta_fractel(jet0, 0.0, s, theta),
                    make_theta_fractel(jet1, 1.0, s, theta)};

    // digits d_1 (most significant) ... d_J of x; recursion applies d_J first
    Eigen::VectorXd y = jet0.values;
    for (int k = 0; k < digits; ++k) {
        int d = static_cast<int>(idx >> k & 1);  // d_{J-k}
        y = w[d].linear * y + w[d].offset;
    }
    JetVector out;
    out.values = y;
    out.degree = jet0.degree;
    return out;
}

}  // namespace lifs
