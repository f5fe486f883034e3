#pragma once

#include <array>
#include <string>
#include <vector>

#include "lifs/common.hpp"

namespace lifs {

/// Rank-2 matrix-product form of a two-map fractal function.  The digit-b
/// core is G_b = [[S_{b+1}, lambda_{b+1}], [0, 1]]; with x = 0.b_1 b_2 ...
/// b_d (b_1 most significant),
///     f(x) = [1 0] G_{b_1} G_{b_2} ... G_{b_d} [f(0); 1].
/// The left-to-right product order over most-significant-first digits is
/// pinned by the agreement with the fixed point of
///     f(x/2) = lambda_1 + S_1 f(x),   f(x/2 + 1/2) = lambda_2 + S_2 f(x).
struct QTTCore {
    std::array<double, 2> s;       // S_1, S_2
    std::array<double, 2> lambda;  // lambda_1, lambda_2
    double f0 = 0.0;               // f(0) = lambda_1 / (1 - S_1)

    std::array<std::array<double, 2>, 2> mat(int digit) const;

    std::string to_json() const;
    static QTTCore from_json(const std::string& text);
};

QTTCore build_qtt(double lambda1, double lambda2, double s1, double s2);

/// Evaluate at x = 0.digits; d = 0 gives f(0).
double qtt_eval(const QTTCore& core, const std::vector<int>& digits);

/// Evaluate at every grid index of {j / 2^d : 0 <= j < 2^d}; CSV `x,value`.
std::vector<double> qtt_eval_grid(const QTTCore& core, int d);
std::string qtt_grid_csv(const QTTCore& core, int d);

/// Structural rank: 2 generically, 1 for the zero core.
int qtt_rank_report(const QTTCore& core);

}  // namespace lifs
