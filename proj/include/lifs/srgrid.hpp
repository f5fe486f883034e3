#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lifs/common.hpp"
#include "lifs/polyjet.hpp"

namespace lifs {

/// Exact dyadic point 0.d_1 d_2 ... d_J stored as its digit list (most
/// significant first, trailing zeros stripped).  The point 1 is the
/// distinguished digit string "1" whose shift image is 0.
class DyadicPoint {
  public:
    DyadicPoint() = default;  // zero
    explicit DyadicPoint(std::vector<std::uint8_t> digits);
    static DyadicPoint zero() { return DyadicPoint(); }
    static DyadicPoint one();
    /// From a value k / 2^J.
    static DyadicPoint from_value(double x, int max_digits = 62);

    bool is_one() const { return one_; }
    const std::vector<std::uint8_t>& digits() const { return digits_; }
    int digit_count() const { return one_ ? 1 : static_cast<int>(digits_.size()); }
    double value() const;

    /// sigma: drop the leading digit (2x mod 1 for dyadic x); 1 maps to 0.
    DyadicPoint shift() const;
    /// l_0(x) = x/2, l_1(x) = (x+1)/2: prepend a digit.
    DyadicPoint half(int leading_digit) const;

    bool operator==(const DyadicPoint& o) const { return one_ == o.one_ && digits_ == o.digits_; }
    bool operator<(const DyadicPoint& o) const;

  private:
    bool one_ = false;
    std::vector<std::uint8_t> digits_;  // empty means 0
};

/// Finite set gamma with {0,1} included, gamma subset of l_0(gamma) u l_1(gamma)
/// and sigma(gamma) subset of gamma.
struct SelfRefGrid {
    std::vector<DyadicPoint> points;  // sorted

    bool contains(const DyadicPoint& p) const;
    bool is_shift_invariant() const;
    bool is_self_referential() const;

    std::string to_csv() const;
};

/// Smallest sigma-closed superset of m together with {0, 1}.
SelfRefGrid close_grid(const std::vector<DyadicPoint>& m);

/// Affine jet map pair (W_0, b_0), (W_1, b_1) for the digit recursion.
struct JetMapPair {
    Eigen::MatrixXd w0, w1;
    Eigen::VectorXd b0, b1;
};

JetMapPair fractel_pair(const Fractel& at0, const Fractel& at1);

/// Jet at x via the digit recursion y <- W_d y + b_d, digits applied last
/// first; f0 is the jet at 0.  A probe check of the fractel property runs
/// before the recursion.
JetVector evaluate_along_digits(const JetMapPair& pair, const JetVector& f0, const DyadicPoint& x);

struct GridEvaluation {
    std::vector<DyadicPoint> points;
    std::vector<Eigen::VectorXd> jets;
    int affine_applications = 0;  // operation counter: O(|gamma|) total
};

/// Evaluate the jet function on every point of a sigma-closed grid, reusing
/// each suffix result (each grid point costs one affine application).
GridEvaluation evaluate_grid(const JetMapPair& pair, const JetVector& f0, const SelfRefGrid& grid);

}  // namespace lifs
