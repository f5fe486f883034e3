#include "lifs/srgrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lifs {

DyadicPoint::DyadicPoint(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
    for (auto d : digits_)
        if (d > 1) throw Error("dyadic digits must be 0 or 1");
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
}

DyadicPoint DyadicPoint::one() {
    DyadicPoint p;
    p.one_ = true;
    return p;
}

DyadicPoint DyadicPoint::from_value(double x, int max_digits) {
    if (x == 1.0) return one();
    if (!(x >= 0.0 && x < 1.0)) throw NonDyadicPoint("value outside [0,1]");
    std::vector<std::uint8_t> d;
    double rest = x;
    for (int k = 0; k < max_digits && rest != 0.0; ++k) {
        rest *= 2.0;
        int bit = rest >= 1.0 ? 1 : 0;
        rest -= bit;
        d.push_back(static_cast<std::uint8_t>(bit));
    }
    if (rest != 0.0) throw NonDyadicPoint("value is not dyadic at this digit budget");
    return DyadicPoint(std::move(d));
}

double DyadicPoint::value() const {
    if (one_) return 1.0;
    double v = 0.0;
    for (int k = static_cast<int>(digits_.size()) - 1; k >= 0; --k) v = (v + digits_[k]) / 2.0;
    return v;
}

DyadicPoint DyadicPoint::shift() const {
    if (one_ || digits_.empty()) return DyadicPoint();  // sigma(1) = 0, sigma(0) = 0
    return DyadicPoint(std::vector<std::uint8_t>(digits_.begin() + 1, digits_.end()));
}

DyadicPoint DyadicPoint::half(int leading_digit) const {
    if (leading_digit != 0 && leading_digit != 1) throw Error("digit must be 0 or 1");
    if (one_) {
        // l_1(1) = 1; l_0(1) = 1/2 = 0.1
        if (leading_digit == 1) return one();
        return DyadicPoint({1});
    }
    std::vector<std::uint8_t> d;
    d.reserve(digits_.size() + 1);
    d.push_back(static_cast<std::uint8_t>(leading_digit));
    d.insert(d.end(), digits_.begin(), digits_.end());
    return DyadicPoint(std::move(d));
}

bool DyadicPoint::operator<(const DyadicPoint& o) const {
    if (one_ != o.one_) return o.one_;  // 1 is the largest
    return digits_ < o.digits_;         // lexicographic = numeric for stripped digits
}

bool SelfRefGrid::contains(const DyadicPoint& p) const {
    return std::binary_search(points.begin(), points.end(), p,
                              [](const DyadicPoint& a, const DyadicPoint& b) { return a < b; });
}

bool SelfRefGrid::is_shift_invariant() const {
    for (const auto& p : points)
        if (!contains(p.shift())) return false;
    return true;
}

bool SelfRefGrid::is_self_referential() const {
    // x = l_i(sigma(x)) with i the leading digit; 1 = l_1(1)
    for (const auto& p : points) {
        if (p.is_one()) continue;  // covered by itself under l_1
        DyadicPoint s = p.shift();
        if (!contains(s)) return false;
        if (!(s.half(0) == p || s.half(1) == p)) return false;
    }
    return true;
}

std::string SelfRefGrid::to_csv() const {
    std::ostringstream os;
    os << "digits,value\n";
    for (const auto& p : points) {
        if (p.is_one()) {
            os << "1," << format_full(1.0) << "\n";
            continue;
        }
        std::string bits;
        for (auto d : p.digits()) bits += static_cast<char>('0' + d);
        if (bits.empty()) bits = "0";
        os << bits << "," << format_full(p.value()) << "\n";
    }
    return os.str();
}

SelfRefGrid close_grid(const std::vector<DyadicPoint>& m) {
    std::vector<DyadicPoint> pts{DyadicPoint::zero(), DyadicPoint::one()};
    auto add = [&pts](const DyadicPoint& p) {
        auto it = std::lower_bound(pts.begin(), pts.end(), p);
        if (it != pts.end() && *it == p) return false;
        pts.insert(it, p);
        return true;
    };
    std::sort(pts.begin(), pts.end());
    std::vector<DyadicPoint> work = m;
    while (!work.empty()) {
        DyadicPoint p = work.back();
        work.pop_back();
        if (add(p)) work.push_back(p.shift());
    }
    return SelfRefGrid{std::move(pts)};
}

JetMapPair fractel_pair(const Fractel& at0, const Fractel& at1) {
    return JetMapPair{at0.linear, at1.linear, at0.offset, at1.offset};
}

namespace {
void probe_fractel_property(const JetMapPair& pair, const JetVector& f0) {
    // w_0 must fix (0, f(0)) since l_0(0) = 0
    double r0 = (pair.w0 * f0.values + pair.b0 - f0.values).cwiseAbs().maxCoeff();
    if (r0 > 1e-8) throw GraphInvarianceViolated("w_0 does not fix the jet at 0");
    // two routes to 1/2 must agree: l_1(0) and l_0(1), with f(1) the fixed
    // point of w_1 (l_1(1) = 1)
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(pair.w1.rows(), pair.w1.cols()) - pair.w1;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
        Eigen::VectorXd f1 = lu.solve(pair.b1);
        Eigen::VectorXd via1 = pair.w1 * f0.values + pair.b1;  // f(l_1(0))
        Eigen::VectorXd via0 = pair.w0 * f1 + pair.b0;         // f(l_0(1))
        double scale = std::max(1.0, via1.cwiseAbs().maxCoeff());
        if ((via1 - via0).cwiseAbs().maxCoeff() > 1e-8 * scale)
            throw GraphInvarianceViolated("the two digit routes to 1/2 disagree");
    }
}
}  // namespace

JetVector evaluate_along_digits(const JetMapPair& pair, const JetVector& f0,
                                const DyadicPoint& x) {
    probe_fractel_property(pair, f0);
    Eigen::VectorXd y = f0.values;
    if (x.is_one()) {
        // 1 = l_1(1): the fixed point of w_1
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(pair.w1.rows(), pair.w1.cols()) - pair.w1;
        y = Eigen::FullPivLU<Eigen::MatrixXd>(a).solve(pair.b1);
    } else {
        const auto& d = x.digits();
        for (int k = static_cast<int>(d.size()) - 1; k >= 0; --k) {
            if (d[k] == 0)
                y = pair.w0 * y + pair.b0;
            else
                y = pair.w1 * y + pair.b1;
        }
    }
    JetVector out;
    out.values = y;
    out.degree = f0.degree;
    return out;
}

GridEvaluation evaluate_grid(const JetMapPair& pair, const JetVector& f0,
                             const SelfRefGrid& grid) {
    probe_fractel_property(pair, f0);
    // process in increasing digit count: sigma(x) is always available
    std::vector<const DyadicPoint*> order;
    for (const auto& p : grid.points) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const DyadicPoint* a, const DyadicPoint* b) {
                  if (a->digit_count() != b->digit_count())
                      return a->digit_count() < b->digit_count();
                  return *a < *b;
              });
    GridEvaluation out;
    out.points = grid.points;
    out.jets.resize(grid.points.size());
    auto index_of = [&grid](const DyadicPoint& p) {
        auto it = std::lower_bound(grid.points.begin(), grid.points.end(), p);
        return static_cast<std::size_t>(it - grid.points.begin());
    };
    for (const DyadicPoint* p : order) {
        std::size_t idx = index_of(*p);
        if (p->digits().empty() && !p->is_one()) {
            out.jets[idx] = f0.values;
            continue;
        }
        if (p->is_one()) {
            Eigen::MatrixXd a =
                Eigen::MatrixXd::Identity(pair.w1.rows(), pair.w1.cols()) - pair.w1;
            out.jets[idx] = Eigen::FullPivLU<Eigen::MatrixXd>(a).solve(pair.b1);
            ++out.affine_applications;
            continue;
        }
        DyadicPoint s = p->shift();
        const Eigen::VectorXd& prev = out.jets[index_of(s)];
        if (p->digits().front() == 0)
            out.jets[idx] = pair.w0 * prev + pair.b0;
        else
            out.jets[idx] = pair.w1 * prev + pair.b1;
        ++out.affine_applications;
    }
    return out;
}

}  // namespace lifs
