#pragma once

#include <optional>
#include <vector>

#include "lifs/common.hpp"

namespace lifs {

/// Ordered knots 0 = x_0 < x_1 < ... < x_N = 1.
struct Partition1D {
    std::vector<double> knots;

    explicit Partition1D(std::vector<double> k);

    int cells() const { return static_cast<int>(knots.size()) - 1; }

    /// i-th cell [x_{i-1}, x_i), 1-based.
    Interval cell(int i) const { return {knots[i - 1], knots[i]}; }
};

struct AffineMap1D {
    double a = 1.0;  // slope
    double b = 0.0;  // offset

    double operator()(double x) const { return a * x + b; }
    double inverse(double y) const { return (y - b) / a; }
    double lipschitz() const { return std::abs(a); }

    Interval image(const Interval& d) const {
        double u = (*this)(d.lo), v = (*this)(d.hi);
        return u <= v ? Interval{u, v} : Interval{v, u};
    }
};

/// A local IFS on [0,1]: affine maps u_i defined on domain intervals X_i,
/// with images u_i(X_i) = [x_{i-1}, x_i) forming an exact partition of [0,1]
/// (property (P)).  The last image is closed at 1.
class LocalIFS1D {
  public:
    LocalIFS1D(Partition1D partition, std::vector<Interval> domains,
               std::vector<AffineMap1D> maps);

    int size() const { return static_cast<int>(maps_.size()); }
    const Partition1D& partition() const { return partition_; }
    const Interval& domain(int i) const { return domains_[i - 1]; }   // 1-based
    const AffineMap1D& map(int i) const { return maps_[i - 1]; }      // 1-based
    Interval image(int i) const { return partition_.cell(i); }

    /// Index i of the image cell containing x (1-based); x = 1 belongs to
    /// the last cell.
    int cell_of(double x) const;

    double max_lipschitz() const;

    /// Membership test honoring the closed-at-1 convention of the last cell.
    bool in_domain(int i, double x) const {
        if (i == size()) return domains_[i - 1].contains_closed(x) && x <= 1.0;
        return domains_[i - 1].contains(x);
    }

    std::string to_json() const;
    static LocalIFS1D from_json(const std::string& text);

  private:
    Partition1D partition_;
    std::vector<Interval> domains_;
    std::vector<AffineMap1D> maps_;
};

/// Binary (global) local IFS: {0, 1/2, 1}, X_1 = X_2 = [0,1),
/// u_1(x) = x/2, u_2(x) = (x+1)/2.
LocalIFS1D binary_ifs();

/// Uniform pairwise layout with even N and h = 2/N:
/// X_{2j-1} = X_{2j} = [(j-1)h, jh),
/// u_{2j-1}(x) = (x+(j-1)h)/2, u_{2j}(x) = (x+jh)/2.
LocalIFS1D uniform_pair_ifs(int n);

/// Interval u_{sigma_1} o ... o u_{sigma_K}([0,1]); digits are 1-based map
/// indices.  Requires all maps contractive.
Interval address_point(const LocalIFS1D& ifs, const std::vector<int>& sigma);

// ---------------------------------------------------------------------------
// 2D point-set machinery (desk-scale surrogate for the set-valued operator)

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool contains(const Point2& p) const {
        return x_lo <= p.x && p.x <= x_hi && y_lo <= p.y && p.y <= y_hi;
    }
};

struct AffineMap2D {
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    double tx = 0, ty = 0;
    Point2 operator()(const Point2& p) const {
        return {m00 * p.x + m01 * p.y + tx, m10 * p.x + m11 * p.y + ty};
    }
};

/// Finite planar point set, deduplicated on a snap grid.
class PointSet2D {
  public:
    explicit PointSet2D(double snap_pitch = 1e-3) : pitch_(snap_pitch) {}
    PointSet2D(std::vector<Point2> pts, double snap_pitch);

    void insert(const Point2& p);
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }
    double pitch() const { return pitch_; }
    const std::vector<Point2>& points() const { return points_; }

    /// Uniform n x n sample of a bounding box.
    static PointSet2D sample_box(const Rect& box, int n, double snap_pitch);

    std::string to_csv() const;

  private:
    double pitch_;
    std::vector<Point2> points_;
    // snapped integer keys for dedup
    std::vector<std::pair<long long, long long>> keys_;
};

struct IFSMap2D {
    Rect domain;      // X_i
    AffineMap2D map;  // f_i
};

/// One application of the local set-valued operator: union of f_i(S cap X_i).
/// Points outside every domain are dropped.  An all-empty intersection yields
/// the empty set (itself a valid local attractor).
PointSet2D apply_set_operator(const std::vector<IFSMap2D>& maps, const PointSet2D& s);

double hausdorff_distance(const PointSet2D& a, const PointSet2D& b);

struct AttractorEstimate {
    PointSet2D set;
    int iterations = 0;
    double last_step = 0.0;  // Hausdorff distance between final iterates
};

/// Iterate the set operator from a uniform box sample until successive
/// iterates stop moving (or max_iter).
AttractorEstimate iterate_attractor(const std::vector<IFSMap2D>& maps, const Rect& box,
                                    int start_samples = 64, double snap_pitch = 1e-3,
                                    int max_iter = 60);

struct CollageCheck {
    double epsilon = 0.0;  // d_H(M, F(M))
    double bound = 0.0;    // epsilon / (1 - s)
    double actual = 0.0;   // d_H(M, A_est)
    bool holds = false;
};

/// Verify the collage bound d_H(M, A) < eps/(1-s) numerically for a global
/// (all-domain) IFS with contraction factor s.
CollageCheck verify_collage_bound(const PointSet2D& m, const std::vector<IFSMap2D>& ifs,
                                  double s, int iterations);

}  // namespace lifs
