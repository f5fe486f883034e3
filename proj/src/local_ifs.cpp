#include "lifs/local_ifs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace lifs {

namespace {
constexpr double kPropPTol = 1e-10;  // endpoint matching tolerance
}

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Partition1D::Partition1D(std::vector<double> k) : knots(std::move(k)) {
    if (knots.size() < 2) throw Error("partition needs at least two knots");
    if (knots.front() != 0.0 || knots.back() != 1.0)
        throw Error("partition must start at 0 and end at 1");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i - 1] < knots[i])) throw Error("partition knots must be strictly increasing");
}

LocalIFS1D::LocalIFS1D(Partition1D partition, std::vector<Interval> domains,
                       std::vector<AffineMap1D> maps)
    : partition_(std::move(partition)), domains_(std::move(domains)), maps_(std::move(maps)) {
    const int n = static_cast<int>(maps_.size());
    if (static_cast<int>(domains_.size()) != n || partition_.cells() != n)
        throw Error("mismatched list lengths");
    for (const auto& d : domains_) {
        if (d.lo < -kPropPTol || d.hi > 1.0 + kPropPTol || !(d.lo < d.hi))
            throw DomainOutsideUnit("domain interval outside [0,1)");
    }
    // Each image u_i(X_i) must equal the i-th partition cell.  Because cells
    // are consecutive and exactly cover [0,1], matching endpoints gives both
    // the partition property (P) and disjointness for free; a map landing on
    // the wrong cell is reported as overlapping images.
    for (int i = 1; i <= n; ++i) {
        Interval img = maps_[i - 1].image(domains_[i - 1]);
        Interval cell = partition_.cell(i);
        double err = std::max(std::abs(img.lo - cell.lo), std::abs(img.hi - cell.hi));
        if (err > kPropPTol) {
            // distinguish: overlapping with another cell vs plain mismatch
            for (int j = 1; j <= n; ++j) {
                if (j == i) continue;
                Interval other = partition_.cell(j);
                if (img.lo < other.hi - kPropPTol && other.lo < img.hi - kPropPTol)
                    throw OverlappingImages("image of map " + std::to_string(i) +
                                            " overlaps cell " + std::to_string(j));
            }
            throw MismatchedImage("image of map " + std::to_string(i) +
                                  " does not match its partition cell (err=" + format_full(err) +
                                  ")");
        }
        if (maps_[i - 1].a == 0.0) throw Error("degenerate (constant) map");
    }
}

int LocalIFS1D::cell_of(double x) const {
    if (x >= 1.0) return size();
    const auto& k = partition_.knots;
    int i = static_cast<int>(std::upper_bound(k.begin(), k.end(), x) - k.begin());
    return std::clamp(i, 1, size());
}

double LocalIFS1D::max_lipschitz() const {
    double a = 0.0;
    for (const auto& m : maps_) a = std::max(a, m.lipschitz());
    return a;
}

std::string LocalIFS1D::to_json() const {
    nlohmann::json j;
    j["knots"] = partition_.knots;
    for (const auto& d : domains_) j["domains"].push_back({d.lo, d.hi});
    for (const auto& m : maps_) j["maps"].push_back({{"a", m.a}, {"b", m.b}});
    return j.dump();
}

LocalIFS1D LocalIFS1D::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Partition1D part(j.at("knots").get<std::vector<double>>());
    std::vector<Interval> domains;
    for (const auto& d : j.at("domains")) domains.push_back({d.at(0), d.at(1)});
    std::vector<AffineMap1D> maps;
    for (const auto& m : j.at("maps")) maps.push_back({m.at("a"), m.at("b")});
    return LocalIFS1D(std::move(part), std::move(domains), std::move(maps));
}

LocalIFS1D binary_ifs() {
    Partition1D part({0.0, 0.5, 1.0});
    std::vector<Interval> domains{{0.0, 1.0}, {0.0, 1.0}};
    std::vector<AffineMap1D> maps{{0.5, 0.0}, {0.5, 0.5}};
    return LocalIFS1D(std::move(part), std::move(domains), std::move(maps));
}

LocalIFS1D uniform_pair_ifs(int n) {
    if (n < 2 || n % 2 != 0) throw Error("uniform_pair_ifs requires even n >= 2");
    const double h = 2.0 / n;
    std::vector<double> knots(n + 1);
    for (int i = 0; i <= n; ++i) knots[i] = static_cast<double>(i) * (h / 2.0);
    knots[0] = 0.0;
    knots[n] = 1.0;
    std::vector<Interval> domains;
    std::vector<AffineMap1D> maps;
    for (int j = 1; j <= n / 2; ++j) {
        Interval dom{(j - 1) * h, j * h};
        // u_{2j-1}(x) = (x + (j-1)h)/2, u_{2j}(x) = (x + jh)/2
        domains.push_back(dom);
        maps.push_back({0.5, (j - 1) * h / 2.0});
        domains.push_back(dom);
        maps.push_back({0.5, j * h / 2.0});
    }
    return LocalIFS1D(Partition1D(std::move(knots)), std::move(domains), std::move(maps));
}

Interval address_point(const LocalIFS1D& ifs, const std::vector<int>& sigma) {
    if (sigma.empty()) throw Error("address_point: empty digit sequence");
    if (ifs.max_lipschitz() >= 1.0) throw NotContractive("address_point requires |a_i| < 1");
    Interval cur{0.0, 1.0};
    for (auto it = sigma.rbegin(); it != sigma.rend(); ++it) {
        int d = *it;
        if (d < 1 || d > ifs.size()) throw Error("digit out of range");
        cur = ifs.map(d).image(cur);
    }
    return cur;
}

// ---------------------------------------------------------------------------

PointSet2D::PointSet2D(std::vector<Point2> pts, double snap_pitch) : pitch_(snap_pitch) {
    for (const auto& p : pts) insert(p);
}

void PointSet2D::insert(const Point2& p) {
    long long kx = std::llround(p.x / pitch_);
    long long ky = std::llround(p.y / pitch_);
    auto key = std::make_pair(kx, ky);
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it != keys_.end() && *it == key) return;
    std::size_t idx = static_cast<std::size_t>(it - keys_.begin());
    keys_.insert(it, key);
    points_.insert(points_.begin() + idx, Point2{kx * pitch_, ky * pitch_});
}

PointSet2D PointSet2D::sample_box(const Rect& box, int n, double snap_pitch) {
    PointSet2D s(snap_pitch);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double fx = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            double fy = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
            s.insert({box.x_lo + fx * (box.x_hi - box.x_lo), box.y_lo + fy * (box.y_hi - box.y_lo)});
        }
    }
    return s;
}

std::string PointSet2D::to_csv() const {
    std::ostringstream os;
    os << "x,y\n";
    for (const auto& p : points_) os << format_full(p.x) << "," << format_full(p.y) << "\n";
    return os.str();
}

PointSet2D apply_set_operator(const std::vector<IFSMap2D>& maps, const PointSet2D& s) {
    PointSet2D out(s.pitch());
    for (const auto& im : maps)
        for (const auto& p : s.points())
            if (im.domain.contains(p)) out.insert(im.map(p));
    return out;
}

namespace {
double directed_hausdorff(const PointSet2D& a, const PointSet2D& b) {
    double worst = 0.0;
    for (const auto& p : a.points()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b.points()) {
            double dx = p.x - q.x, dy = p.y - q.y;
            double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                if (best <= worst) break;  // cannot raise the max
            }
        }
        if (best > worst) worst = best;
    }
    return std::sqrt(worst);
}
}  // namespace

double hausdorff_distance(const PointSet2D& a, const PointSet2D& b) {
    if (a.empty() || b.empty()) throw EmptySet("hausdorff_distance of empty set");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

AttractorEstimate iterate_attractor(const std::vector<IFSMap2D>& maps, const Rect& box,
                                    int start_samples, double snap_pitch, int max_iter) {
    PointSet2D cur = PointSet2D::sample_box(box, start_samples, snap_pitch);
    AttractorEstimate est{cur, 0, std::numeric_limits<double>::infinity()};
    for (int k = 0; k < max_iter; ++k) {
        PointSet2D next = apply_set_operator(maps, cur);
        est.iterations = k + 1;
        if (next.empty()) {
            est.set = next;
            est.last_step = 0.0;
            return est;  // empty set is itself a local attractor
        }
        double step = cur.empty() ? std::numeric_limits<double>::infinity()
                                  : hausdorff_distance(cur, next);
        cur = std::move(next);
        est.set = cur;
        est.last_step = step;
        if (step <= snap_pitch * 0.5) break;
    }
    return est;
}

CollageCheck verify_collage_bound(const PointSet2D& m, const std::vector<IFSMap2D>& ifs,
                                  double s, int iterations) {
    if (!(s >= 0.0 && s < 1.0)) throw NotContractive("collage bound requires s in [0,1)");
    CollageCheck out;
    out.epsilon = hausdorff_distance(m, apply_set_operator(ifs, m));
    out.bound = out.epsilon / (1.0 - s);
    PointSet2D cur = m;
    for (int k = 0; k < iterations; ++k) cur = apply_set_operator(ifs, cur);
    out.actual = hausdorff_distance(m, cur);
    out.holds = out.actual <= out.bound + 2.0 * m.pitch();
    return out;
}

}  // namespace lifs
