#include "lifs/subdiv.hpp"

#include <cmath>
#include <sstream>

namespace lifs {

double RefinementLevel::mesh_point(int j) const { return std::ldexp(static_cast<double>(j), -k); }

std::string RefinementLevel::to_csv() const {
    std::ostringstream os;
    os << "level,x,value\n";
    for (int j = 0; j < size(); ++j)
        os << k << "," << format_full(mesh_point(j)) << "," << format_full(values[j]) << "\n";
    return os.str();
}

RefinementLevel make_level0(double value_at_0) {
    RefinementLevel l;
    l.k = 0;
    l.values = {value_at_0};
    return l;
}

namespace {
void probe_compatibility(const RuleFn& v1, const RuleFn& v2) {
    // v1(1, y) = v2(0, y) for all y; probed on 16 values
    for (int t = 0; t < 16; ++t) {
        double y = -3.0 + 0.4 * t;
        double a = v1(1.0, y);
        double b = v2(0.0, y);
        double scale = std::max({1.0, std::abs(a), std::abs(b)});
        if (std::abs(a - b) > 1e-9 * scale)
            throw IncompatibleBoundary("v1(1,y) != v2(0,y) at y = " + format_full(y));
    }
}
}  // namespace

RefinementLevel refine(const RefinementLevel& level, const RuleFn& v1, const RuleFn& v2,
                       bool check_boundary) {
    if (check_boundary) probe_compatibility(v1, v2);
    const int n = level.size();
    RefinementLevel next;
    next.k = level.k + 1;
    next.values.resize(2 * n);
    // xi = j / 2^{k+1}: left half reads the old value at 2 xi, right half at
    // 2 xi - 1; both land on N_k (2 xi = 1 never occurs for xi < 1/2)
    for (int j = 0; j < n; ++j) {
        double x = level.mesh_point(j);
        next.values[j] = v1(x, level.values[j]);
        next.values[n + j] = v2(x, level.values[j]);
    }
    return next;
}

GridFunction subdivision_limit(const RuleFn& v1, const RuleFn& v2, const RefinementLevel& seed,
                               int levels, bool check_boundary) {
    if (levels < 0) throw Error("levels must be nonnegative");
    RefinementLevel cur = seed;
    for (int l = 0; l < levels; ++l) cur = refine(cur, v1, v2, check_boundary);
    std::vector<double> pts(cur.size());
    for (int j = 0; j < cur.size(); ++j) pts[j] = cur.mesh_point(j);
    return GridFunction{Grid{std::move(pts)}, std::move(cur.values)};
}

RuleFn affine_rule(const SampledFunction& lambda, const SampledFunction& scaling) {
    return [lambda, scaling](double x, double y) { return lambda(x) + scaling(x) * y; };
}

}  // namespace lifs
