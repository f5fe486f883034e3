#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lifs/rb.hpp"

namespace lifs {

/// Rule map (x, y) -> real.
using RuleFn = std::function<double(double, double)>;

/// Values on the dyadic mesh N_k = 2^{-k} {0, ..., 2^k - 1}.
struct RefinementLevel {
    int k = 0;
    std::vector<double> values;  // values[j] at j / 2^k

    int size() const { return static_cast<int>(values.size()); }
    double mesh_point(int j) const;

    std::string to_csv() const;  // level,x,value
};

RefinementLevel make_level0(double value_at_0);

/// One binary refinement step: the new value at xi reads the old value at
/// 2 xi (left half, through v1) or 2 xi - 1 (right half, through v2).
/// On the half-open meshes used here 2 xi = 1 never occurs, so the rule is
/// well defined without any boundary condition.  With check_boundary the
/// identity v1(1, y) = v2(0, y) is probed on 16 y values (it forces the
/// limit function to be continuous at 1/2; affine schemes for
/// discontinuous fractal functions do not satisfy it and are still valid).
RefinementLevel refine(const RefinementLevel& level, const RuleFn& v1, const RuleFn& v2,
                       bool check_boundary = false);

/// Iterated refinement from a level-0 seed.
GridFunction subdivision_limit(const RuleFn& v1, const RuleFn& v2, const RefinementLevel& seed,
                               int levels, bool check_boundary = false);

/// Affine rule v_i(x, y) = lambda_i(x) + S_i(x) y read off a two-map spec.
RuleFn affine_rule(const SampledFunction& lambda, const SampledFunction& scaling);

}  // namespace lifs
