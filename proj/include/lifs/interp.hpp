#pragma once

#include <functional>
#include <optional>

#include "lifs/rb.hpp"

namespace lifs {

using RealFn = std::function<double(double)>;

enum class InterpMode { Endpoint, EndpointContinuous, Hermite };

struct InterpolationProblem {
    RealFn target;
    int n_domains = 8;              // even N
    std::vector<double> s_odd;      // S_1, S_3, ..., S_{N-1}
    InterpMode mode = InterpMode::Endpoint;
    /// Even-index scalings for plain endpoint mode; continuous mode forces
    /// S_{2j} = 1 - S_{2j-1}.
    std::vector<double> s_even;
};

/// Uniform-pair spec with constant lambda_i ~ U(-1,1), S_i ~ U(-s_bound, s_bound).
RBSpec build_random_spec(int n, std::uint64_t seed, double s_bound);

/// Endpoint-interpolating spec: lambda_{2j-1} = (1 - S_{2j-1}) f((j-1)h),
/// lambda_{2j} = (1 - S_{2j}) f(jh).
RBSpec build_endpoint_interpolant(const InterpolationProblem& p);

/// Hermite construction: all S_i = 1/4, affine lambda_i fixed by the value
/// and slope of the target at each map's boundary knot.
RBSpec build_hermite_interpolant(const RealFn& target, const RealFn& dtarget, int n_domains);

/// Least-squares slope of log(max error) against log(h).
/// spec_builder(h) must return the max interpolation error at mesh width h.
double estimate_order(const std::function<double(double)>& error_at_h,
                      const std::vector<double>& h_list);

struct SelfRefBasis {
    // psi o u_i = b_i + A_i psi, one (A, b) pair per map, row-major A.
    std::vector<std::vector<std::vector<double>>> a;
    std::vector<std::vector<double>> b;
    double residual = 0.0;
};

/// Least-squares solve for the self-referential relation of a function
/// family; absent when the residual exceeds 1e-8.
std::optional<SelfRefBasis> check_self_referential_basis(const std::vector<RealFn>& psi,
                                                         const LocalIFS1D& ifs,
                                                         int probe_points = 64);

/// Max |f*(x) - target(x)| over an admissible evaluation grid `refine` times
/// finer than n_g, with f* the solved fixed point of the spec.
double max_error_on_fine_grid(const RBSpec& spec, const RealFn& target, int n_g, int refine = 16);

}  // namespace lifs
