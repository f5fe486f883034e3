#include "lifs/interp.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace lifs {

RBSpec build_random_spec(int n, std::uint64_t seed, double s_bound) {
    if (!(s_bound < 1.0)) throw ContractivityViolated("s_bound must be < 1");
    LocalIFS1D ifs = uniform_pair_ifs(n);
    Rng rng(seed);
    std::vector<SampledFunction> lambdas, scalings;
    for (int i = 1; i <= n; ++i) {
        Interval dom = ifs.domain(i);
        lambdas.push_back(SampledFunction::constant(rng.uniform(-1.0, 1.0), dom));
        scalings.push_back(SampledFunction::constant(rng.uniform(-s_bound, s_bound), dom));
    }
    return RBSpec(std::move(ifs), std::move(lambdas), std::move(scalings));
}

RBSpec build_endpoint_interpolant(const InterpolationProblem& p) {
    const int n = p.n_domains;
    if (n < 2 || n % 2 != 0) throw Error("n_domains must be even and >= 2");
    if (static_cast<int>(p.s_odd.size()) != n / 2) throw Error("s_odd needs N/2 entries");
    const double h = 2.0 / n;
    LocalIFS1D ifs = uniform_pair_ifs(n);
    std::vector<SampledFunction> lambdas, scalings;
    for (int j = 1; j <= n / 2; ++j) {
        double s_odd = p.s_odd[j - 1];
        double s_even;
        if (p.mode == InterpMode::EndpointContinuous) {
            s_even = 1.0 - s_odd;
        } else {
            if (static_cast<int>(p.s_even.size()) != n / 2)
                throw Error("endpoint mode needs s_even entries");
            s_even = p.s_even[j - 1];
        }
        if (std::abs(s_odd) >= 1.0 || std::abs(s_even) >= 1.0)
            throw ContractivityViolated("|S_i| must be < 1");
        Interval dom = ifs.domain(2 * j - 1);
        double f_lo = p.target((j - 1) * h);
        double f_hi = p.target(j * h);
        lambdas.push_back(SampledFunction::constant((1.0 - s_odd) * f_lo, dom));
        scalings.push_back(SampledFunction::constant(s_odd, dom));
        lambdas.push_back(SampledFunction::constant((1.0 - s_even) * f_hi, dom));
        scalings.push_back(SampledFunction::constant(s_even, dom));
    }
    return RBSpec(std::move(ifs), std::move(lambdas), std::move(scalings));
}

RBSpec build_hermite_interpolant(const RealFn& target, const RealFn& dtarget, int n_domains) {
    const int n = n_domains;
    if (n < 2 || n % 2 != 0) throw Error("n_domains must be even and >= 2");
    const double h = 2.0 / n;
    const double s = 0.25;
    LocalIFS1D ifs = uniform_pair_ifs(n);
    std::vector<SampledFunction> lambdas, scalings;
    // The fixed-point relation f(u_i(x)) = lambda_i(x) + S f(x) and its
    // x-derivative (1/2) f'(u_i(x)) = beta_i + S f'(x), written at the knot
    // each u_i fixes, give a diagonal 2x2 system per map:
    //   (1 - S)   y* = alpha_i + beta_i x*
    //   (1/2 - S) d* = beta_i
    // Singular only at S = 1 or S = 1/2; S = 1/4 is the smoothness choice.
    if (std::abs(1.0 - s) < 1e-14 || std::abs(0.5 - s) < 1e-14)
        throw SingularConditions("Hermite conditions singular at this S");
    for (int j = 1; j <= n / 2; ++j) {
        Interval dom = ifs.domain(2 * j - 1);
        for (int parity = 0; parity < 2; ++parity) {
            double knot = (parity == 0 ? (j - 1) : j) * h;
            double beta = (0.5 - s) * dtarget(knot);
            double alpha = (1.0 - s) * target(knot) - beta * knot;
            lambdas.push_back(SampledFunction::affine(alpha, beta, dom));
            scalings.push_back(SampledFunction::constant(s, dom));
        }
    }
    return RBSpec(std::move(ifs), std::move(lambdas), std::move(scalings));
}

double estimate_order(const std::function<double(double)>& error_at_h,
                      const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw Error("estimate_order needs >= 3 mesh widths");
    std::vector<double> lx, ly;
    for (double h : h_list) {
        double e = error_at_h(h);
        if (e <= 0.0 || e < 1e-14) throw DegenerateFit("target reproduced exactly");
        lx.push_back(std::log(h));
        ly.push_back(std::log(e));
    }
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sx += lx[k];
        sy += ly[k];
        sxx += lx[k] * lx[k];
        sxy += lx[k] * ly[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::optional<SelfRefBasis> check_self_referential_basis(const std::vector<RealFn>& psi,
                                                         const LocalIFS1D& ifs,
                                                         int probe_points) {
    const int d = static_cast<int>(psi.size());
    if (d == 0 || d > 10) throw Error("basis size must be in 1..10");
    SelfRefBasis out;
    out.a.resize(ifs.size());
    out.b.resize(ifs.size());
    double worst = 0.0;
    for (int i = 1; i <= ifs.size(); ++i) {
        Interval dom = ifs.domain(i);
        // probe strictly inside the domain
        Eigen::MatrixXd design(probe_points, d + 1);
        Eigen::MatrixXd rhs(probe_points, d);
        for (int r = 0; r < probe_points; ++r) {
            double x = dom.lo + (r + 0.5) / probe_points * (dom.hi - dom.lo);
            design(r, 0) = 1.0;
            for (int c = 0; c < d; ++c) design(r, c + 1) = psi[c](x);
            double ux = ifs.map(i)(x);
            for (int c = 0; c < d; ++c) rhs(r, c) = psi[c](ux);
        }
        Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(rhs);  // (d+1) x d
        worst = std::max(worst, (design * sol - rhs).cwiseAbs().maxCoeff());
        out.b[i - 1].resize(d);
        out.a[i - 1].assign(d, std::vector<double>(d));
        for (int c = 0; c < d; ++c) {
            out.b[i - 1][c] = sol(0, c);
            for (int k = 0; k < d; ++k) out.a[i - 1][c][k] = sol(k + 1, c);
        }
    }
    out.residual = worst;
    if (worst > 1e-8) return std::nullopt;
    return out;
}

double max_error_on_fine_grid(const RBSpec& spec, const RealFn& target, int n_g, int refine) {
    Grid g = make_admissible_grid(spec.ifs, n_g * refine);
    DiscreteRB rb(spec, g);
    GridFunction zero{g, std::vector<double>(g.size(), 0.0)};
    SolveResult res = solve_fixed_point(rb, zero);
    double worst = 0.0;
    for (int k = 0; k < g.size(); ++k)
        worst = std::max(worst, std::abs(res.f.values[k] - target(g.points[k])));
    return worst;
}

}  // namespace lifs
