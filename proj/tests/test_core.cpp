#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lifs/expr.hpp"
#include "lifs/interp.hpp"
#include "lifs/local_ifs.hpp"
#include "lifs/rb.hpp"

using namespace lifs;

// ---------------------------------------------------------------------------
// local IFS construction and validation

TEST_CASE("binary IFS partitions the unit interval") {
    LocalIFS1D ifs = binary_ifs();
    CHECK(ifs.size() == 2);
    CHECK(ifs.image(1).lo == 0.0);
    CHECK(ifs.image(1).hi == 0.5);
    CHECK(ifs.image(2).hi == 1.0);
    CHECK(ifs.cell_of(0.25) == 1);
    CHECK(ifs.cell_of(0.5) == 2);
    CHECK(ifs.cell_of(1.0) == 2);  // last cell closed at 1
    CHECK(ifs.map(1)(0.5) == 0.25);
    CHECK(ifs.map(2).inverse(0.75) == 0.5);
}

TEST_CASE("uniform pair layout: shared domains, paired images") {
    const int n = 8;
    const double h = 2.0 / n;
    LocalIFS1D ifs = uniform_pair_ifs(n);
    for (int j = 1; j <= n / 2; ++j) {
        CHECK(ifs.domain(2 * j - 1).lo == doctest::Approx((j - 1) * h).epsilon(1e-15));
        CHECK(ifs.domain(2 * j).hi == doctest::Approx(j * h).epsilon(1e-15));
        // u_{2j-1} maps the left domain endpoint to the image cell start
        CHECK(ifs.map(2 * j - 1)((j - 1) * h) == doctest::Approx((2 * j - 2) * h / 2));
        CHECK(ifs.map(2 * j)((j - 1) * h) == doctest::Approx((2 * j - 1) * h / 2));
    }
    // images tile [0,1]: consecutive cells share endpoints
    for (int i = 1; i < n; ++i) CHECK(ifs.image(i).hi == doctest::Approx(ifs.image(i + 1).lo));
}

TEST_CASE("property violations are rejected") {
    // image of map 1 overlaps cell 2
    CHECK_THROWS_AS(LocalIFS1D(Partition1D({0.0, 0.5, 1.0}),
                               {{0.0, 1.0}, {0.0, 1.0}},
                               {{0.7, 0.0}, {0.5, 0.5}}),
                    OverlappingImages);
    // image does not reach its cell
    CHECK_THROWS_AS(LocalIFS1D(Partition1D({0.0, 0.5, 1.0}),
                               {{0.0, 0.5}, {0.0, 1.0}},
                               {{0.5, 0.0}, {0.5, 0.5}}),
                    Error);
    // domain outside [0,1]
    CHECK_THROWS_AS(LocalIFS1D(Partition1D({0.0, 0.5, 1.0}),
                               {{-0.5, 0.5}, {0.0, 1.0}},
                               {{0.5, 0.25}, {0.5, 0.5}}),
                    DomainOutsideUnit);
    CHECK_THROWS_AS(Partition1D({0.0, 0.6, 0.4, 1.0}), Error);
    CHECK_THROWS_AS(uniform_pair_ifs(5), Error);
}

TEST_CASE("IFS JSON round trip") {
    LocalIFS1D ifs = uniform_pair_ifs(6);
    LocalIFS1D back = LocalIFS1D::from_json(ifs.to_json());
    CHECK(back.size() == ifs.size());
    for (int i = 1; i <= ifs.size(); ++i) {
        CHECK(back.map(i).a == ifs.map(i).a);
        CHECK(back.map(i).b == ifs.map(i).b);
        CHECK(back.domain(i).lo == ifs.domain(i).lo);
    }
}

TEST_CASE("address points shrink geometrically and need contractivity") {
    LocalIFS1D ifs = binary_ifs();
    // u_2(u_1([0,1])) = u_2([0, 1/2]) = [1/2, 3/4]
    Interval iv = address_point(ifs, {2, 1});
    CHECK(iv.lo == doctest::Approx(0.5));
    CHECK(iv.hi == doctest::Approx(0.75));
    CHECK(address_point(ifs, std::vector<int>(20, 1)).length() ==
          doctest::Approx(std::pow(0.5, 20)));
    // expanding map on a half-size domain still satisfies the partition
    // property but has no address points
    LocalIFS1D expanding(Partition1D({0.0, 1.0}), {{0.0, 0.5}}, {{2.0, 0.0}});
    CHECK_THROWS_AS(address_point(expanding, {1}), NotContractive);
}

// ---------------------------------------------------------------------------
// 2D point sets

TEST_CASE("point sets deduplicate on the snap grid") {
    PointSet2D s(0.01);
    s.insert({0.1001, 0.2});
    s.insert({0.1002, 0.2});  // same snapped cell
    s.insert({0.3, 0.4});
    CHECK(s.size() == 2);
}

TEST_CASE("Hausdorff distance against hand-computed values") {
    PointSet2D a(1e-9), b(1e-9);
    a.insert({0, 0});
    b.insert({3, 4});
    CHECK(hausdorff_distance(a, b) == doctest::Approx(5.0));
    a.insert({3, 4});
    // directed a->b sup is 0 now from (3,4), 5 from (0,0); b->a is 0
    CHECK(hausdorff_distance(a, b) == doctest::Approx(5.0));
    b.insert({0, 1});
    // nearest to (0,1) in a is (0,0): distance 1; a->b: (0,0)->(0,1)=1
    CHECK(hausdorff_distance(a, b) == doctest::Approx(1.0));
    PointSet2D empty(1e-9);
    CHECK_THROWS_AS(hausdorff_distance(a, empty), EmptySet);
}

TEST_CASE("set operator drops points outside every domain") {
    std::vector<IFSMap2D> maps = {{Rect{0, 0.5, 0, 0.5}, AffineMap2D{0.5, 0, 0, 0.5, 0, 0}}};
    PointSet2D s(1e-6);
    s.insert({0.25, 0.25});
    s.insert({0.9, 0.9});
    PointSet2D out = apply_set_operator(maps, s);
    CHECK(out.size() == 1);
    CHECK(out.points()[0].x == doctest::Approx(0.125));
}

TEST_CASE("two-map example: local vs global attractor") {
    // f_1 = (x/2, y/2) on [0,0.8]^2; f_2 = (x/2+0.2, y/2+0.2) on [0.4,1]^2
    std::vector<IFSMap2D> local_maps = {
        {Rect{0.0, 0.8, 0.0, 0.8}, AffineMap2D{0.5, 0, 0, 0.5, 0.0, 0.0}},
        {Rect{0.4, 1.0, 0.4, 1.0}, AffineMap2D{0.5, 0, 0, 0.5, 0.2, 0.2}}};
    std::vector<IFSMap2D> global_maps = {
        {Rect{0.0, 1.0, 0.0, 1.0}, AffineMap2D{0.5, 0, 0, 0.5, 0.0, 0.0}},
        {Rect{0.0, 1.0, 0.0, 1.0}, AffineMap2D{0.5, 0, 0, 0.5, 0.2, 0.2}}};
    const double pitch = 1.0 / 512;
    auto local_est = iterate_attractor(local_maps, {0, 1, 0, 1}, 48, pitch);
    auto global_est = iterate_attractor(global_maps, {0, 1, 0, 1}, 48, pitch);

    // the local attractor contains the fixed points (0,0) and (0.4,0.4)
    // plus, by invariance, the f_1-orbit of (0.4,0.4): (0.4,0.4) lies in
    // X_1, so every halving of it belongs to A_loc as well
    PointSet2D orbit(pitch);
    orbit.insert({0.0, 0.0});
    for (double v = 0.4; v > pitch / 2; v /= 2.0) orbit.insert({v, v});
    CHECK(hausdorff_distance(local_est.set, orbit) <= 2 * pitch);

    // and the estimate really is invariant under the local operator
    PointSet2D once = apply_set_operator(local_maps, local_est.set);
    CHECK(hausdorff_distance(once, local_est.set) <= 2 * pitch);

    PointSet2D segment(pitch);
    for (int k = 0; k <= 4096; ++k) segment.insert({0.4 * k / 4096, 0.4 * k / 4096});
    CHECK(hausdorff_distance(global_est.set, segment) <= 2 * pitch);

    // local attractor contained in the global one
    PointSet2D merged = global_est.set;
    for (const auto& p : local_est.set.points()) merged.insert(p);
    CHECK(hausdorff_distance(merged, global_est.set) <= 2 * pitch);
}

TEST_CASE("collage bound on a Sierpinski-style triangle") {
    std::vector<IFSMap2D> maps = {
        {Rect{0, 1, 0, 1}, AffineMap2D{0.5, 0, 0, 0.5, 0.0, 0.0}},
        {Rect{0, 1, 0, 1}, AffineMap2D{0.5, 0, 0, 0.5, 0.5, 0.0}},
        {Rect{0, 1, 0, 1}, AffineMap2D{0.5, 0, 0, 0.5, 0.25, 0.5}}};
    const double pitch = 1.0 / 256;
    // collage template: a filled triangle sample
    PointSet2D m(pitch);
    int n = 64;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j)
            m.insert({double(i) / n + 0.5 * double(j) / n, double(j) / n});
    CollageCheck chk = verify_collage_bound(m, maps, 0.5, 24);
    CHECK(chk.holds);
    CHECK(chk.bound == doctest::Approx(chk.epsilon * 2.0));
}

// ---------------------------------------------------------------------------
// sampled functions and grids

TEST_CASE("sampled functions evaluate and round-trip") {
    auto c = SampledFunction::constant(3.5);
    CHECK(c(0.7) == 3.5);
    auto a = SampledFunction::affine(1.0, -2.0);
    CHECK(a(0.25) == doctest::Approx(0.5));
    CHECK(a.sup_abs() == doctest::Approx(1.0));  // max(|1|, |-1|) on [0,1]
    auto t = SampledFunction::table({0.0, 0.5, 1.0}, {1.0, -1.0, 0.5});
    CHECK(t(0.5) == -1.0);  // sample points are exact
    CHECK(t(0.25) == doctest::Approx(0.0));
    CHECK(t.sup_abs() == 1.0);
    for (const auto& f : {c, a, t}) {
        SampledFunction back = SampledFunction::from_json(f.to_json());
        for (double x : {0.0, 0.3, 0.75, 1.0}) CHECK(back(x) == doctest::Approx(f(x)));
    }
    CHECK_THROWS_AS(SampledFunction::table({0.5, 0.0}, {1.0, 2.0}), Error);
}

TEST_CASE("uniform dyadic grids are admissible; odd grids get closed") {
    LocalIFS1D ifs = uniform_pair_ifs(8);
    Grid g = make_admissible_grid(ifs, 64);
    CHECK(g.size() == 64);
    CHECK(g.is_admissible(ifs));
    Grid g2 = make_admissible_grid(binary_ifs(), 256);
    CHECK(g2.is_admissible(binary_ifs()));
    // non-admissible seed grid for the binary IFS: closure must stay admissible
    Grid g3 = make_admissible_grid(binary_ifs(), 3);
    CHECK(g3.is_admissible(binary_ifs()));
    CHECK(g3.size() >= 3);
}

TEST_CASE("closure that never stabilizes exhausts its budget") {
    // transcendental interior knot: the inverse orbits of the dyadic seed
    // keep producing new points, so the closure cannot terminate within any
    // finite budget.  (1/sqrt(2) would NOT work: dyadics times powers of
    // sqrt(2) land on the knot exactly and the closure stabilizes.)
    const double c = std::exp(-1.0);
    Partition1D part({0.0, c, 1.0});
    std::vector<Interval> domains = {{0.0, 1.0}, {0.0, 1.0}};
    std::vector<AffineMap1D> maps = {{c, 0.0}, {1.0 - c, c}};
    LocalIFS1D ifs(part, domains, maps);
    CHECK_THROWS_AS(make_admissible_grid(ifs, 8, 10), NotAdmissible);
}

TEST_CASE("inadmissible grid is rejected at assembly") {
    Grid bad{{0.0, 0.3, 0.7}};
    RBSpec spec = build_random_spec(2, 5, 0.8);
    CHECK_THROWS_AS(DiscreteRB(spec, bad), GridNotAdmissible);
}

// ---------------------------------------------------------------------------
// discrete RB operator

namespace {

// Pointwise evaluation of the exact restriction: for each grid point x find
// its image cell i and compute lambda_i(u_i^{-1} x) + S_i(u_i^{-1} x) f(u_i^{-1} x)
// straight from the spec, independent of the assembled index arrays.
std::vector<double> rb_pointwise(const RBSpec& spec, const Grid& g,
                                 const std::vector<double>& f) {
    std::vector<double> out(g.points.size());
    for (std::size_t k = 0; k < g.points.size(); ++k) {
        double x = g.points[k];
        int i = spec.ifs.cell_of(x);
        double y = spec.ifs.map(i).inverse(x);
        int ky = g.index_of(y);
        REQUIRE(ky >= 0);
        out[k] = spec.lambdas[i - 1](y) + spec.scalings[i - 1](y) * f[ky];
    }
    return out;
}

}  // namespace

TEST_CASE("assembled operator equals pointwise evaluation") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (int n : {2, 4, 8}) {
            RBSpec spec = build_random_spec(n, seed, 0.9);
            Grid g = make_admissible_grid(spec.ifs, 64);
            DiscreteRB rb(spec, g);
            Rng rng(seed + 100);
            GridFunction f{g, {}};
            f.values.resize(g.size());
            for (auto& v : f.values) v = rng.uniform(-2.0, 2.0);
            std::vector<double> expect = rb_pointwise(spec, g, f.values);
            GridFunction got = rb.apply(f);
            GridFunction got_factored = rb.apply_factored(f);
            for (int k = 0; k < g.size(); ++k) {
                CHECK(got.values[k] == doctest::Approx(expect[k]).epsilon(1e-14));
                CHECK(got_factored.values[k] == got.values[k]);
            }
        }
    }
}

TEST_CASE("dense matrix has one scaling entry per row") {
    RBSpec spec = build_random_spec(4, 9, 0.7);
    Grid g = make_admissible_grid(spec.ifs, 32);
    DiscreteRB rb(spec, g);
    auto m = rb.dense_matrix();
    for (int k = 0; k < rb.size(); ++k) {
        int nonzeros = 0;
        for (int j = 0; j < rb.size(); ++j)
            if (m[k][j] != 0.0) ++nonzeros;
        CHECK(nonzeros <= 1);
        CHECK(m[k][rb.source_index()[k]] == rb.scaling_diag()[k]);
    }
}

TEST_CASE("fixed-point solve matches the dense direct solve") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
        RBSpec spec = build_random_spec(8, seed, 0.9);
        Grid g = make_admissible_grid(spec.ifs, 128);
        DiscreteRB rb(spec, g);
        GridFunction zero{g, std::vector<double>(g.size(), 0.0)};
        SolveResult it = solve_fixed_point(rb, zero);
        GridFunction direct = solve_direct(rb);
        CHECK(it.converged);
        for (int k = 0; k < g.size(); ++k)
            CHECK(it.f.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-11));
        // plain Picard iteration reaches the same limit, just more slowly
        SolveOptions plain;
        plain.resolve_cycles = false;
        plain.tol = 1e-13;
        SolveResult picard = solve_fixed_point(rb, zero, plain);
        CHECK(picard.converged);
        CHECK(picard.iters >= it.iters);
        for (int k = 0; k < g.size(); ++k)
            CHECK(picard.f.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-10));
    }
}

TEST_CASE("interpolating specs terminate in O(log2 N_g) iterations") {
    RealFn target = [](double x) { return std::sin(3.0 * x) + 0.2 * x; };
    for (int ng : {64, 256, 1024}) {
        InterpolationProblem p;
        p.target = target;
        p.n_domains = 8;
        p.s_odd.assign(4, 0.4);
        p.s_even.assign(4, -0.3);
        RBSpec spec = build_endpoint_interpolant(p);
        Grid g = make_admissible_grid(spec.ifs, ng);
        DiscreteRB rb(spec, g);
        GridFunction zero{g, std::vector<double>(g.size(), 0.0)};
        SolveResult r = solve_fixed_point(rb, zero);
        CHECK(r.converged);
        CHECK(r.iters <= int(std::log2(double(ng))) + 4);
        CHECK(r.residual <= 1e-12);
    }
}

TEST_CASE("contractivity condition for p = infinity and finite p") {
    LocalIFS1D ifs = uniform_pair_ifs(4);
    std::vector<SampledFunction> lambdas, scalings;
    std::vector<double> s = {0.5, -0.7, 0.2, 0.6};
    for (int i = 1; i <= 4; ++i) {
        lambdas.push_back(SampledFunction::constant(1.0, ifs.domain(i)));
        scalings.push_back(SampledFunction::constant(s[i - 1], ifs.domain(i)));
    }
    RBSpec spec(ifs, lambdas, scalings);
    auto inf = check_contractivity(spec, kPInfinity);
    CHECK(inf.value == doctest::Approx(0.7));
    CHECK(inf.contractive);
    // p = 2: (sum a_i s_i^2)^{1/2} with a_i = 1/2
    double expect = std::sqrt(0.5 * (0.25 + 0.49 + 0.04 + 0.36));
    auto p2 = check_contractivity(spec, 2.0);
    CHECK(p2.value == doctest::Approx(expect).epsilon(1e-14));
    CHECK_THROWS_AS(check_contractivity(spec, 0.5), InvalidP);
}

TEST_CASE("non-contractive spec is flagged, Banach bound honored otherwise") {
    // |S| = 1.2 > 1: solver flags it and fails to converge
    LocalIFS1D ifs = binary_ifs();
    std::vector<SampledFunction> lambdas = {SampledFunction::constant(0.3),
                                            SampledFunction::constant(-0.1)};
    std::vector<SampledFunction> bad_s = {SampledFunction::constant(1.2),
                                          SampledFunction::constant(1.2)};
    RBSpec bad(ifs, lambdas, bad_s);
    CHECK_FALSE(check_contractivity(bad, kPInfinity).contractive);
    DiscreteRB rb_bad(bad, make_admissible_grid(ifs, 64));
    GridFunction zero{rb_bad.grid(), std::vector<double>(rb_bad.size(), 0.0)};
    SolveOptions opt;
    opt.resolve_cycles = false;
    opt.max_iter = 200;
    SolveResult r = solve_fixed_point(rb_bad, zero, opt);
    CHECK(r.contraction_warning);
    CHECK_FALSE(r.converged);

    // contractive case: ||f_k - f*|| <= s^k ||f_0 - f*||
    RBSpec good = build_random_spec(4, 21, 0.8);
    Grid g = make_admissible_grid(good.ifs, 64);
    DiscreteRB rb(good, g);
    GridFunction direct = solve_direct(rb);
    double s = rb.max_abs_scaling();
    GridFunction f{g, std::vector<double>(g.size(), 0.0)};
    double e0 = 0.0;
    for (int k = 0; k < g.size(); ++k) e0 = std::max(e0, std::abs(direct.values[k]));
    for (int k = 1; k <= 30; ++k) {
        f = rb.apply(f);
        double err = 0.0;
        for (int j = 0; j < g.size(); ++j)
            err = std::max(err, std::abs(f.values[j] - direct.values[j]));
        CHECK(err <= std::pow(s, k) * e0 + 1e-12);
    }
}

TEST_CASE("fixed point depends linearly on lambda") {
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        int n = 4;
        LocalIFS1D ifs = uniform_pair_ifs(n);
        std::vector<SampledFunction> scalings;
        std::vector<SampledFunction> la, mu, combo;
        double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
        for (int i = 1; i <= n; ++i) {
            Interval dom = ifs.domain(i);
            scalings.push_back(SampledFunction::constant(rng.uniform(-0.9, 0.9), dom));
            double lv = rng.uniform(-1.0, 1.0), mv = rng.uniform(-1.0, 1.0);
            la.push_back(SampledFunction::constant(lv, dom));
            mu.push_back(SampledFunction::constant(mv, dom));
            combo.push_back(SampledFunction::constant(alpha * lv + beta * mv, dom));
        }
        Grid g = make_admissible_grid(ifs, 64);
        GridFunction fl = solve_direct(DiscreteRB(RBSpec(ifs, la, scalings), g));
        GridFunction fm = solve_direct(DiscreteRB(RBSpec(ifs, mu, scalings), g));
        GridFunction fc = solve_direct(DiscreteRB(RBSpec(ifs, combo, scalings), g));
        for (int k = 0; k < g.size(); ++k)
            CHECK(std::abs(fc.values[k] - alpha * fl.values[k] - beta * fm.values[k]) <= 1e-9);
    }
}

TEST_CASE("graph invariance of the solved fixed point") {
    RBSpec spec = build_random_spec(8, 31, 0.85);
    Grid g = make_admissible_grid(spec.ifs, 256);
    DiscreteRB rb(spec, g);
    GridFunction zero{g, std::vector<double>(g.size(), 0.0)};
    GridFunction f = solve_fixed_point(rb, zero).f;
    // f*(u_i(x)) = lambda_i(x) + S_i(x) f*(x) for all grid x in X_i
    double worst = 0.0;
    for (int i = 1; i <= spec.ifs.size(); ++i) {
        for (int k = 0; k < g.size(); ++k) {
            double x = g.points[k];
            if (!spec.ifs.in_domain(i, x)) continue;
            double ux = spec.ifs.map(i)(x);
            int kx = g.index_of(ux);
            if (kx < 0) continue;
            worst = std::max(worst, std::abs(f.values[kx] - (spec.lambdas[i - 1](x) +
                                                             spec.scalings[i - 1](x) *
                                                                 f.values[k])));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("block structure detection") {
    RBSpec spec = build_random_spec(8, 41, 0.9);
    Grid g = make_admissible_grid(spec.ifs, 64);
    DiscreteRB rb(spec, g);
    auto blocks = detect_local_refinement(rb);
    REQUIRE(blocks.has_value());
    REQUIRE(blocks->size() == 4);
    for (int j = 0; j < 4; ++j) {
        CHECK((*blocks)[j] == std::vector<int>{2 * j + 1, 2 * j + 2});
    }
    // global two-map system: one block
    RBSpec spec2 = build_random_spec(2, 42, 0.9);
    DiscreteRB rb2(spec2, make_admissible_grid(spec2.ifs, 64));
    auto blocks2 = detect_local_refinement(rb2);
    REQUIRE(blocks2.has_value());
    CHECK(blocks2->size() == 1);
    CHECK((*blocks2)[0] == std::vector<int>{1, 2});
}

TEST_CASE("RBSpec JSON round trip preserves the solved fixed point") {
    RBSpec spec = build_random_spec(4, 55, 0.8);
    RBSpec back = RBSpec::from_json(spec.to_json());
    Grid g = make_admissible_grid(spec.ifs, 64);
    GridFunction f1 = solve_direct(DiscreteRB(spec, g));
    GridFunction f2 = solve_direct(DiscreteRB(back, g));
    for (int k = 0; k < g.size(); ++k) CHECK(f1.values[k] == doctest::Approx(f2.values[k]));
}

// ---------------------------------------------------------------------------
// expression parser

TEST_CASE("expression grammar") {
    auto f = parse_expression("exp(4*x)");
    for (double x : {0.0, 0.3, 1.0}) CHECK(f(x) == doctest::Approx(std::exp(4 * x)));
    auto g = parse_expression("pow(x*(1-x),0.2)");
    CHECK(g(0.3) == doctest::Approx(std::pow(0.3 * 0.7, 0.2)));
    CHECK(parse_expression("2+3*4^0.5")(0.0) == doctest::Approx(8.0));
    CHECK(parse_expression("-x^2")(3.0) == doctest::Approx(-9.0));
    CHECK(parse_expression("sin(x)+cos(x)")(0.7) ==
          doctest::Approx(std::sin(0.7) + std::cos(0.7)));
    CHECK(parse_expression("sqrt(x)/2")(4.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_expression("foo(x)"), Error);
    CHECK_THROWS_AS(parse_expression("1+"), Error);
    CHECK_THROWS_AS(parse_expression("(x"), Error);
}
