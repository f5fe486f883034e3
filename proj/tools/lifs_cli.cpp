// Command-line front end: every experiment emits CSV/JSON artifacts plus a
// manifest recording the exact configuration, so reruns are byte-identical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "lifs/collage.hpp"
#include "lifs/expr.hpp"
#include "lifs/interp.hpp"
#include "lifs/local_ifs.hpp"
#include "lifs/polyjet.hpp"
#include "lifs/qtt.hpp"
#include "lifs/rb.hpp"
#include "lifs/srgrid.hpp"
#include "lifs/subdiv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
    int grid = 256;
    std::uint64_t seed = 1;
    double tol = 1e-12;
    int max_iter = 10000;
    std::string out = ".";
    int threads = 0;  // 0 = all cores
    std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--grid", c.grid, "grid size N_g");
    app->add_option("--seed", c.seed, "RNG seed");
    app->add_option("--tol", c.tol, "solver tolerance");
    app->add_option("--max-iter", c.max_iter, "iteration cap");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    app->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw lifs::Error("cannot open " + p.string() + " for writing");
    f << text;
}

std::string grid_function_text(const lifs::GridFunction& g, const std::string& format) {
    if (format == "csv") return g.to_csv();
    json j;
    j["x"] = json::array();
    j["value"] = json::array();
    for (int k = 0; k < g.grid.size(); ++k) {
        j["x"].push_back(g.grid.points[k]);
        j["value"].push_back(g.values[k]);
    }
    return j.dump(2) + "\n";
}

void write_manifest(const Common& c, const std::string& command,
                    const std::map<std::string, std::string>& params,
                    const std::map<std::string, double>& numbers) {
    json m;
    m["manifest_version"] = 1;
    m["command"] = command;
    m["library_version"] = kVersion;
    m["seed"] = c.seed;
    m["tol"] = c.tol;
    m["max_iter"] = c.max_iter;
    m["format"] = c.format;
    m["threads"] = c.threads;
    m["params"] = params;
    for (const auto& [k, v] : numbers) m[k] = v;
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "manifest.json", m.dump(2) + "\n");
}

lifs::SolveResult solve_or_die(const lifs::DiscreteRB& rb, const Common& c) {
    lifs::GridFunction zero{rb.grid(), std::vector<double>(rb.size(), 0.0)};
    lifs::SolveOptions opt;
    opt.tol = c.tol;
    opt.max_iter = c.max_iter;
    lifs::SolveResult r = lifs::solve_fixed_point(rb, zero, opt);
    if (!r.converged) {
        std::cerr << "solver did not converge (residual " << lifs::format_full(r.residual)
                  << ")\n";
        std::exit(2);
    }
    return r;
}

std::vector<lifs::IFSMap2D> example_maps(bool restrict_domains) {
    lifs::Rect x1{0.0, 0.8, 0.0, 0.8};
    lifs::Rect x2{0.4, 1.0, 0.4, 1.0};
    lifs::Rect all{0.0, 1.0, 0.0, 1.0};
    lifs::AffineMap2D f1{0.5, 0.0, 0.0, 0.5, 0.0, 0.0};
    lifs::AffineMap2D f2{0.5, 0.0, 0.0, 0.5, 0.2, 0.2};
    if (restrict_domains) return {{x1, f1}, {x2, f2}};
    return {{all, f1}, {all, f2}};
}

int cmd_attractor(const Common& c) {
    double pitch = 1.0 / c.grid;
    auto local_est = lifs::iterate_attractor(example_maps(true), {0, 1, 0, 1}, 64, pitch);
    auto global_est = lifs::iterate_attractor(example_maps(false), {0, 1, 0, 1}, 64, pitch);
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "local_attractor.csv", local_est.set.to_csv());
    write_file(fs::path(c.out) / "global_attractor.csv", global_est.set.to_csv());
    write_manifest(c, "attractor", {{"pitch", lifs::format_full(pitch)}},
                   {{"local_iterations", double(local_est.iterations)},
                    {"global_iterations", double(global_est.iterations)},
                    {"local_last_step", local_est.last_step},
                    {"global_last_step", global_est.last_step}});
    return 0;
}

int cmd_random_fractal(const Common& c, int n, double s_bound) {
    lifs::RBSpec spec = lifs::build_random_spec(n, c.seed, s_bound);
    lifs::DiscreteRB rb(spec, lifs::make_admissible_grid(spec.ifs, c.grid));
    lifs::SolveResult r = solve_or_die(rb, c);
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / ("fractal." + c.format),
               grid_function_text(r.f, c.format));
    write_manifest(c, "random-fractal",
                   {{"n", std::to_string(n)}, {"s_bound", lifs::format_full(s_bound)}},
                   {{"iterations", double(r.iters)}, {"residual", r.residual}});
    return 0;
}

int cmd_interpolate(const Common& c, const std::string& target, int n, double s,
                    bool continuous) {
    lifs::InterpolationProblem p;
    p.target = lifs::parse_expression(target);
    p.n_domains = n;
    p.s_odd.assign(n / 2, s);
    p.mode = continuous ? lifs::InterpMode::EndpointContinuous : lifs::InterpMode::Endpoint;
    p.s_even.assign(n / 2, s);
    lifs::RBSpec spec = lifs::build_endpoint_interpolant(p);
    lifs::DiscreteRB rb(spec, lifs::make_admissible_grid(spec.ifs, c.grid));
    lifs::SolveResult r = solve_or_die(rb, c);
    double max_err = 0.0;
    for (int k = 0; k < r.f.grid.size(); ++k)
        max_err = std::max(max_err, std::abs(r.f.values[k] - p.target(r.f.grid.points[k])));
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / ("interpolant." + c.format),
               grid_function_text(r.f, c.format));
    write_manifest(c, "interpolate",
                   {{"target", target},
                    {"n", std::to_string(n)},
                    {"s", lifs::format_full(s)},
                    {"continuous", continuous ? "true" : "false"}},
                   {{"iterations", double(r.iters)},
                    {"residual", r.residual},
                    {"max_error_vs_target", max_err}});
    return 0;
}

int cmd_hermite(const Common& c, const std::string& target, const std::string& dtarget, int n) {
    lifs::RealFn f = lifs::parse_expression(target);
    lifs::RealFn df;
    if (!dtarget.empty()) {
        df = lifs::parse_expression(dtarget);
    } else {
        df = [f](double x) {
            const double h = 1e-6;
            return (f(x + h) - f(x - h)) / (2.0 * h);
        };
    }
    lifs::RBSpec spec = lifs::build_hermite_interpolant(f, df, n);
    lifs::DiscreteRB rb(spec, lifs::make_admissible_grid(spec.ifs, c.grid));
    lifs::SolveResult r = solve_or_die(rb, c);
    std::ostringstream err_csv;
    err_csv << "x,error\n";
    double max_err = 0.0;
    for (int k = 0; k < r.f.grid.size(); ++k) {
        double e = r.f.values[k] - f(r.f.grid.points[k]);
        max_err = std::max(max_err, std::abs(e));
        err_csv << lifs::format_full(r.f.grid.points[k]) << "," << lifs::format_full(e) << "\n";
    }
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / ("hermite." + c.format), grid_function_text(r.f, c.format));
    write_file(fs::path(c.out) / "hermite_error.csv", err_csv.str());
    write_manifest(c, "hermite",
                   {{"target", target}, {"dtarget", dtarget}, {"n", std::to_string(n)}},
                   {{"iterations", double(r.iters)},
                    {"residual", r.residual},
                    {"max_error", max_err}});
    return 0;
}

int cmd_order_study(const Common& c, const std::string& target, const std::string& dtarget,
                    int levels) {
    lifs::RealFn f = lifs::parse_expression(target);
    lifs::RealFn df;
    if (!dtarget.empty()) {
        df = lifs::parse_expression(dtarget);
    } else {
        df = [f](double x) {
            const double h = 1e-6;
            return (f(x + h) - f(x - h)) / (2.0 * h);
        };
    }
    std::vector<double> hs;
    std::ostringstream csv;
    csv << "h,max_error\n";
    std::vector<double> errors;
    for (int l = 0; l < levels; ++l) {
        int domains = 4 << l;  // h = 1/4, 1/8, ...
        double h = 1.0 / domains;
        lifs::RBSpec spec = lifs::build_hermite_interpolant(f, df, domains);
        double err = lifs::max_error_on_fine_grid(spec, f, 8 * domains);
        hs.push_back(h);
        errors.push_back(err);
        csv << lifs::format_full(h) << "," << lifs::format_full(err) << "\n";
    }
    double order = lifs::estimate_order(
        [&](double h) {
            for (std::size_t i = 0; i < hs.size(); ++i)
                if (hs[i] == h) return errors[i];
            throw lifs::Error("unknown h");
        },
        hs);
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "order_study.csv", csv.str());
    write_manifest(c, "order-study",
                   {{"target", target}, {"dtarget", dtarget}, {"levels", std::to_string(levels)}},
                   {{"fitted_order", order}});
    std::cout << "fitted order " << lifs::format_full(order) << "\n";
    return 0;
}

std::vector<double> parse_coeffs(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw lifs::Error("empty coefficient list");
    return out;
}

std::string jet_csv(const std::vector<std::pair<double, lifs::JetVector>>& rows) {
    std::ostringstream os;
    if (rows.empty()) return "x\n";
    os << "x";
    for (int k = 0; k <= rows.front().second.degree; ++k) os << ",f" << k;
    os << "\n";
    for (const auto& [x, jet] : rows) {
        os << lifs::format_full(x);
        for (int k = 0; k < jet.values.size(); ++k) os << "," << lifs::format_full(jet.values(k));
        os << "\n";
    }
    return os.str();
}

int cmd_polyjet(const Common& c, const std::string& coeffs_text) {
    std::vector<double> coeffs = parse_coeffs(coeffs_text);
    std::vector<std::pair<double, lifs::JetVector>> rows;
    for (int k = 0; k <= c.grid; ++k) {
        double x = double(k) / c.grid;
        rows.emplace_back(x, lifs::jet_at(coeffs, x));
    }
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "jets.csv", jet_csv(rows));
    write_manifest(c, "polyjet", {{"coeffs", coeffs_text}}, {});
    return 0;
}

int cmd_poly_ifs(const Common& c, const std::string& coeffs_text, double theta, int digits) {
    std::vector<double> coeffs = parse_coeffs(coeffs_text);
    std::vector<std::pair<double, lifs::JetVector>> rows;
    double max_dev = 0.0;
    const int count = std::min(c.grid, 1 << digits);
    for (int k = 0; k < count; ++k) {
        double x = std::ldexp(double((1 << digits) / count * k), -digits);
        lifs::JetVector jet = lifs::poly_ifs_reconstruct(coeffs, 0.5, theta, digits, x);
        lifs::JetVector direct = lifs::jet_at(coeffs, x);
        max_dev = std::max(max_dev, (jet.values - direct.values).cwiseAbs().maxCoeff());
        rows.emplace_back(x, std::move(jet));
    }
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "poly_ifs.csv", jet_csv(rows));
    write_manifest(c, "poly-ifs",
                   {{"coeffs", coeffs_text},
                    {"theta", lifs::format_full(theta)},
                    {"digits", std::to_string(digits)}},
                   {{"max_deviation_vs_direct", max_dev}});
    return 0;
}

int cmd_collage_fit(const Common& c, const std::string& target, int n) {
    lifs::RealFn f = lifs::parse_expression(target);
    lifs::LocalIFS1D ifs = lifs::uniform_pair_ifs(n);
    std::vector<lifs::SampledFunction> scalings;
    for (int i = 1; i <= n; ++i)
        scalings.push_back(lifs::SampledFunction::constant(0.5, ifs.domain(i)));
    std::vector<std::vector<lifs::SampledFunction>> directions;
    for (int j = 0; j < n; ++j) {
        std::vector<lifs::SampledFunction> dir;
        for (int i = 1; i <= n; ++i)
            dir.push_back(lifs::SampledFunction::constant(i == j + 1 ? 1.0 : 0.0,
                                                          ifs.domain(i)));
        directions.push_back(std::move(dir));
    }
    lifs::Grid grid = lifs::make_admissible_grid(ifs, c.grid);
    lifs::ParametricRB prb(ifs, scalings, directions, grid);
    std::vector<double> target_values(grid.points.size());
    for (std::size_t k = 0; k < grid.points.size(); ++k) target_values[k] = f(grid.points[k]);
    lifs::QuadraticForm form = lifs::l2_form(grid, target_values);
    lifs::CollageFitResult fit = lifs::collage_fit(prb, form, c.tol, c.max_iter);
    lifs::GridFunction u{grid, std::vector<double>(fit.u_tilde.data(),
                                                   fit.u_tilde.data() + fit.u_tilde.size())};
    json alpha = json::array();
    for (int j = 0; j < fit.alpha.size(); ++j) alpha.push_back(fit.alpha(j));
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / ("collage_fit." + c.format), grid_function_text(u, c.format));
    write_file(fs::path(c.out) / "alpha.json", alpha.dump(2) + "\n");
    write_manifest(c, "collage-fit", {{"target", target}, {"n", std::to_string(n)}},
                   {{"iterations", double(fit.iters)},
                    {"residual", fit.residual},
                    {"vn_residual", fit.vn_residual},
                    {"gamma", fit.gamma}});
    return 0;
}

int cmd_srgrid(const Common& c, int count, int max_digits) {
    lifs::Rng rng(c.seed);
    std::vector<lifs::DyadicPoint> seeds;
    for (int k = 0; k < count; ++k) {
        int digits = 1 + int(rng.next_u64() % max_digits);
        std::vector<std::uint8_t> d(digits);
        for (auto& bit : d) bit = std::uint8_t(rng.next_u64() & 1);
        seeds.emplace_back(std::move(d));
    }
    lifs::SelfRefGrid grid = lifs::close_grid(seeds);
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "srgrid.csv", grid.to_csv());
    write_manifest(c, "srgrid",
                   {{"count", std::to_string(count)}, {"max_digits", std::to_string(max_digits)}},
                   {{"grid_size", double(grid.points.size())},
                    {"self_referential", grid.is_self_referential() ? 1.0 : 0.0}});
    return 0;
}

int cmd_subdivide(const Common& c, int levels, double s_bound) {
    lifs::RBSpec spec = lifs::build_random_spec(2, c.seed, s_bound);
    auto v1 = lifs::affine_rule(spec.lambdas[0], spec.scalings[0]);
    auto v2 = lifs::affine_rule(spec.lambdas[1], spec.scalings[1]);
    lifs::DiscreteRB rb(spec, lifs::make_admissible_grid(spec.ifs, 1 << levels));
    lifs::SolveResult r = solve_or_die(rb, c);
    lifs::RefinementLevel level = lifs::make_level0(r.f.values[0]);
    std::ostringstream csv;
    csv << "level,x,value\n";
    double dev = 0.0;
    for (int l = 0; l <= levels; ++l) {
        for (int j = 0; j < level.size(); ++j)
            csv << level.k << "," << lifs::format_full(level.mesh_point(j)) << ","
                << lifs::format_full(level.values[j]) << "\n";
        if (l == levels)
            for (int j = 0; j < level.size(); ++j)
                dev = std::max(dev, std::abs(level.values[j] - r.f.values[j]));
        else
            level = lifs::refine(level, v1, v2);
    }
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "subdivision.csv", csv.str());
    write_manifest(c, "subdivide",
                   {{"levels", std::to_string(levels)}, {"s_bound", lifs::format_full(s_bound)}},
                   {{"iterations", double(r.iters)},
                    {"residual", r.residual},
                    {"max_deviation_vs_fixed_point", dev}});
    return 0;
}

int cmd_qtt(const Common& c, double l1, double l2, double s1, double s2, int digits) {
    lifs::QTTCore core = lifs::build_qtt(l1, l2, s1, s2);
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "qtt_core.json", core.to_json() + "\n");
    write_file(fs::path(c.out) / "qtt_values.csv", lifs::qtt_grid_csv(core, digits));
    write_manifest(c, "qtt",
                   {{"lambda1", lifs::format_full(l1)},
                    {"lambda2", lifs::format_full(l2)},
                    {"s1", lifs::format_full(s1)},
                    {"s2", lifs::format_full(s2)},
                    {"digits", std::to_string(digits)}},
                   {{"rank", double(lifs::qtt_rank_report(core))}, {"f0", core.f0}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local IFS / fractal function toolkit"};
    app.require_subcommand(1);

    Common c;
    int n = 8, levels = 5, digits = 10, count = 8, max_digits = 10;
    double s_bound = 0.9, s = 0.5, theta = 0.5;
    double l1 = 0.3, l2 = -0.2, s1 = 0.5, s2 = 0.4;
    std::string target = "x", dtarget, coeffs = "1,0,-2,0.5";
    bool continuous = false;

    auto* attractor = app.add_subcommand("attractor", "Example local/global 2D attractors");
    add_common(attractor, c);

    auto* rf = app.add_subcommand("random-fractal", "random 1D fractal function");
    add_common(rf, c);
    rf->add_option("--n", n, "number of maps (even)");
    rf->add_option("--s-bound", s_bound, "scaling bound");

    auto* interp = app.add_subcommand("interpolate", "endpoint fractal interpolation");
    add_common(interp, c);
    interp->add_option("--target", target, "target expression")->required();
    interp->add_option("--n", n, "number of maps (even)");
    interp->add_option("--s", s, "odd-map scaling");
    interp->add_flag("--continuous", continuous, "force S_{2j} = 1 - S_{2j-1}");

    auto* hermite = app.add_subcommand("hermite", "Hermite fractal interpolation");
    add_common(hermite, c);
    hermite->add_option("--target", target, "target expression")->required();
    hermite->add_option("--dtarget", dtarget, "derivative expression (default: numeric)");
    hermite->add_option("--n", n, "number of maps (even)");

    auto* order = app.add_subcommand("order-study", "Hermite convergence order");
    add_common(order, c);
    order->add_option("--target", target, "target expression")->required();
    order->add_option("--dtarget", dtarget, "derivative expression (default: numeric)");
    order->add_option("--levels", levels, "number of mesh halvings");

    auto* pj = app.add_subcommand("polyjet", "polynomial jet traces");
    add_common(pj, c);
    pj->add_option("--coeffs", coeffs, "derivatives at 0, comma separated")->required();

    auto* pifs = app.add_subcommand("poly-ifs", "polynomial reconstruction by two-map IFS");
    add_common(pifs, c);
    pifs->add_option("--coeffs", coeffs, "derivatives at 0, comma separated")->required();
    pifs->add_option("--theta", theta, "regularization in [0,1]");
    pifs->add_option("--digits", digits, "dyadic digit count");

    auto* cf = app.add_subcommand("collage-fit", "collage fit in a fractal family");
    add_common(cf, c);
    cf->add_option("--target", target, "target expression")->required();
    cf->add_option("--n", n, "number of maps (even)");

    auto* sr = app.add_subcommand("srgrid", "self-referential grid closure");
    add_common(sr, c);
    sr->add_option("--count", count, "random seed points");
    sr->add_option("--max-digits", max_digits, "digit budget per point");

    auto* sub = app.add_subcommand("subdivide", "binary subdivision refinement");
    add_common(sub, c);
    sub->add_option("--levels", levels, "refinement levels");
    sub->add_option("--s-bound", s_bound, "scaling bound");

    auto* q = app.add_subcommand("qtt", "rank-2 matrix-product evaluation");
    add_common(q, c);
    q->add_option("--lambda1", l1, "lambda_1");
    q->add_option("--lambda2", l2, "lambda_2");
    q->add_option("--s1", s1, "S_1");
    q->add_option("--s2", s2, "S_2");
    q->add_option("--digits", digits, "digit count d");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c.threads > 0) Eigen::setNbThreads(c.threads);
        if (attractor->parsed()) return cmd_attractor(c);
        if (rf->parsed()) return cmd_random_fractal(c, n, s_bound);
        if (interp->parsed()) return cmd_interpolate(c, target, n, s, continuous);
        if (hermite->parsed()) return cmd_hermite(c, target, dtarget, n);
        if (order->parsed()) return cmd_order_study(c, target, dtarget, levels);
        if (pj->parsed()) return cmd_polyjet(c, coeffs);
        if (pifs->parsed()) return cmd_poly_ifs(c, coeffs, theta, digits);
        if (cf->parsed()) return cmd_collage_fit(c, target, n);
        if (sr->parsed()) return cmd_srgrid(c, count, max_digits);
        if (sub->parsed()) return cmd_subdivide(c, levels, s_bound);
        if (q->parsed()) return cmd_qtt(c, l1, l2, s1, s2, digits);
    } catch (const lifs::NotContractive& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const lifs::ContractivityViolated& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const lifs::GammaNotLessThanOne& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const lifs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
