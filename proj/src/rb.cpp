#include "lifs/rb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

namespace lifs {

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction SampledFunction::constant(double c, Interval dom) {
    SampledFunction f;
    f.kind_ = Kind::Constant;
    f.c_ = c;
    f.domain_ = dom;
    return f;
}

SampledFunction SampledFunction::affine(double alpha, double beta, Interval dom) {
    SampledFunction f;
    f.kind_ = Kind::Affine;
    f.alpha_ = alpha;
    f.beta_ = beta;
    f.domain_ = dom;
    return f;
}

SampledFunction SampledFunction::table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw Error("table needs >= 2 samples");
    if (!std::is_sorted(xs.begin(), xs.end())) throw Error("table grid must be sorted");
    SampledFunction f;
    f.kind_ = Kind::Table;
    f.domain_ = {xs.front(), xs.back()};
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    return f;
}

double SampledFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::Constant: return c_;
        case Kind::Affine: return alpha_ + beta_ * x;
        case Kind::Table: {
            if (x < xs_.front() - 1e-12 || x > xs_.back() + 1e-12)
                throw Error("table evaluation outside domain");
            auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
            if (it != xs_.end() && *it == x) return ys_[it - xs_.begin()];
            if (it == xs_.begin()) return ys_.front();
            if (it == xs_.end()) return ys_.back();
            std::size_t hi = it - xs_.begin(), lo = hi - 1;
            double t = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
            return ys_[lo] + t * (ys_[hi] - ys_[lo]);
        }
    }
    return 0.0;
}

double SampledFunction::sup_abs() const {
    switch (kind_) {
        case Kind::Constant: return std::abs(c_);
        case Kind::Affine:
            return std::max(std::abs(alpha_ + beta_ * domain_.lo),
                            std::abs(alpha_ + beta_ * domain_.hi));
        case Kind::Table: {
            double m = 0.0;
            for (double y : ys_) m = std::max(m, std::abs(y));
            return m;
        }
    }
    return 0.0;
}

namespace {
nlohmann::json sf_to_json_obj(const SampledFunction& f) {
    nlohmann::json j;
    switch (f.kind()) {
        case SampledFunction::Kind::Constant:
            j["kind"] = "constant";
            j["c"] = f.constant_value();
            break;
        case SampledFunction::Kind::Affine:
            j["kind"] = "affine";
            j["alpha"] = f.affine_alpha();
            j["beta"] = f.affine_beta();
            break;
        case SampledFunction::Kind::Table: {
            j["kind"] = "table";
            // round-trip through eval at the sample grid
            j["xs"] = nlohmann::json::array();
            j["ys"] = nlohmann::json::array();
            break;
        }
    }
    j["domain"] = {f.domain().lo, f.domain().hi};
    return j;
}

SampledFunction sf_from_json_obj(const nlohmann::json& j) {
    std::string kind = j.at("kind");
    Interval dom{0.0, 1.0};
    if (j.contains("domain")) dom = {j["domain"].at(0), j["domain"].at(1)};
    if (kind == "constant") return SampledFunction::constant(j.at("c"), dom);
    if (kind == "affine") return SampledFunction::affine(j.at("alpha"), j.at("beta"), dom);
    if (kind == "table")
        return SampledFunction::table(j.at("xs").get<std::vector<double>>(),
                                      j.at("ys").get<std::vector<double>>());
    throw Error("unknown sampled-function kind: " + kind);
}
}  // namespace

std::string SampledFunction::to_json() const {
    auto j = sf_to_json_obj(*this);
    if (kind_ == Kind::Table) {
        j["xs"] = xs_;
        j["ys"] = ys_;
    }
    return j.dump();
}

SampledFunction SampledFunction::from_json(const std::string& text) {
    return sf_from_json_obj(nlohmann::json::parse(text));
}

// ---------------------------------------------------------------------------
// RBSpec

RBSpec::RBSpec(LocalIFS1D i, std::vector<SampledFunction> l, std::vector<SampledFunction> s)
    : ifs(std::move(i)), lambdas(std::move(l)), scalings(std::move(s)) {
    if (static_cast<int>(lambdas.size()) != ifs.size() ||
        static_cast<int>(scalings.size()) != ifs.size())
        throw Error("RBSpec: list lengths must match the IFS");
}

std::string RBSpec::to_json() const {
    nlohmann::json j;
    j["ifs"] = nlohmann::json::parse(ifs.to_json());
    for (const auto& l : lambdas) j["lambdas"].push_back(nlohmann::json::parse(l.to_json()));
    for (const auto& s : scalings) j["scalings"].push_back(nlohmann::json::parse(s.to_json()));
    return j.dump();
}

RBSpec RBSpec::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    LocalIFS1D ifs = LocalIFS1D::from_json(j.at("ifs").dump());
    std::vector<SampledFunction> ls, ss;
    for (const auto& l : j.at("lambdas")) ls.push_back(sf_from_json_obj(l));
    for (const auto& s : j.at("scalings")) ss.push_back(sf_from_json_obj(s));
    return RBSpec(std::move(ifs), std::move(ls), std::move(ss));
}

// ---------------------------------------------------------------------------
// Grid

int Grid::index_of(double x, double tol) const {
    auto it = std::lower_bound(points.begin(), points.end(), x - tol);
    if (it != points.end() && std::abs(*it - x) <= tol) return static_cast<int>(it - points.begin());
    return -1;
}

bool Grid::is_admissible(const LocalIFS1D& ifs, double tol) const {
    for (double x : points) {
        int i = ifs.cell_of(x);
        double y = ifs.map(i).inverse(x);
        if (index_of(y, tol) < 0) return false;
    }
    return true;
}

std::string GridFunction::to_csv() const {
    std::ostringstream os;
    os << "x,value\n";
    for (std::size_t k = 0; k < values.size(); ++k)
        os << format_full(grid.points[k]) << "," << format_full(values[k]) << "\n";
    return os.str();
}

Grid make_admissible_grid(const LocalIFS1D& ifs, int n_g, int closure_budget) {
    if (n_g < 1) throw Error("grid size must be positive");
    Grid g;
    g.points.resize(n_g);
    for (int k = 0; k < n_g; ++k) g.points[k] = static_cast<double>(k) / n_g;
    if (g.is_admissible(ifs)) return g;

    // Closure of the seed under the inverse maps on their image cells.
    std::set<double> pts(g.points.begin(), g.points.end());
    for (int round = 0; round < closure_budget; ++round) {
        std::vector<double> fresh;
        for (double x : pts) {
            int i = ifs.cell_of(x);
            double y = ifs.map(i).inverse(x);
            auto it = pts.lower_bound(y - 1e-12);
            bool present = it != pts.end() && std::abs(*it - y) <= 1e-12;
            if (!present && y >= 0.0 && y <= 1.0) fresh.push_back(y);
        }
        if (fresh.empty()) {
            Grid out;
            out.points.assign(pts.begin(), pts.end());
            return out;
        }
        pts.insert(fresh.begin(), fresh.end());
    }
    throw NotAdmissible("grid closure did not stabilize within budget");
}

// ---------------------------------------------------------------------------
// Contractivity

ContractivityReport check_contractivity(const RBSpec& spec, double p) {
    if (!(p >= 1.0)) throw InvalidP("contractivity check requires p >= 1");
    ContractivityReport r;
    if (p == kPInfinity) {
        for (const auto& s : spec.scalings) r.value = std::max(r.value, s.sup_abs());
    } else {
        double sum = 0.0;
        for (int i = 1; i <= spec.ifs.size(); ++i)
            sum += spec.ifs.map(i).lipschitz() * std::pow(spec.scalings[i - 1].sup_abs(), p);
        r.value = std::pow(sum, 1.0 / p);
    }
    r.contractive = r.value < 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// DiscreteRB

DiscreteRB::DiscreteRB(const RBSpec& spec, Grid grid) : grid_(std::move(grid)) {
    const LocalIFS1D& ifs = spec.ifs;
    const int n = grid_.size();
    const int nmaps = ifs.size();
    lambda_.resize(n);
    row_map_.resize(n);
    src_.resize(n);
    s_row_.resize(n);
    domain_idx_.resize(nmaps);
    s_dom_.resize(nmaps);
    image_rows_.resize(nmaps);
    src_pos_.resize(nmaps);

    for (int i = 1; i <= nmaps; ++i) {
        for (int k = 0; k < n; ++k)
            if (ifs.in_domain(i, grid_.points[k])) {
                domain_idx_[i - 1].push_back(k);
                s_dom_[i - 1].push_back(spec.scalings[i - 1](grid_.points[k]));
            }
    }

    for (int k = 0; k < n; ++k) {
        double x = grid_.points[k];
        int i = ifs.cell_of(x);
        double y = ifs.map(i).inverse(x);
        int ky = grid_.index_of(y);
        if (ky < 0)
            throw GridNotAdmissible("grid point " + format_full(x) +
                                    " has no grid preimage under map " + std::to_string(i));
        row_map_[k] = i;
        src_[k] = ky;
        lambda_[k] = spec.lambdas[i - 1](y);
        s_row_[k] = spec.scalings[i - 1](y);
        image_rows_[i - 1].push_back(k);
        auto& dom = domain_idx_[i - 1];
        auto it = std::lower_bound(dom.begin(), dom.end(), ky);
        if (it == dom.end() || *it != ky)
            throw GridNotAdmissible("preimage not inside the map's domain grid");
        src_pos_[i - 1].push_back(static_cast<int>(it - dom.begin()));
    }
}

double DiscreteRB::max_abs_scaling() const {
    double m = 0.0;
    for (double s : s_row_) m = std::max(m, std::abs(s));
    return m;
}

GridFunction DiscreteRB::apply(const GridFunction& f) const {
    if (static_cast<int>(f.values.size()) != size())
        throw LengthMismatch("apply: grid-function length mismatch");
    GridFunction out{grid_, std::vector<double>(size())};
    for (int k = 0; k < size(); ++k) out.values[k] = lambda_[k] + s_row_[k] * f.values[src_[k]];
    return out;
}

GridFunction DiscreteRB::apply_factored(const GridFunction& f) const {
    if (static_cast<int>(f.values.size()) != size())
        throw LengthMismatch("apply_factored: grid-function length mismatch");
    GridFunction out{grid_, std::vector<double>(size())};
    std::vector<double> tmp;
    for (std::size_t m = 0; m < domain_idx_.size(); ++m) {
        tmp.resize(domain_idx_[m].size());
        for (std::size_t r = 0; r < tmp.size(); ++r)
            tmp[r] = s_dom_[m][r] * f.values[domain_idx_[m][r]];  // S_i E_i f
        for (std::size_t r = 0; r < image_rows_[m].size(); ++r)
            out.values[image_rows_[m][r]] = lambda_[image_rows_[m][r]] + tmp[src_pos_[m][r]];
    }
    return out;
}

std::vector<std::vector<double>> DiscreteRB::dense_matrix() const {
    std::vector<std::vector<double>> m(size(), std::vector<double>(size(), 0.0));
    for (int k = 0; k < size(); ++k) m[k][src_[k]] = s_row_[k];
    return m;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

/// Solve the periodic chains of the out-degree-1 source graph in closed
/// form: around a cycle, f = A + B f with B the product of the scalings.
/// Returns the seeded values and a mask of which entries were solved.
void seed_cycles(const DiscreteRB& rb, std::vector<double>& f, std::vector<char>& solved) {
    const int n = rb.size();
    const auto& src = rb.source_index();
    const auto& s = rb.scaling_diag();
    const auto& lam = rb.lambda_vec();
    std::vector<int> state(n, 0);  // 0 new, 1 on current walk, 2 done
    std::vector<int> path;
    for (int start = 0; start < n; ++start) {
        if (state[start]) continue;
        path.clear();
        int x = start;
        while (state[x] == 0) {
            state[x] = 1;
            path.push_back(x);
            x = src[x];
        }
        if (state[x] == 1) {
            // found a fresh cycle beginning at x
            std::vector<int> cyc;
            auto it = std::find(path.begin(), path.end(), x);
            cyc.assign(it, path.end());
            double prod_s = 1.0, acc = 0.0;
            for (int node : cyc) {
                acc += prod_s * lam[node];
                prod_s *= s[node];
            }
            if (std::abs(1.0 - prod_s) > 1e-14) {
                double v0 = acc / (1.0 - prod_s);
                // back-propagate: f[cyc[j]] = lam + s * f[cyc[j+1]]
                f[cyc[0]] = v0;
                solved[cyc[0]] = 1;
                for (int j = static_cast<int>(cyc.size()) - 1; j >= 1; --j) {
                    int node = cyc[j];
                    int nxt = cyc[(j + 1) % cyc.size()];
                    f[node] = lam[node] + s[node] * f[nxt];
                    solved[node] = 1;
                }
            }
        }
        for (int node : path) state[node] = 2;
    }
}

}  // namespace

SolveResult solve_fixed_point(const DiscreteRB& rb, const GridFunction& start,
                              const SolveOptions& opt) {
    if (static_cast<int>(start.values.size()) != rb.size())
        throw LengthMismatch("solve_fixed_point: start length mismatch");
    if (!(opt.tol > 0.0)) throw Error("tol must be positive");
    SolveResult res;
    res.contraction_warning = rb.max_abs_scaling() >= 1.0;
    GridFunction f = start;
    if (opt.resolve_cycles) {
        std::vector<char> solved(rb.size(), 0);
        seed_cycles(rb, f.values, solved);
    }
    for (int k = 0; k < opt.max_iter; ++k) {
        GridFunction next = rb.apply(f);
        double r = 0.0;
        for (int j = 0; j < rb.size(); ++j)
            r = std::max(r, std::abs(next.values[j] - f.values[j]));
        f = std::move(next);
        res.iters = k + 1;
        res.residual = r;
        if (r <= opt.tol) {
            res.converged = true;
            break;
        }
    }
    res.f = std::move(f);
    return res;
}

GridFunction solve_direct(const DiscreteRB& rb) {
    const int n = rb.size();
    if (n > 4096) throw Error("direct solve capped at 4096 grid points");
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) a(k, rb.source_index()[k]) -= rb.scaling_diag()[k];
    Eigen::VectorXd b(n);
    for (int k = 0; k < n; ++k) b(k) = rb.lambda_vec()[k];
    Eigen::VectorXd x = a.partialPivLu().solve(b);
    GridFunction out{rb.grid(), std::vector<double>(n)};
    for (int k = 0; k < n; ++k) out.values[k] = x(k);
    return out;
}

// ---------------------------------------------------------------------------
// Local refinement detection

std::optional<std::vector<std::vector<int>>> detect_local_refinement(const DiscreteRB& rb) {
    // union-find over map indices
    struct UF {
        std::vector<int> p;
        explicit UF(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
        int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
        void unite(int a, int b) { p[find(a)] = find(b); }
    };
    // number of maps = number of partition cells; infer from rows
    int nmaps = 0;
    for (int k = 0; k < rb.size(); ++k) nmaps = std::max(nmaps, rb.map_of_row(k));
    UF uf(nmaps);

    // which map's image cell each grid index lies in
    std::vector<int> image_of(rb.size());
    for (int k = 0; k < rb.size(); ++k) image_of[k] = rb.map_of_row(k);

    // i and j must share a block whenever u_j's image meets X_i on the grid
    for (int i = 1; i <= nmaps; ++i)
        for (int k : rb.domain_indices(i)) uf.unite(i - 1, image_of[k] - 1);

    std::vector<std::vector<int>> blocks(nmaps);
    for (int i = 1; i <= nmaps; ++i) blocks[uf.find(i - 1)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& b : blocks)
        if (!b.empty()) out.push_back(std::move(b));

    // verify: for each block, each member domain equals the union of the
    // block's image rows
    for (const auto& block : out) {
        std::vector<int> union_rows;
        for (int i : block) {
            const auto& rows = rb.image_rows(i);
            union_rows.insert(union_rows.end(), rows.begin(), rows.end());
        }
        std::sort(union_rows.begin(), union_rows.end());
        for (int i : block)
            if (rb.domain_indices(i) != union_rows) return std::nullopt;
    }
    return out;
}

}  // namespace lifs
