#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "lifs/local_ifs.hpp"

namespace lifs {

/// Scalar function on a domain interval: constant, affine alpha + beta*x, or
/// a sample table with piecewise-linear lookup (a sample point returns its
/// sample exactly).
class SampledFunction {
  public:
    enum class Kind { Constant, Affine, Table };

    static SampledFunction constant(double c, Interval dom = {0.0, 1.0});
    static SampledFunction affine(double alpha, double beta, Interval dom = {0.0, 1.0});
    static SampledFunction table(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    Kind kind() const { return kind_; }
    const Interval& domain() const { return domain_; }

    /// Sup of |f| over the domain (exact for constant/affine; for tables the
    /// max over samples — excursions between samples are uncontrolled).
    double sup_abs() const;

    double constant_value() const { return c_; }
    double affine_alpha() const { return alpha_; }
    double affine_beta() const { return beta_; }

    std::string to_json() const;
    static SampledFunction from_json(const std::string& text);

  private:
    SampledFunction() = default;
    Kind kind_ = Kind::Constant;
    Interval domain_{0.0, 1.0};
    double c_ = 0.0;
    double alpha_ = 0.0, beta_ = 0.0;
    std::vector<double> xs_, ys_;
};

/// The (lambda_i, S_i) data of the special affine RB operator
/// v_i(x, y) = lambda_i(x) + S_i(x) y on a local IFS.
struct RBSpec {
    LocalIFS1D ifs;
    std::vector<SampledFunction> lambdas;
    std::vector<SampledFunction> scalings;

    RBSpec(LocalIFS1D i, std::vector<SampledFunction> l, std::vector<SampledFunction> s);

    std::string to_json() const;
    static RBSpec from_json(const std::string& text);
};

struct Grid {
    std::vector<double> points;  // sorted, in [0,1]

    int size() const { return static_cast<int>(points.size()); }
    /// Index of x in the grid within tol, or -1.
    int index_of(double x, double tol = 1e-12) const;
    bool is_admissible(const LocalIFS1D& ifs, double tol = 1e-12) const;
};

struct GridFunction {
    Grid grid;
    std::vector<double> values;

    std::string to_csv() const;
};

/// Uniform grid {k/n_g} when admissible; otherwise the closure of that seed
/// under the inverse maps, capped by an iteration budget.
Grid make_admissible_grid(const LocalIFS1D& ifs, int n_g, int closure_budget = 10);

struct ContractivityReport {
    double value = 0.0;
    bool contractive = false;
};

/// Left-hand side of the L^p contractivity condition:
/// (sum a_i ||S_i||^p)^{1/p} for finite p, max ||S_i|| for p = infinity.
ContractivityReport check_contractivity(const RBSpec& spec, double p);

inline constexpr double kPInfinity = std::numeric_limits<double>::infinity();

/// The assembled discrete RB operator Phi^g f = lambda^g + M f with the
/// factored form M = USE kept explicitly: U and E are sampling/restriction
/// index arrays (one unit entry per row), S is diagonal.
class DiscreteRB {
  public:
    DiscreteRB(const RBSpec& spec, Grid grid);

    int size() const { return static_cast<int>(lambda_.size()); }
    const Grid& grid() const { return grid_; }
    const std::vector<double>& lambda_vec() const { return lambda_; }
    const std::vector<int>& source_index() const { return src_; }
    const std::vector<double>& scaling_diag() const { return s_row_; }
    int map_of_row(int k) const { return row_map_[k]; }
    double max_abs_scaling() const;

    /// lambda^g + M f, via the composed per-row index form.
    GridFunction apply(const GridFunction& f) const;

    /// Same value computed by chaining the three factors E -> S -> U per map.
    GridFunction apply_factored(const GridFunction& f) const;

    /// Dense n x n matrix M (for oracles / direct solves; n kept moderate).
    std::vector<std::vector<double>> dense_matrix() const;

    // Factor data, per map (1-based map index i).
    const std::vector<int>& domain_indices(int i) const { return domain_idx_[i - 1]; }
    const std::vector<int>& image_rows(int i) const { return image_rows_[i - 1]; }
    const std::vector<int>& source_positions(int i) const { return src_pos_[i - 1]; }

  private:
    Grid grid_;
    std::vector<double> lambda_;
    std::vector<int> row_map_;   // map index per row (1-based)
    std::vector<int> src_;       // source column per row
    std::vector<double> s_row_;  // S_i(u_i^{-1}(x)) per row
    std::vector<std::vector<int>> domain_idx_;  // E_i: grid indices in X_i^g
    std::vector<std::vector<double>> s_dom_;    // diag(S_i) on X_i^g
    std::vector<std::vector<int>> image_rows_;  // rows covered by U_i
    std::vector<std::vector<int>> src_pos_;     // position into domain_idx_ per row
};

struct SolveResult {
    GridFunction f;
    int iters = 0;
    double residual = 0.0;
    bool converged = false;
    bool contraction_warning = false;
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 10000;
    /// Solve the cycles of the source-index graph (self-loops at the knots
    /// and any longer periodic chains) in closed form before iterating.
    /// This is what yields the O(log2 N_g) finite termination from a zero
    /// start; plain Picard iteration only converges geometrically.
    bool resolve_cycles = true;
};

SolveResult solve_fixed_point(const DiscreteRB& rb, const GridFunction& start,
                              const SolveOptions& opt = {});

/// Dense direct solve of (I - M) f = lambda^g; oracle path, n <= 4096.
GridFunction solve_direct(const DiscreteRB& rb);

/// Finest partition {K_m} of the map indices such that every X_i^g with
/// i in K_m is exactly tiled by the images of the maps in K_m.  Absent when
/// the covering equations admit no such partition.
std::optional<std::vector<std::vector<int>>> detect_local_refinement(const DiscreteRB& rb);

inline DiscreteRB assemble(const RBSpec& spec, Grid grid) { return DiscreteRB(spec, std::move(grid)); }

}  // namespace lifs
