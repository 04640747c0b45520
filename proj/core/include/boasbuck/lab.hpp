#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "boasbuck/operators.hpp"
#include "boasbuck/smoothness.hpp"
#include "boasbuck/system.hpp"

namespace boasbuck {

/**
 * One experiment: a system, an operator, a test function, the (n, x) grids,
 * and which checks to run. Mirrors the JSON spec-file format; unknown check
 * names are rejected by validate().
 */
struct ExperimentSpec {
    std::string system = "exp_quadratic"; ///< builtin name or path to a system JSON
    std::string op = "durrmeyer";         ///< discrete | durrmeyer | szasz
    std::string fn = "s2";                ///< catalog id, see catalog_function()
    std::vector<int> n_grid = {10, 20, 40, 80, 160, 320, 640};
    std::vector<double> x_grid = {0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<std::string> checks = {"uniform"};

    double lip_r = 1.0;                        ///< Lipschitz-class exponent, (0,1]
    std::vector<double> dt_gammas = {0.0, 0.5, 1.0};
    double weighted_alpha = 0.5;               ///< corollary exponent in (1+x²)^{1+alpha}
    std::array<double, 3> weighted_tols = {1e-8, 1e-3, 1e-2}; ///< final norms for r=0,1,2
    double bv_x = 1.0;                         ///< evaluation point for the bv check
    double trunc_eps = 1e-12;
    double quad_rel_tol = 1e-9;
    double uniform_final_tol = 1e-2;           ///< sup error demanded at the largest n

    /// Throws std::invalid_argument on malformed fields.
    void validate() const;

    /// base_dir resolves relative system / piecewise paths (usually the spec
    /// file's own directory).
    static ExperimentSpec from_json_text(const std::string& text, const std::string& base_dir);
};

/// Spec file: a single JSON object or an array of them. Relative paths inside
/// resolve against the file's directory.
std::vector<ExperimentSpec> load_experiment_suite(const std::string& path);

/// One emitted CSV row (one (n, x) cell of one check).
struct ResultRow {
    std::string experiment;
    std::string system;
    std::string fn;
    int n = 0;
    double x = 0.0;
    double op_value = 0.0;
    double f_value = 0.0;
    double abs_err = 0.0;
    double bound_value = 0.0;
    double ratio = 0.0;
    std::string note;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<std::string> failures; ///< assertion violations, with context
    std::vector<std::string> notes;    ///< per-n aggregates, fitted rates, skipped cells

    bool passed() const { return failures.empty(); }
};

/// Least-squares slope of log(err) against log(n) over the top half of the
/// grid; valid=false when fewer than two usable (err > 1e-14) points remain.
struct RateFit {
    double exponent = 0.0;
    double residual = 0.0;
    bool valid = false;
};
RateFit fit_rate(const std::vector<int>& n_grid, const std::vector<double>& errors);

/// A catalog entry: the function, its growth envelope, and (when the function
/// is piecewise-polynomial) the descriptor the bv check needs.
struct CatalogFunction {
    std::string id;
    ScalarFn f;
    GrowthBound growth;
    std::optional<PiecewiseFunction> piecewise;
};

/**
 * Built-in ids: one, s, s2, sqrt, expneg, abs1 (= |s-1|, piecewise), and
 * "pw:<path>" for a piecewise JSON file (resolved against base_dir).
 * Unknown ids throw std::invalid_argument.
 */
CatalogFunction catalog_function(const std::string& id, const std::string& base_dir = "");

/// Builtin system names (exp_quadratic, exp_cubic) or a JSON path.
BoasBuckSystem load_system(const std::string& name_or_path, const std::string& base_dir = "");

/// Per-n sup error over x_grid; asserts err(n_{i+1}) <= 1.1 err(n_i) + 1e-8
/// and err(n_max) <= uniform_final_tol.
ExperimentResult run_uniform_convergence(const ExperimentSpec& spec);

/// Per (n,x): |op f - f(x)| <= 2 w(f; sqrt(mu2)) + 2*resolution must hold.
ExperimentResult run_modulus_bound(const ExperimentSpec& spec);

/// Per (n,x): |op f - f(x)| <= (K_fit / x^{r/2}) mu2^{r/2}, ratio <= 1.05.
ExperimentResult run_lipschitz_bound(const ExperimentSpec& spec);

/// Per gamma and (n,x): ratio |op f - f(x)| / w_{phi^gamma}(f; phi^{1-gamma}(x)/sqrt n)
/// must not trend upward (last-third max <= 2x first-third max).
ExperimentResult run_dt_bound(const ExperimentSpec& spec);

/// Weighted sup norms of op(t^r) - x^r for r = 0,1,2 per n: monotone within
/// 10% slack and below weighted_tols at the largest n; plus the
/// (1+x²)^{1+alpha} variant of spec.fn (reported, not asserted).
ExperimentResult run_weighted_convergence(const ExperimentSpec& spec);

/// Error decay at bv_x for a piecewise fn, with the derivative-variation
/// bound skeleton (mu terms, one-sided variations, partial-sum terms, jump)
/// in the note column. Asserts decay, not the full inequality.
ExperimentResult run_bv_decay(const ExperimentSpec& spec);

/// All checks of one spec, concatenated.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// All specs of a suite, concatenated.
ExperimentResult run_suite(const std::vector<ExperimentSpec>& specs);

/// Header + one line per row, scientific %.12e, '.' decimal separator.
/// Throws std::runtime_error when the path cannot be written.
void emit_csv(const ExperimentResult& result, const std::string& path);

} // namespace boasbuck
