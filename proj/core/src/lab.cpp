#include "boasbuck/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "boasbuck/errors.hpp"
#include "boasbuck/moments.hpp"

namespace boasbuck {

namespace {

std::string normalize_check(const std::string& name) {
    if (name == "dt-modulus") return "dt";
    if (name == "bv-decay") return "bv";
    return name;
}

bool known_check(const std::string& name) {
    return name == "uniform" || name == "modulus" || name == "lipschitz" || name == "dt" ||
           name == "weighted" || name == "bv";
}

OperatorKind parse_op(const std::string& op) {
    if (op == "discrete") return OperatorKind::discrete;
    if (op == "durrmeyer") return OperatorKind::durrmeyer;
    if (op == "szasz" || op == "szasz_durrmeyer" || op == "szasz-durrmeyer") {
        return OperatorKind::szasz_durrmeyer;
    }
    throw std::invalid_argument("unknown operator kind: " + op);
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (base_dir.empty() || path.empty()) return path;
    if (std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base_dir) / path).string();
}

std::string fmt_sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

OperatorConfig operator_config(const ExperimentSpec& spec, int n) {
    OperatorConfig cfg;
    cfg.kind = parse_op(spec.op);
    cfg.n = n;
    cfg.trunc_eps = spec.trunc_eps;
    cfg.quad.rel_tol = spec.quad_rel_tol;
    return cfg;
}

/// mu2 matching cfg.kind: closed form where one exists, operator evaluation
/// for the Gamma-kernel variant.
double second_central_moment(const BoasBuckSystem& sys, const OperatorConfig& cfg, double x) {
    double mu2 = 0.0;
    if (cfg.kind == OperatorKind::durrmeyer) {
        mu2 = central_moments(sys, cfg.n, x).mu2;
    } else if (cfg.kind == OperatorKind::discrete) {
        const MomentTriple m = discrete_moments(sys, cfg.n, x);
        mu2 = m.m2 - 2.0 * x * m.m1 + x * x;
    } else {
        const ScalarFn centered_sq = [x](double s) { return (s - x) * (s - x); };
        mu2 = apply(sys, cfg, centered_sq, x).value;
    }
    return std::max(0.0, mu2);
}

[[noreturn]] void rethrow_with_cell(const std::string& check, int n, double x,
                                    const std::exception& e) {
    std::ostringstream os;
    os << check << " at n=" << n << " x=" << x << ": " << e.what();
    throw Error(os.str());
}

double cell_value(const std::string& check, const BoasBuckSystem& sys, const OperatorConfig& cfg,
                  const ScalarFn& f, double x) {
    try {
        return apply(sys, cfg, f, x).value;
    } catch (const Error& e) {
        rethrow_with_cell(check, cfg.n, x, e);
    }
}

std::string tag(const ExperimentSpec& spec, const std::string& check) {
    return check + "[" + spec.fn + "@" + spec.system + "]";
}

} // namespace

void ExperimentSpec::validate() const {
    if (system.empty()) throw std::invalid_argument("experiment: system must be set");
    parse_op(op);
    if (fn.empty()) throw std::invalid_argument("experiment: fn must be set");
    if (n_grid.empty()) throw std::invalid_argument("experiment: n_grid must be nonempty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw std::invalid_argument("experiment: n_grid entries must be >= 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw std::invalid_argument("experiment: n_grid must be sorted ascending");
        }
    }
    if (x_grid.empty()) throw std::invalid_argument("experiment: x_grid must be nonempty");
    for (double x : x_grid) {
        if (!(x >= 0.0) || !(x <= 1e6)) {
            throw std::invalid_argument("experiment: x_grid entries must lie in [0, 1e6]");
        }
    }
    if (checks.empty()) throw std::invalid_argument("experiment: checks must be nonempty");
    for (const auto& c : checks) {
        if (!known_check(normalize_check(c))) {
            throw std::invalid_argument("experiment: unknown check \"" + c + "\"");
        }
    }
    if (!(lip_r > 0.0) || lip_r > 1.0) {
        throw std::invalid_argument("experiment: lip_r must be in (0,1]");
    }
    for (double g : dt_gammas) {
        if (!(g >= 0.0) || g > 1.0) {
            throw std::invalid_argument("experiment: dt_gammas must lie in [0,1]");
        }
    }
    if (!(weighted_alpha > 0.0)) {
        throw std::invalid_argument("experiment: weighted_alpha must be > 0");
    }
    for (double t : weighted_tols) {
        if (!(t > 0.0)) throw std::invalid_argument("experiment: weighted_tols must be > 0");
    }
    if (!(bv_x > 0.0)) throw std::invalid_argument("experiment: bv_x must be > 0");
    if (!(trunc_eps > 0.0) || trunc_eps > 1e-3) {
        throw std::invalid_argument("experiment: trunc_eps must be in (0, 1e-3]");
    }
    if (!(quad_rel_tol > 0.0) || quad_rel_tol > 1e-3) {
        throw std::invalid_argument("experiment: quad_rel_tol must be in (0, 1e-3]");
    }
    if (!(uniform_final_tol > 0.0)) {
        throw std::invalid_argument("experiment: uniform_final_tol must be > 0");
    }
}

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text,
                                              const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("experiment JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("experiment JSON: expected an object");
    ExperimentSpec spec;
    try {
        spec.system = j.value("system", spec.system);
        spec.op = j.value("op", spec.op);
        spec.fn = j.value("fn", spec.fn);
        if (j.contains("n_grid")) spec.n_grid = j.at("n_grid").get<std::vector<int>>();
        if (j.contains("x_grid")) spec.x_grid = j.at("x_grid").get<std::vector<double>>();
        if (j.contains("checks")) spec.checks = j.at("checks").get<std::vector<std::string>>();
        spec.lip_r = j.value("lip_r", spec.lip_r);
        if (j.contains("dt_gammas")) {
            spec.dt_gammas = j.at("dt_gammas").get<std::vector<double>>();
        }
        spec.weighted_alpha = j.value("weighted_alpha", spec.weighted_alpha);
        if (j.contains("weighted_tols")) {
            const auto tols = j.at("weighted_tols").get<std::vector<double>>();
            if (tols.size() != 3) {
                throw std::invalid_argument("experiment: weighted_tols needs 3 entries");
            }
            std::copy(tols.begin(), tols.end(), spec.weighted_tols.begin());
        }
        spec.bv_x = j.value("bv_x", spec.bv_x);
        spec.trunc_eps = j.value("trunc_eps", spec.trunc_eps);
        spec.quad_rel_tol = j.value("quad_rel_tol", spec.quad_rel_tol);
        spec.uniform_final_tol = j.value("uniform_final_tol", spec.uniform_final_tol);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("experiment JSON: ") + e.what());
    }
    for (auto& c : spec.checks) c = normalize_check(c);
    if (spec.system != "exp_quadratic" && spec.system != "exp_cubic") {
        spec.system = resolve_path(spec.system, base_dir);
    }
    if (spec.fn.rfind("pw:", 0) == 0) {
        spec.fn = "pw:" + resolve_path(spec.fn.substr(3), base_dir);
    }
    spec.validate();
    return spec;
}

std::vector<ExperimentSpec> load_experiment_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": JSON parse error: " + e.what());
    }
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    std::vector<ExperimentSpec> specs;
    if (j.is_array()) {
        for (const auto& item : j) {
            specs.push_back(ExperimentSpec::from_json_text(item.dump(), base_dir));
        }
    } else {
        specs.push_back(ExperimentSpec::from_json_text(j.dump(), base_dir));
    }
    return specs;
}

RateFit fit_rate(const std::vector<int>& n_grid, const std::vector<double>& errors) {
    RateFit fit;
    if (n_grid.size() != errors.size() || n_grid.empty()) return fit;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = n_grid.size() / 2; i < n_grid.size(); ++i) {
        if (errors[i] > 1e-14) {
            lx.push_back(std::log(static_cast<double>(n_grid[i])));
            ly.push_back(std::log(errors[i]));
        }
    }
    if (lx.size() < 2) return fit;
    const double m = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = m * sxx - sx * sx;
    if (std::fabs(denom) < 1e-12) return fit;
    fit.exponent = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / m;
    double rss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / m);
    fit.valid = true;
    return fit;
}

CatalogFunction catalog_function(const std::string& id, const std::string& base_dir) {
    CatalogFunction c;
    c.id = id;
    if (id == "one") {
        c.f = [](double) { return 1.0; };
        c.growth = {1.0, 0.0};
    } else if (id == "s") {
        c.f = [](double s) { return s; };
        c.growth = {1.0, 1.0};
    } else if (id == "s2") {
        c.f = [](double s) { return s * s; };
        c.growth = {1.0, 2.0};
    } else if (id == "sqrt") {
        c.f = [](double s) { return std::sqrt(s); };
        c.growth = {1.0, 1.0};
    } else if (id == "expneg") {
        c.f = [](double s) { return std::exp(-s); };
        c.growth = {1.0, 0.0};
    } else if (id == "abs1") {
        c.piecewise = PiecewiseFunction::abs_deviation(1.0, 0.0, 1e6);
        c.f = c.piecewise->fn();
        c.growth = {1.0, 1.0};
    } else if (id.rfind("pw:", 0) == 0) {
        c.piecewise = PiecewiseFunction::from_json_file(resolve_path(id.substr(3), base_dir));
        c.f = c.piecewise->fn();
        double m = 1.0;
        double sigma = 0.0;
        for (const auto& p : c.piecewise->pieces()) {
            double coeff_sum = 0.0;
            for (double v : p.coeffs) coeff_sum += std::fabs(v);
            m = std::max(m, coeff_sum);
            sigma = std::max(sigma, static_cast<double>(p.coeffs.size()) - 1.0);
        }
        c.growth = {m, sigma};
    } else {
        throw std::invalid_argument("unknown function id: " + id);
    }
    return c;
}

BoasBuckSystem load_system(const std::string& name_or_path, const std::string& base_dir) {
    if (name_or_path == "exp_quadratic") return make_exp_quadratic_system();
    if (name_or_path == "exp_cubic") return make_exp_cubic_system();
    return BoasBuckSystem::from_json_file(resolve_path(name_or_path, base_dir));
}

ExperimentResult run_uniform_convergence(const ExperimentSpec& spec) {
    spec.validate();
    const BoasBuckSystem sys = load_system(spec.system);
    const CatalogFunction cat = catalog_function(spec.fn);
    ExperimentResult res;
    std::vector<double> sup_errs;
    for (int n : spec.n_grid) {
        const OperatorConfig cfg = operator_config(spec, n);
        double sup = 0.0;
        for (double x : spec.x_grid) {
            const double v = cell_value("uniform", sys, cfg, cat.f, x);
            const double fx = cat.f(x);
            const double err = std::fabs(v - fx);
            sup = std::max(sup, err);
            res.rows.push_back({"uniform", sys.name(), spec.fn, n, x, v, fx, err, 0.0, 0.0, ""});
        }
        sup_errs.push_back(sup);
        res.notes.push_back(tag(spec, "uniform") + " n=" + std::to_string(n) +
                            " sup_err=" + fmt_short(sup));
    }
    for (std::size_t i = 1; i < sup_errs.size(); ++i) {
        if (sup_errs[i] > 1.1 * sup_errs[i - 1] + 1e-8) {
            res.failures.push_back(tag(spec, "uniform") + ": sup error rose from " +
                                   fmt_short(sup_errs[i - 1]) + " (n=" +
                                   std::to_string(spec.n_grid[i - 1]) + ") to " +
                                   fmt_short(sup_errs[i]) + " (n=" +
                                   std::to_string(spec.n_grid[i]) + ")");
        }
    }
    if (sup_errs.back() > spec.uniform_final_tol) {
        res.failures.push_back(tag(spec, "uniform") + ": final sup error " +
                               fmt_short(sup_errs.back()) + " exceeds tolerance " +
                               fmt_short(spec.uniform_final_tol));
    }
    const RateFit fit = fit_rate(spec.n_grid, sup_errs);
    if (fit.valid) {
        res.notes.push_back(tag(spec, "uniform") + " rate exponent=" + fmt_short(fit.exponent) +
                            " residual=" + fmt_short(fit.residual));
    }
    return res;
}

ExperimentResult run_modulus_bound(const ExperimentSpec& spec) {
    spec.validate();
    const BoasBuckSystem sys = load_system(spec.system);
    const CatalogFunction cat = catalog_function(spec.fn);
    const double dom_hi = *std::max_element(spec.x_grid.begin(), spec.x_grid.end()) + 2.0;
    ExperimentResult res;
    std::vector<double> max_errs;
    int violations = 0;
    double worst_margin = 0.0;
    for (int n : spec.n_grid) {
        const OperatorConfig cfg = operator_config(spec, n);
        double max_err = 0.0;
        for (double x : spec.x_grid) {
            const double v = cell_value("modulus", sys, cfg, cat.f, x);
            const double fx = cat.f(x);
            const double err = std::fabs(v - fx);
            max_err = std::max(max_err, err);
            const double delta = std::sqrt(second_central_moment(sys, cfg, x));
            const ModulusResult w = modulus_classical(cat.f, delta, 0.0, dom_hi);
            const double bound = 2.0 * w.value + 2.0 * w.resolution;
            double ratio = 0.0;
            if (bound > 0.0) {
                ratio = err / bound;
            } else if (err > 1e-12) {
                ratio = std::numeric_limits<double>::infinity();
            }
            if (err > bound && err > 1e-12) {
                ++violations;
                worst_margin = std::max(worst_margin, err - bound);
            }
            res.rows.push_back({"modulus", sys.name(), spec.fn, n, x, v, fx, err, bound, ratio,
                                "delta=" + fmt_short(delta) + ";omega=" + fmt_short(w.value)});
        }
        max_errs.push_back(max_err);
    }
    if (violations > 0) {
        res.failures.push_back(tag(spec, "modulus") + ": " + std::to_string(violations) +
                               " cells exceed 2*omega + slack, worst margin " +
                               fmt_short(worst_margin));
    }
    const RateFit fit = fit_rate(spec.n_grid, max_errs);
    if (fit.valid) {
        res.notes.push_back(tag(spec, "modulus") + " rate exponent=" + fmt_short(fit.exponent) +
                            " residual=" + fmt_short(fit.residual));
    }
    return res;
}

ExperimentResult run_lipschitz_bound(const ExperimentSpec& spec) {
    spec.validate();
    for (double x : spec.x_grid) {
        if (!(x > 0.0)) {
            throw std::invalid_argument("lipschitz check: x_grid must be strictly positive");
        }
    }
    const BoasBuckSystem sys = load_system(spec.system);
    const CatalogFunction cat = catalog_function(spec.fn);
    const double x_lo = *std::min_element(spec.x_grid.begin(), spec.x_grid.end());
    const double hi = *std::max_element(spec.x_grid.begin(), spec.x_grid.end()) + 2.0;
    const double k_fit = lipschitz_fit(cat.f, spec.lip_r, x_lo, hi);
    ExperimentResult res;
    res.notes.push_back(tag(spec, "lipschitz") + " K_fit=" + fmt_short(k_fit) +
                        " r=" + fmt_short(spec.lip_r));
    int violations = 0;
    for (int n : spec.n_grid) {
        const OperatorConfig cfg = operator_config(spec, n);
        for (double x : spec.x_grid) {
            const double v = cell_value("lipschitz", sys, cfg, cat.f, x);
            const double fx = cat.f(x);
            const double err = std::fabs(v - fx);
            const double mu2 = second_central_moment(sys, cfg, x);
            const double bound =
                k_fit / std::pow(x, 0.5 * spec.lip_r) * std::pow(mu2, 0.5 * spec.lip_r);
            double ratio = 0.0;
            if (bound > 0.0) {
                ratio = err / bound;
            } else if (err > 1e-12) {
                ratio = std::numeric_limits<double>::infinity();
            }
            if (ratio > 1.05) ++violations;
            res.rows.push_back(
                {"lipschitz", sys.name(), spec.fn, n, x, v, fx, err, bound, ratio, ""});
        }
    }
    if (violations > 0) {
        res.failures.push_back(tag(spec, "lipschitz") + ": " + std::to_string(violations) +
                               " cells with ratio above 1.05");
    }
    return res;
}

ExperimentResult run_dt_bound(const ExperimentSpec& spec) {
    spec.validate();
    const BoasBuckSystem sys = load_system(spec.system);
    const CatalogFunction cat = catalog_function(spec.fn);
    const double dom_hi = 1.5 * *std::max_element(spec.x_grid.begin(), spec.x_grid.end()) + 4.0;
    const std::size_t k = spec.n_grid.size();
    const std::size_t third = (k + 2) / 3;
    ExperimentResult res;
    for (double gamma : spec.dt_gammas) {
        double early_max = 0.0;
        double late_max = 0.0;
        int usable = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const int n = spec.n_grid[i];
            const OperatorConfig cfg = operator_config(spec, n);
            for (double x : spec.x_grid) {
                const double v = cell_value("dt", sys, cfg, cat.f, x);
                const double fx = cat.f(x);
                const double err = std::fabs(v - fx);
                const double delta =
                    std::pow(dt_step_weight(x), 1.0 - gamma) / std::sqrt(static_cast<double>(n));
                const ModulusResult w = modulus_ditzian_totik(cat.f, delta, gamma, 0.0, dom_hi);
                std::string note = "gamma=" + fmt_short(gamma);
                double ratio = 0.0;
                if (w.value < 1e-14) {
                    note += ";degenerate modulus, skipped";
                } else {
                    ratio = err / w.value;
                    ++usable;
                    if (i < third) early_max = std::max(early_max, ratio);
                    if (i + third >= k) late_max = std::max(late_max, ratio);
                }
                res.rows.push_back(
                    {"dt", sys.name(), spec.fn, n, x, v, fx, err, w.value, ratio, note});
            }
        }
        if (usable > 0 && late_max > 2.0 * early_max + 1e-12) {
            res.failures.push_back(tag(spec, "dt") + " gamma=" + fmt_short(gamma) +
                                   ": ratio grows (late max " + fmt_short(late_max) +
                                   " vs early max " + fmt_short(early_max) + ")");
        }
        res.notes.push_back(tag(spec, "dt") + " gamma=" + fmt_short(gamma) + " early_max=" +
                            fmt_short(early_max) + " late_max=" + fmt_short(late_max));
    }
    return res;
}

ExperimentResult run_weighted_convergence(const ExperimentSpec& spec) {
    spec.validate();
    const BoasBuckSystem sys = load_system(spec.system);
    ExperimentResult res;
    const std::array<std::string, 3> ids = {"one", "s", "s2"};
    for (int r = 0; r < 3; ++r) {
        const CatalogFunction cat = catalog_function(ids[static_cast<std::size_t>(r)]);
        std::vector<double> norms;
        for (int n : spec.n_grid) {
            const OperatorConfig cfg = operator_config(spec, n);
            double norm = 0.0;
            for (double x : spec.x_grid) {
                const double v = cell_value("weighted", sys, cfg, cat.f, x);
                const double fx = cat.f(x);
                const double werr = std::fabs(v - fx) / (1.0 + x * x);
                norm = std::max(norm, werr);
                res.rows.push_back({"weighted", sys.name(), cat.id, n, x, v, fx, werr, 0.0, 0.0,
                                    "r=" + std::to_string(r)});
            }
            norms.push_back(norm);
        }
        const double tol = spec.weighted_tols[static_cast<std::size_t>(r)];
        for (std::size_t i = 1; i < norms.size(); ++i) {
            if (norms[i] > 1.1 * norms[i - 1] + 1e-8) {
                res.failures.push_back(tag(spec, "weighted") + " r=" + std::to_string(r) +
                                       ": norm rose from " + fmt_short(norms[i - 1]) + " to " +
                                       fmt_short(norms[i]) + " at n=" +
                                       std::to_string(spec.n_grid[i]));
            }
        }
        if (norms.back() > tol) {
            res.failures.push_back(tag(spec, "weighted") + " r=" + std::to_string(r) +
                                   ": final norm " + fmt_short(norms.back()) +
                                   " exceeds tolerance " + fmt_short(tol));
        }
        res.notes.push_back(tag(spec, "weighted") + " r=" + std::to_string(r) +
                            " final_norm=" + fmt_short(norms.back()));
    }
    // Corollary-style diagnostic for the spec's own function: error against
    // the stronger weight (1+x²)^{1+alpha}; reported, not asserted.
    const CatalogFunction cat = catalog_function(spec.fn);
    std::vector<double> cor_norms;
    for (int n : spec.n_grid) {
        const OperatorConfig cfg = operator_config(spec, n);
        double norm = 0.0;
        for (double x : spec.x_grid) {
            const double v = cell_value("weighted", sys, cfg, cat.f, x);
            const double fx = cat.f(x);
            const double werr =
                std::fabs(v - fx) / std::pow(1.0 + x * x, 1.0 + spec.weighted_alpha);
            norm = std::max(norm, werr);
            res.rows.push_back({"weighted", sys.name(), spec.fn, n, x, v, fx, werr, 0.0, 0.0,
                                "corollary alpha=" + fmt_short(spec.weighted_alpha)});
        }
        cor_norms.push_back(norm);
    }
    res.notes.push_back(tag(spec, "weighted") + " corollary final_norm=" +
                        fmt_short(cor_norms.back()));
    return res;
}

ExperimentResult run_bv_decay(const ExperimentSpec& spec) {
    spec.validate();
    if (parse_op(spec.op) != OperatorKind::durrmeyer) {
        throw std::invalid_argument("bv check: operator must be durrmeyer");
    }
    const BoasBuckSystem sys = load_system(spec.system);
    const CatalogFunction cat = catalog_function(spec.fn);
    if (!cat.piecewise) {
        throw std::invalid_argument("bv check: fn must be a piecewise descriptor (abs1 or pw:)");
    }
    const PiecewiseFunction& pf = *cat.piecewise;
    const double x = spec.bv_x;
    const double jump = pf.derivative_right(x) - pf.derivative_left(x);
    ExperimentResult res;
    std::vector<double> errs;
    for (int n : spec.n_grid) {
        const OperatorConfig cfg = operator_config(spec, n);
        const double v = cell_value("bv", sys, cfg, cat.f, x);
        const double fx = cat.f(x);
        const double err = std::fabs(v - fx);
        errs.push_back(err);
        const CentralPair c = central_moments(sys, n, x);
        const double rsn = std::sqrt(static_cast<double>(n));
        const double var_left = total_variation(pf, x - x / rsn, x, x);
        const double var_right = total_variation(pf, x, x + x / rsn, x);
        double sum_left = 0.0;
        double sum_right = 0.0;
        for (int j = 1; j <= static_cast<int>(std::floor(rsn)); ++j) {
            const double rj = std::sqrt(static_cast<double>(j));
            sum_left += total_variation(pf, x - x / rj, x, x);
            sum_right += total_variation(pf, x, x + x / rj, x);
        }
        std::string note = "mu1=" + fmt_short(c.mu1) + ";mu2=" + fmt_short(c.mu2) +
                           ";var_left=" + fmt_short(var_left) +
                           ";var_right=" + fmt_short(var_right) +
                           ";sum_var_left=" + fmt_short(sum_left) +
                           ";sum_var_right=" + fmt_short(sum_right) +
                           ";jump=" + fmt_short(jump);
        res.rows.push_back({"bv", sys.name(), spec.fn, n, x, v, fx, err, 0.0, 0.0, note});
    }
    if (errs.back() >= errs.front()) {
        res.failures.push_back(tag(spec, "bv") + ": error did not decay (" +
                               fmt_short(errs.front()) + " -> " + fmt_short(errs.back()) + ")");
    }
    const RateFit fit = fit_rate(spec.n_grid, errs);
    if (fit.valid) {
        res.notes.push_back(tag(spec, "bv") + " rate exponent=" + fmt_short(fit.exponent) +
                            " residual=" + fmt_short(fit.residual));
    }
    return res;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult all;
    for (const auto& raw : spec.checks) {
        const std::string check = normalize_check(raw);
        ExperimentResult one;
        if (check == "uniform") {
            one = run_uniform_convergence(spec);
        } else if (check == "modulus") {
            one = run_modulus_bound(spec);
        } else if (check == "lipschitz") {
            one = run_lipschitz_bound(spec);
        } else if (check == "dt") {
            one = run_dt_bound(spec);
        } else if (check == "weighted") {
            one = run_weighted_convergence(spec);
        } else if (check == "bv") {
            one = run_bv_decay(spec);
        } else {
            throw std::invalid_argument("unknown check: " + raw);
        }
        all.rows.insert(all.rows.end(), one.rows.begin(), one.rows.end());
        all.failures.insert(all.failures.end(), one.failures.begin(), one.failures.end());
        all.notes.insert(all.notes.end(), one.notes.begin(), one.notes.end());
    }
    return all;
}

ExperimentResult run_suite(const std::vector<ExperimentSpec>& specs) {
    ExperimentResult all;
    for (const auto& spec : specs) {
        ExperimentResult one = run_experiment(spec);
        all.rows.insert(all.rows.end(), one.rows.begin(), one.rows.end());
        all.failures.insert(all.failures.end(), one.failures.begin(), one.failures.end());
        all.notes.insert(all.notes.end(), one.notes.begin(), one.notes.end());
    }
    return all;
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << "experiment,system,fn,n,x,op_value,f_value,abs_err,bound_value,ratio,note\n";
    for (const auto& r : result.rows) {
        out << r.experiment << ',' << r.system << ',' << r.fn << ',' << r.n << ','
            << fmt_sci(r.x) << ',' << fmt_sci(r.op_value) << ',' << fmt_sci(r.f_value) << ','
            << fmt_sci(r.abs_err) << ',' << fmt_sci(r.bound_value) << ',' << fmt_sci(r.ratio)
            << ',' << r.note << '\n';
    }
    if (!out) throw std::runtime_error("write failure on CSV: " + path);
}

} // namespace boasbuck
