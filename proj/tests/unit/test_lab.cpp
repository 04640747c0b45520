#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "boasbuck/lab.hpp"
#include "boasbuck/moments.hpp"

using namespace boasbuck;

namespace {

const std::string kDataDir = BOASBUCK_DATA_DIR;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double note_rate(const std::vector<std::string>& notes, const std::string& check) {
    for (const auto& n : notes) {
        const auto at = n.find("rate exponent=");
        if (n.rfind(check, 0) == 0 && at != std::string::npos) {
            return std::stod(n.substr(at + 14));
        }
    }
    FAIL("no rate note found for ", check);
    return 0.0;
}

} // namespace

TEST_CASE("function catalog") {
    CHECK(catalog_function("one").f(3.0) == 1.0);
    CHECK(catalog_function("s").f(3.0) == 3.0);
    CHECK(catalog_function("s2").f(3.0) == 9.0);
    CHECK(catalog_function("sqrt").f(4.0) == doctest::Approx(2.0));
    CHECK(catalog_function("expneg").f(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(catalog_function("expneg").growth.sigma == 0.0);

    const CatalogFunction vee = catalog_function("abs1");
    REQUIRE(vee.piecewise.has_value());
    CHECK(vee.f(0.25) == doctest::Approx(0.75));
    CHECK(vee.f(4.0) == doctest::Approx(3.0));
    CHECK(vee.growth.sigma == 1.0);

    const CatalogFunction pw = catalog_function("pw:functions/abs1.json", kDataDir);
    REQUIRE(pw.piecewise.has_value());
    CHECK(pw.f(0.25) == doctest::Approx(0.75));
    CHECK(pw.growth.M == 2.0);    // sum of |coeffs| per piece
    CHECK(pw.growth.sigma == 1.0);

    CHECK_THROWS_AS(catalog_function("cosh"), std::invalid_argument);
    CHECK_THROWS_AS(catalog_function("pw:/nonexistent.json"), std::invalid_argument);
}

TEST_CASE("system loading: builtins and JSON paths") {
    CHECK(load_system("exp_quadratic").name() == "exp_quadratic");
    CHECK(load_system("exp_cubic").v_at_one().d1 == doctest::Approx(0.5));
    const BoasBuckSystem from_file = load_system("systems/exp_quadratic.json", kDataDir);
    CHECK(from_file.u_at_one().d1 == doctest::Approx(1.0));
    CHECK_THROWS(load_system("no_such_system.json"));
}

TEST_CASE("rate fitting") {
    const std::vector<int> grid{10, 20, 40, 80, 160, 320, 640};
    std::vector<double> errs;
    for (int n : grid) errs.push_back(7.0 / n);
    const RateFit fit = fit_rate(grid, errs);
    REQUIRE(fit.valid);
    CHECK(fit.exponent == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(fit.residual <= 1e-10);

    CHECK_FALSE(fit_rate(grid, {1.0, 2.0}).valid);
    CHECK_FALSE(fit_rate({10, 20}, {0.0, 0.0}).valid);
}

TEST_CASE("experiment spec parsing") {
    const ExperimentSpec defaults = ExperimentSpec::from_json_text("{}", "");
    CHECK(defaults.system == "exp_quadratic");
    CHECK(defaults.op == "durrmeyer");
    CHECK(defaults.fn == "s2");
    CHECK(defaults.n_grid == std::vector<int>{10, 20, 40, 80, 160, 320, 640});
    CHECK(defaults.x_grid.size() == 6);
    CHECK(defaults.checks == std::vector<std::string>{"uniform"});
    CHECK(defaults.weighted_tols[2] == 1e-2);

    const ExperimentSpec aliased = ExperimentSpec::from_json_text(
        R"({"checks": ["dt-modulus", "bv-decay"], "fn": "abs1"})", "");
    CHECK(aliased.checks == std::vector<std::string>{"dt", "bv"});

    const ExperimentSpec resolved = ExperimentSpec::from_json_text(
        R"({"system": "systems/exp_cubic.json", "fn": "pw:functions/abs1.json"})", kDataDir);
    CHECK(resolved.system == kDataDir + "/systems/exp_cubic.json");
    CHECK(resolved.fn == "pw:" + kDataDir + "/functions/abs1.json");

    CHECK_THROWS_AS(ExperimentSpec::from_json_text(R"({"checks": ["entropy"]})", ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentSpec::from_json_text(R"({"weighted_tols": [1e-8]})", ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentSpec::from_json_text(R"({"op": "bernstein"})", ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentSpec::from_json_text(R"({"n_grid": [40, 20]})", ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentSpec::from_json_text("[]", ""), std::invalid_argument);
}

TEST_CASE("suite loading resolves relative paths") {
    const auto specs = load_experiment_suite(kDataDir + "/experiments/full_suite.json");
    REQUIRE(specs.size() == 5);
    CHECK(specs[0].system == "exp_quadratic");
    CHECK(specs[0].fn == "expneg");
    const std::string& last = specs.back().system;
    CHECK(last.size() > std::string("exp_cubic.json").size());
    CHECK(last.substr(last.size() - 14) == "exp_cubic.json");
    CHECK_THROWS(load_experiment_suite(kDataDir + "/experiments/missing.json"));
}

TEST_CASE("uniform convergence runner") {
    ExperimentSpec spec;
    spec.fn = "one";
    spec.n_grid = {10, 20, 40};
    spec.x_grid = {0.25, 1.0, 5.0};
    ExperimentResult res = run_uniform_convergence(spec);
    CHECK(res.passed());
    CHECK(res.rows.size() == 9);
    for (const auto& r : res.rows) CHECK(r.abs_err <= 1e-8);

    spec.fn = "s";
    res = run_uniform_convergence(spec);
    CHECK(res.passed());
    for (const auto& r : res.rows) CHECK(r.abs_err <= 1e-7);

    // For f = s^2 the error at each cell is exactly the second central moment,
    // so the final sup error is (4 + 6) / (40 - 1); gate just above it.
    spec.fn = "s2";
    spec.x_grid = {0.5, 1.0, 2.0};
    spec.uniform_final_tol = 0.3;
    res = run_uniform_convergence(spec);
    CHECK(res.passed());
    for (const auto& r : res.rows) {
        const double mu2 = (r.x * r.x + 3.0 * r.x) / (r.n - 1.0);
        CHECK(r.abs_err == doctest::Approx(mu2).epsilon(1e-6));
    }
}

TEST_CASE("modulus bound runner on the kinked function") {
    ExperimentSpec spec;
    spec.fn = "abs1";
    spec.checks = {"modulus"};
    spec.n_grid = {10, 20, 40, 80};
    spec.x_grid = {0.5, 1.0, 2.0};
    const ExperimentResult res = run_modulus_bound(spec);
    CHECK(res.passed());
    CHECK(res.rows.size() == 12);
    for (const auto& r : res.rows) {
        CHECK(r.bound_value > 0.0);
        CHECK(r.abs_err <= r.bound_value);
        CHECK(r.note.find("delta=") != std::string::npos);
    }
    // Kink-limited smoothness: sup error decays like n^{-1/2}.
    const double rate = note_rate(res.notes, "modulus");
    CHECK(rate > -0.8);
    CHECK(rate < -0.3);
}

TEST_CASE("lipschitz bound runner on sqrt") {
    ExperimentSpec spec;
    spec.fn = "sqrt";
    spec.checks = {"lipschitz"};
    spec.n_grid = {10, 40, 160};
    spec.x_grid = {0.5, 1.0, 2.0, 5.0};
    const ExperimentResult res = run_lipschitz_bound(spec);
    CHECK(res.passed());
    bool saw_k = false;
    for (const auto& n : res.notes) saw_k = saw_k || n.find("K_fit=") != std::string::npos;
    CHECK(saw_k);
    for (const auto& r : res.rows) CHECK(r.ratio <= 1.05);

    spec.x_grid = {0.0, 1.0};
    CHECK_THROWS_AS(run_lipschitz_bound(spec), std::invalid_argument);
}

TEST_CASE("step-weighted modulus runner stays bounded") {
    ExperimentSpec spec;
    spec.fn = "expneg";
    spec.checks = {"dt"};
    spec.n_grid = {10, 20, 40};
    spec.x_grid = {0.5, 2.0};
    spec.dt_gammas = {0.0, 1.0};
    const ExperimentResult res = run_dt_bound(spec);
    CHECK(res.passed());
    CHECK(res.rows.size() == 12);
    for (const auto& r : res.rows) CHECK(r.note.find("gamma=") != std::string::npos);
}

TEST_CASE("weighted norm runner tracks the three monomials") {
    ExperimentSpec spec;
    spec.fn = "s2";
    spec.checks = {"weighted"};
    spec.n_grid = {10, 20, 40};
    spec.x_grid = {0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
    spec.weighted_tols = {1e-8, 1e-3, 6e-2}; // r=2 norm is 2/(n-1) on this system
    const ExperimentResult res = run_weighted_convergence(spec);
    CHECK(res.passed());
    int corollary_rows = 0;
    for (const auto& r : res.rows) {
        if (r.note.rfind("corollary", 0) == 0) ++corollary_rows;
    }
    CHECK(corollary_rows == 18);
    // r=2: weighted error max_x mu2/(1+x^2) = 2/(n-1), attained at x in {1,2}.
    for (const auto& r : res.rows) {
        if (r.note == "r=2" && r.x == 1.0) {
            CHECK(r.abs_err == doctest::Approx(2.0 / (r.n - 1.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("variation-decay runner at the kink") {
    ExperimentSpec spec;
    spec.fn = "abs1";
    spec.checks = {"bv"};
    spec.n_grid = {10, 20, 40};
    spec.x_grid = {1.0};
    spec.bv_x = 1.0;
    const ExperimentResult res = run_bv_decay(spec);
    CHECK(res.passed());
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[2].abs_err < res.rows[0].abs_err);
    for (const auto& r : res.rows) {
        // |s-1| around x=1: every one-sided variation of the clipped auxiliary
        // derivative vanishes and the kink jump is exactly 2.
        CHECK(r.note.find("var_left=0.000000e+00") != std::string::npos);
        CHECK(r.note.find("var_right=0.000000e+00") != std::string::npos);
        CHECK(r.note.find("sum_var_left=0.000000e+00") != std::string::npos);
        CHECK(r.note.find("jump=2.000000e+00") != std::string::npos);
    }

    spec.op = "discrete";
    CHECK_THROWS_AS(run_bv_decay(spec), std::invalid_argument);
    spec.op = "durrmeyer";
    spec.fn = "expneg";
    CHECK_THROWS_AS(run_bv_decay(spec), std::invalid_argument);
}

TEST_CASE("run_experiment concatenates its checks") {
    ExperimentSpec spec;
    spec.fn = "s";
    spec.checks = {"uniform", "modulus"};
    spec.n_grid = {10, 20};
    spec.x_grid = {0.5, 1.0};
    const ExperimentResult res = run_experiment(spec);
    CHECK(res.passed());
    CHECK(res.rows.size() == 8);
    CHECK(res.rows.front().experiment == "uniform");
    CHECK(res.rows.back().experiment == "modulus");
}

TEST_CASE("CSV emission is exact and reproducible") {
    const std::string path1 = std::string(BOASBUCK_OUT_DIR) + "/lab_test_a.csv";
    const std::string path2 = std::string(BOASBUCK_OUT_DIR) + "/lab_test_b.csv";

    ExperimentResult empty;
    emit_csv(empty, path1);
    CHECK(slurp(path1) == "experiment,system,fn,n,x,op_value,f_value,abs_err,bound_value,ratio,note\n");

    ExperimentResult one;
    one.rows.push_back({"uniform", "exp_quadratic", "s2", 10, 0.5, 0.55, 0.25, 0.3, 0.0, 0.0,
                        "k=v"});
    emit_csv(one, path1);
    emit_csv(one, path2);
    const std::string text = slurp(path1);
    CHECK(text == slurp(path2));
    CHECK(text.find("uniform,exp_quadratic,s2,10,5.000000000000e-01,5.500000000000e-01,"
                    "2.500000000000e-01,3.000000000000e-01,0.000000000000e+00,"
                    "0.000000000000e+00,k=v\n") != std::string::npos);

    CHECK_THROWS_AS(emit_csv(empty, "/nonexistent_dir/x.csv"), std::runtime_error);
}
