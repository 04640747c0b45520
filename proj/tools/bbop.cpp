// bbop: command-line front end for the boasbuck library.
//
// Exit codes: 0 = all assertions passed, 1 = an assertion was violated,
// 2 = evaluation error (bad input, quadrature failure, I/O, ...).

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boasbuck/errors.hpp"
#include "boasbuck/lab.hpp"
#include "boasbuck/moments.hpp"
#include "boasbuck/operators.hpp"
#include "boasbuck/system.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitEvaluation = 2;

int cmd_validate(const std::string& system_arg) {
    const boasbuck::BoasBuckSystem sys = boasbuck::load_system(system_arg);
    const boasbuck::ValidationReport report = boasbuck::validate_system(sys);
    std::printf("%s\n", report.summary().c_str());
    return report.passed() ? kExitPass : kExitAssertion;
}

int cmd_theta(const std::string& system_arg, double y, int j_max) {
    const boasbuck::BoasBuckSystem sys = boasbuck::load_system(system_arg);
    const boasbuck::ThetaTable table = boasbuck::theta_values(sys, y, j_max);
    std::printf("point = %.12e, log-normalizer = %.12e\n", table.point, table.log_normalizer);
    std::printf("%6s %24s %24s\n", "j", "weight", "theta");
    for (int j = 0; j <= table.max_index(); ++j) {
        std::printf("%6d %24.12e %24.12e\n", j, table.weight(j), table.theta(j));
    }
    return kExitPass;
}

int cmd_moments(const std::string& system_arg, int n, double x) {
    const boasbuck::BoasBuckSystem sys = boasbuck::load_system(system_arg);
    boasbuck::OperatorConfig cfg;
    cfg.n = n;
    const boasbuck::MomentReport report = boasbuck::moment_report(sys, cfg, x);
    std::printf("%s\n", report.summary().c_str());
    if (report.max_rel_discrepancy > 1e-6) {
        std::fprintf(stderr, "closed forms and operator evaluation disagree beyond 1e-6\n");
        return kExitAssertion;
    }
    return kExitPass;
}

int cmd_apply(const std::string& system_arg, const std::string& op, const std::string& fn, int n,
              double x) {
    const boasbuck::BoasBuckSystem sys = boasbuck::load_system(system_arg);
    boasbuck::OperatorConfig cfg;
    cfg.n = n;
    if (op == "discrete") {
        cfg.kind = boasbuck::OperatorKind::discrete;
    } else if (op == "durrmeyer") {
        cfg.kind = boasbuck::OperatorKind::durrmeyer;
    } else if (op == "szasz" || op == "szasz_durrmeyer") {
        cfg.kind = boasbuck::OperatorKind::szasz_durrmeyer;
    } else {
        throw std::invalid_argument("unknown operator kind: " + op);
    }
    const boasbuck::CatalogFunction cat = boasbuck::catalog_function(fn);
    const boasbuck::ApplyResult r = boasbuck::apply(sys, cfg, cat.f, x);
    std::printf("value = %.15g\n", r.value);
    std::printf("tail_mass = %.6e, terms = %d\n", r.tail_mass, r.terms);
    return kExitPass;
}

int cmd_experiment(const std::string& spec_path, const std::string& out_path) {
    const std::vector<boasbuck::ExperimentSpec> specs =
        boasbuck::load_experiment_suite(spec_path);
    const boasbuck::ExperimentResult result = boasbuck::run_suite(specs);
    boasbuck::emit_csv(result, out_path);
    for (const auto& note : result.notes) std::printf("%s\n", note.c_str());
    std::printf("rows written: %zu -> %s\n", result.rows.size(), out_path.c_str());
    if (!result.passed()) {
        for (const auto& f : result.failures) std::fprintf(stderr, "FAIL %s\n", f.c_str());
        return kExitAssertion;
    }
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boas-Buck operator toolbox"};
    app.require_subcommand(1);

    std::string system_arg;
    std::string op = "durrmeyer";
    std::string fn = "s2";
    std::string spec_path;
    std::string out_path = "experiment.csv";
    double y = 1.0;
    double x = 1.0;
    int j_max = 32;
    int n = 10;

    auto* validate = app.add_subcommand("validate", "structural checks of a system file");
    validate->add_option("system", system_arg, "system JSON path or builtin name")->required();

    auto* theta = app.add_subcommand("theta", "kernel weight table at a point");
    theta->add_option("system", system_arg)->required();
    theta->add_option("--y", y, "evaluation point of the polynomials");
    theta->add_option("--J", j_max, "largest index")->check(CLI::PositiveNumber);

    auto* moments = app.add_subcommand("moments", "closed-form vs operator moments");
    moments->add_option("system", system_arg)->required();
    moments->add_option("--n", n)->check(CLI::Range(2, 1000000));
    moments->add_option("--x", x);

    auto* apply = app.add_subcommand("apply", "evaluate an operator on a catalog function");
    apply->add_option("system", system_arg)->required();
    apply->add_option("--op", op, "discrete | durrmeyer | szasz");
    apply->add_option("--fn", fn, "catalog function id");
    apply->add_option("--n", n)->check(CLI::Range(2, 1000000));
    apply->add_option("--x", x);

    auto* experiment = app.add_subcommand("experiment", "run an experiment spec, emit CSV");
    experiment->add_option("spec", spec_path, "experiment JSON (object or array)")->required();
    experiment->add_option("--out", out_path, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(system_arg);
        if (theta->parsed()) return cmd_theta(system_arg, y, j_max);
        if (moments->parsed()) return cmd_moments(system_arg, n, x);
        if (apply->parsed()) return cmd_apply(system_arg, op, fn, n, x);
        if (experiment->parsed()) return cmd_experiment(spec_path, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitEvaluation;
    }
    return kExitEvaluation;
}
