#include "boasbuck/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "boasbuck/errors.hpp"

namespace boasbuck {

void OperatorConfig::validate() const {
    if (n < 2) throw std::invalid_argument("OperatorConfig: n must be >= 2");
    if (!(trunc_eps > 0.0) || trunc_eps > 1e-3) {
        throw std::invalid_argument("OperatorConfig: trunc_eps must be in (0, 1e-3]");
    }
    if (j_cap < 1) throw std::invalid_argument("OperatorConfig: j_cap must be >= 1");
    quad.validate();
}

namespace {

struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double v) {
        const double t = v - c;
        const double u = s + t;
        c = (u - s) - t;
        s = u;
    }
    double value() const { return s; }
};

void require_x(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("operator point x must be finite and >= 0");
    }
}

} // namespace

ApplyResult apply_discrete(const BoasBuckSystem& sys, const OperatorConfig& cfg, const ScalarFn& f,
                           double x) {
    cfg.validate();
    require_x(x);
    const ThetaTable table = weight_distribution(sys, cfg.n, x, cfg.trunc_eps, cfg.j_cap);
    const double dn = static_cast<double>(cfg.n);
    KahanSum acc;
    for (int j = 0; j <= table.max_index(); ++j) {
        acc.add(table.weight(j) * f(static_cast<double>(j) / dn));
    }
    return {acc.value(), table.tail_mass_bound, table.max_index() + 1};
}

ApplyResult apply_durrmeyer(const BoasBuckSystem& sys, const OperatorConfig& cfg, const ScalarFn& f,
                            double x) {
    cfg.validate();
    require_x(x);
    const ThetaTable table = weight_distribution(sys, cfg.n, x, cfg.trunc_eps, cfg.j_cap);
    KahanSum acc;
    if (cfg.j0 == ZeroIndexRule::point_mass_at_zero) {
        acc.add(table.weight(0) * f(0.0));
    }
    for (int j = 1; j <= table.max_index(); ++j) {
        const double w = table.weight(j);
        if (w == 0.0) continue;
        acc.add(w * beta_prime_expectation(f, j, cfg.n, cfg.quad));
    }
    return {acc.value(), table.tail_mass_bound, table.max_index() + 1};
}

ApplyResult apply_szasz_durrmeyer(const BoasBuckSystem& sys, const OperatorConfig& cfg,
                                  const ScalarFn& f, double x) {
    cfg.validate();
    require_x(x);
    const ThetaTable table = weight_distribution(sys, cfg.n, x, cfg.trunc_eps, cfg.j_cap);
    KahanSum acc;
    for (int j = 0; j <= table.max_index(); ++j) {
        const double w = table.weight(j);
        if (w == 0.0) continue;
        acc.add(w * gamma_expectation(f, j, cfg.n, cfg.quad));
    }
    return {acc.value(), table.tail_mass_bound, table.max_index() + 1};
}

ApplyResult apply(const BoasBuckSystem& sys, const OperatorConfig& cfg, const ScalarFn& f,
                  double x) {
    switch (cfg.kind) {
        case OperatorKind::discrete:
            return apply_discrete(sys, cfg, f, x);
        case OperatorKind::durrmeyer:
            return apply_durrmeyer(sys, cfg, f, x);
        case OperatorKind::szasz_durrmeyer:
            return apply_szasz_durrmeyer(sys, cfg, f, x);
    }
    throw std::invalid_argument("apply: unknown operator kind");
}

double kernel_cdf(const BoasBuckSystem& sys, const OperatorConfig& cfg, double x, double y) {
    cfg.validate();
    require_x(x);
    if (cfg.kind != OperatorKind::durrmeyer) {
        throw std::invalid_argument("kernel_cdf: cfg.kind must be durrmeyer");
    }
    if (!(y >= 0.0) || !std::isfinite(y)) {
        throw std::invalid_argument("kernel_cdf: y must be finite and >= 0");
    }
    const ThetaTable table = weight_distribution(sys, cfg.n, x, cfg.trunc_eps, cfg.j_cap);
    const double t = y / (1.0 + y);
    KahanSum acc;
    if (cfg.j0 == ZeroIndexRule::point_mass_at_zero) acc.add(table.weight(0));
    for (int j = 1; j <= table.max_index(); ++j) {
        const double w = table.weight(j);
        if (w == 0.0) continue;
        acc.add(w * regularized_incomplete_beta(static_cast<double>(j), cfg.n + 1.0, t));
    }
    return acc.value();
}

} // namespace boasbuck
