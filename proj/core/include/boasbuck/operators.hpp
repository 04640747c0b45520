#pragma once

#include <functional>

#include "boasbuck/special.hpp"
#include "boasbuck/system.hpp"

namespace boasbuck {

using ScalarFn = std::function<double(double)>;

enum class OperatorKind { discrete, durrmeyer, szasz_durrmeyer };

/// Treatment of the index-0 term of the integral operators, whose Beta-prime
/// kernel degenerates: keep it as a point mass at 0 (default) or drop it.
enum class ZeroIndexRule { point_mass_at_zero, drop };

struct OperatorConfig {
    OperatorKind kind = OperatorKind::durrmeyer;
    int n = 10;               ///< operator index, >= 2
    double trunc_eps = 1e-12; ///< kernel weight tail cut, in (0, 1e-3]
    QuadratureSpec quad{};
    ZeroIndexRule j0 = ZeroIndexRule::point_mass_at_zero;
    int j_cap = 20000;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct ApplyResult {
    double value = 0.0;
    /// Normalized kernel mass beyond the truncation index; multiply by the
    /// growth envelope of f over the missing range for an absolute bound.
    double tail_mass = 0.0;
    int terms = 0; ///< number of kernel indices summed
};

/// Discrete operator: sum_j w_j(nx) f(j/n).
ApplyResult apply_discrete(const BoasBuckSystem& sys, const OperatorConfig& cfg, const ScalarFn& f,
                           double x);

/// Durrmeyer-type operator: index-0 rule plus sum_{j>=1} w_j(nx) E[f] under
/// Beta-prime(j, n+1).
ApplyResult apply_durrmeyer(const BoasBuckSystem& sys, const OperatorConfig& cfg, const ScalarFn& f,
                            double x);

/// Gamma-kernel variant: sum_{j>=0} w_j(nx) E[f] under Gamma(j+1, rate n).
ApplyResult apply_szasz_durrmeyer(const BoasBuckSystem& sys, const OperatorConfig& cfg,
                                  const ScalarFn& f, double x);

/// Dispatch on cfg.kind.
ApplyResult apply(const BoasBuckSystem& sys, const OperatorConfig& cfg, const ScalarFn& f,
                  double x);

/// Mass the Durrmeyer kernel measure at x places on [0, y]. cfg.kind must be
/// durrmeyer.
double kernel_cdf(const BoasBuckSystem& sys, const OperatorConfig& cfg, double x, double y);

} // namespace boasbuck
