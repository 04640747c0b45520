#pragma once

#include <string>
#include <vector>

#include "boasbuck/operators.hpp"
#include "boasbuck/system.hpp"

namespace boasbuck {

/// Raw moments of an operator at a point: values on the test functions 1, s, s².
struct MomentTriple {
    double m0 = 1.0;
    double m1 = 0.0;
    double m2 = 0.0;
};

/// Central moments: values on (s - x) and (s - x)².
struct CentralPair {
    double mu1 = 0.0;
    double mu2 = 0.0;
};

/**
 * Closed-form moments of the discrete operator at x. Built from the cached
 * series statistics at s=1 and the xi-derivative ratios at p(x).
 * Throws DegenerateNormalizerError when xi(p(x)) is not positive.
 */
MomentTriple discrete_moments(const BoasBuckSystem& sys, int n, double x);

/**
 * Closed-form moments of the Durrmeyer-type operator (n >= 2). The second
 * moment is the form consistent with the exact recurrence
 * m2~ = (n * m2 + m1) / (n - 1) applied to the discrete moments.
 */
MomentTriple durrmeyer_moments(const BoasBuckSystem& sys, int n, double x);

/**
 * Diagnostic variant of the Durrmeyer second moment whose constant term uses
 * (V''(1))^2 in place of (V'(1))^2. The two versions coincide whenever
 * V''(1) = ±V'(1) (in particular for V = 0); on systems with a genuine cubic
 * V they differ, and only durrmeyer_moments satisfies the recurrence above.
 * Kept so the discrepancy can be measured rather than silently dropped.
 */
double durrmeyer_m2_as_displayed(const BoasBuckSystem& sys, int n, double x);

/// Closed-form central moments of the Durrmeyer-type operator (n >= 2).
/// Algebraically equal to mu1 = m1 - x, mu2 = m2 - 2x*m1 + x².
CentralPair central_moments(const BoasBuckSystem& sys, int n, double x);

/**
 * Closed forms next to their operator-evaluated counterparts (discrete sums
 * resp. kernel quadrature on 1, s, s², s-x, (s-x)²), with the worst absolute
 * and relative |applied - closed| discrepancies.
 */
struct MomentReport {
    int n = 0;
    double x = 0.0;
    MomentTriple discrete_closed;
    MomentTriple durrmeyer_closed;
    CentralPair central_closed;
    MomentTriple discrete_applied;
    MomentTriple durrmeyer_applied;
    CentralPair central_applied;
    double max_abs_discrepancy = 0.0;
    /// max over the eight pairs of |applied - closed| / (1 + |closed|).
    double max_rel_discrepancy = 0.0;

    std::string summary() const;
};

/// cfg.n and cfg.kind's quadrature settings drive the applied columns; the
/// closed forms assume the point-mass index-0 rule.
MomentReport moment_report(const BoasBuckSystem& sys, const OperatorConfig& cfg, double x);

/**
 * Large-n limit data at a fixed x > 0:
 *   ell1 = lim n (xi'(p)/xi(p) - 1),
 *   eta1 = lim n * mu2(n, x),
 *   ell2 = (eta1 - (2 + U''(1)) x) / x²   so that eta1 = ell2 x² + (2+U''(1)) x,
 *   m_bound = max over the grid of n * mu2 / (x (x+1)).
 */
struct LimitEstimates {
    double ell1 = 0.0;
    double ell2 = 0.0;
    double eta1 = 0.0;
    double m_bound = 0.0;
};

/**
 * Estimates the limits by Richardson extrapolation (model a + b/n on the two
 * largest grid entries). n_grid must be strictly increasing with n >= 2 and
 * at least two entries; a roughly geometric grid such as {10,20,...,640} makes
 * the divergence screen meaningful: if the last difference of either sequence
 * fails to shrink, LimitEstimateFailureError is thrown.
 */
LimitEstimates limit_estimates(const BoasBuckSystem& sys, double x, const std::vector<int>& n_grid);

} // namespace boasbuck
