#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace boasbuck {

/**
 * Controls for kernel-expectation quadrature.
 *
 * The default scheme maps [0,inf) to the unit interval via s = t/(1-t),
 * locates the effective support of the kernel density from its log-density
 * drop-off, and applies Gauss-Legendre nodes there; a whole-vs-halves
 * refinement estimate triggers adaptive bisection when the integrand is not
 * smooth enough (kinked f). `adaptive` skips the fixed-rule pass entirely.
 */
struct QuadratureSpec {
    enum class Scheme { gauss_jacobi_mapped, adaptive };

    Scheme scheme = Scheme::gauss_jacobi_mapped;
    int nodes = 64;          ///< nodes per panel, >= 8
    double rel_tol = 1e-9;   ///< in (0, 1e-3]
    double domain_cap = 1e6; ///< integration variable capped at this value

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// log Beta(a,b) via log-gamma. a,b > 0 or PoleError.
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
/// a,b > 0 or PoleError; x outside [0,1] is clamped.
double regularized_incomplete_beta(double a, double b, double x);

/**
 * m-th raw moment of the Beta-prime(j, n+1) kernel in closed form:
 * Gamma(j+m)Gamma(n+1-m) / (Gamma(j)Gamma(n+1)), evaluated in log space.
 * j >= 1 or PoleError; m >= n+1 or m < 0 -> DivergentMomentError.
 */
double beta_prime_moment_closed(int j, int n, int m);

/// Expectation of f under the Beta-prime(j, n+1) density. j >= 1, n >= 1.
double beta_prime_expectation(const std::function<double(double)>& f, int j, int n,
                              const QuadratureSpec& quad);

/// Expectation of f under Gamma(shape j+1, rate n). j >= 0, n >= 1.
double gamma_expectation(const std::function<double(double)>& f, int j, int n,
                         const QuadratureSpec& quad);

/// Gauss-Legendre nodes and weights on [-1,1], cached per order. n >= 2.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int n);

} // namespace boasbuck
