#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace boasbuck {

using ScalarFn = std::function<double(double)>;

/// Growth envelope |f(s)| <= M (1 + s^sigma).
struct GrowthBound {
    double M = 1.0;
    double sigma = 0.0;
};

/**
 * A function sampled on a strictly increasing grid, with growth metadata for
 * tail handling. eval() interpolates linearly and extends the end values.
 */
struct GridFunction {
    std::vector<double> points;
    std::vector<double> values;
    GrowthBound growth;

    GridFunction(std::vector<double> pts, std::vector<double> vals, GrowthBound g);
    static GridFunction sample(const ScalarFn& f, double lo, double hi, int count, GrowthBound g);

    double eval(double t) const;
    ScalarFn fn() const;
};

/// Modulus values are grid suprema; resolution is the x-grid step used, so
/// callers can set slack honestly.
struct ModulusResult {
    double value = 0.0;
    double resolution = 0.0;
};

/// Classical modulus of continuity sup_{|u-v|<=delta} |f(u)-f(v)| on [lo,hi],
/// grid step <= delta/16.
ModulusResult modulus_classical(const ScalarFn& f, double delta, double lo, double hi);

/**
 * Ditzian-Totik modulus with step weight phi(x)^gamma, phi(x) = sqrt(x(1+x)):
 * sup over i in (0,delta] and x with both x +- i*phi^gamma(x)/2 inside
 * [lo,hi] of the symmetric difference. gamma in [0,1]; lo >= 0.
 */
ModulusResult modulus_ditzian_totik(const ScalarFn& f, double delta, double gamma, double lo,
                                    double hi);

/// phi(x) = sqrt(x(1+x)), the Ditzian-Totik step weight.
double dt_step_weight(double x);

/**
 * Weighted modulus sup_{x in [0,x_max], 0<h<=delta} (f(x+h)-f(x)) / (1+(x+h)^2).
 * The numerator is signed by default (transcribed as displayed); pass
 * absolute_differences = true for the |.| variant.
 */
ModulusResult weighted_modulus(const ScalarFn& f, double delta, double x_max,
                               bool absolute_differences = false);

/// sup |f(x)|/(1+x^2) over a dense grid on [0, x_max]; when growth.sigma < 2
/// the analytic tail bound M(1+x^sigma)/(1+x^2) at x_max is folded in.
double weighted_norm(const ScalarFn& f, double x_max, const GrowthBound& growth = {});

/**
 * Smallest K such that |f(s)-f(x)| <= K |s-x|^r / (s+x)^{r/2} over grid pairs
 * with s in [0,hi], x in [x_lo,hi]: the max of |f(s)-f(x)| (s+x)^{r/2} / |s-x|^r.
 * r in (0,1]; x_lo > 0.
 */
double lipschitz_fit(const ScalarFn& f, double r, double x_lo, double hi);

/// One polynomial piece f(t) = sum_k coeffs[k] t^k on [lo, hi].
struct PiecewisePiece {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> coeffs;
};

/**
 * Continuous piecewise polynomial with possible derivative jumps at the
 * breakpoints. eval() extrapolates the end pieces beyond [lo, hi], so
 * descriptors like |s-1| stay valid on all of [0, inf).
 */
class PiecewiseFunction {
public:
    explicit PiecewiseFunction(std::vector<PiecewisePiece> pieces);

    /// JSON: array of {lo, hi, kind: "poly", coeffs: [...]}.
    static PiecewiseFunction from_json_text(const std::string& text);
    static PiecewiseFunction from_json_file(const std::string& path);
    /// |t - center| split at its kink.
    static PiecewiseFunction abs_deviation(double center, double lo, double hi);

    double lo() const { return pieces_.front().lo; }
    double hi() const { return pieces_.back().hi; }
    const std::vector<PiecewisePiece>& pieces() const { return pieces_; }

    double eval(double t) const;
    /// One-sided derivative limits (differ only at breakpoints).
    double derivative_left(double t) const;
    double derivative_right(double t) const;

    ScalarFn fn() const;

private:
    const PiecewisePiece& piece_at(double t) const;
    const PiecewisePiece& piece_left(double t) const;
    std::vector<PiecewisePiece> pieces_;
};

/**
 * Total variation of f' over [a, b]: per-piece monotone decomposition plus
 * |f'(z+)-f'(z-)| at interior breakpoints. The center overload applies the
 * clipping of the auxiliary function f'_x: the derivative jump at the center
 * is removed (each side is shifted by its own one-sided limit, and the value
 * at the center itself is 0, which contributes no variation).
 */
double total_variation(const PiecewiseFunction& pf, double a, double b);
double total_variation(const PiecewiseFunction& pf, double a, double b, double center);

} // namespace boasbuck
