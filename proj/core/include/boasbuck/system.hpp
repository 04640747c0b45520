#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "boasbuck/series.hpp"

namespace boasbuck {

/// How the outer function xi is represented.
enum class XiKind {
    exp_kind,   ///< xi(t) = e^t, coefficients generated on demand
    series_only ///< xi is exactly its stored truncated series
};

/**
 * A generating system S(s) * xi(x^2 T(s) + x U(s) + V(s)) = sum_j Theta_j(x) s^j.
 *
 * Stored coefficient families use shifted powers:
 *   xi(t) = sum_j p_j t^j          (shift 0)
 *   S(s)  = sum_j q_j s^j          (shift 0)
 *   T(s)  = sum_j r_j s^{j+1}      (shift 1)
 *   U(s)  = sum_j u_j s^{j+2}      (shift 2)
 *   V(s)  = sum_j v_j s^{j+3}      (shift 3)
 * Empty vectors mean the family is identically zero.
 *
 * The structural shifts make the inner argument vanish at s=0, so every
 * Theta_j is a finite combination of stored coefficients. sigma is the growth
 * exponent of the function class the induced operators act on.
 */
class BoasBuckSystem {
public:
    BoasBuckSystem(XiKind kind, std::vector<double> xi_coeffs, std::vector<double> s_coeffs,
                   std::vector<double> t_coeffs, std::vector<double> u_coeffs,
                   std::vector<double> v_coeffs, double sigma, std::string name);

    /// Parse the JSON object format (keys xi_kind, xi_coeffs, s_coeffs,
    /// t_coeffs, u_coeffs, v_coeffs, sigma, name).
    static BoasBuckSystem from_json_text(const std::string& text);
    static BoasBuckSystem from_json_file(const std::string& path);

    XiKind xi_kind() const { return kind_; }
    double sigma() const { return sigma_; }
    const std::string& name() const { return name_; }

    const std::vector<double>& xi_coeffs() const { return xi_; }
    const std::vector<double>& s_coeffs() const { return s_; }
    const std::vector<double>& t_coeffs() const { return t_; }
    const std::vector<double>& u_coeffs() const { return u_; }
    const std::vector<double>& v_coeffs() const { return v_; }

    /// Value/first/second derivative at s=1 of the shifted families.
    const DerivativesAtOne& s_at_one() const { return s1_; }
    const DerivativesAtOne& t_at_one() const { return t1_; }
    const DerivativesAtOne& u_at_one() const { return u1_; }
    const DerivativesAtOne& v_at_one() const { return v1_; }

    /// xi and its first two derivatives. For series_only these are exact
    /// evaluations of the stored polynomial, which *is* the function.
    double xi(double t) const;
    double xi_d1(double t) const;
    double xi_d2(double t) const;
    /// log xi(t); for exp_kind this is t itself (stays finite at large t).
    double xi_log(double t) const;
    /// xi'(t)/xi(t) and xi''(t)/xi(t) in ratio form, finite wherever xi(t) is
    /// positive even when xi(t) itself overflows (both are 1 for exp_kind).
    /// Throws DegenerateNormalizerError when xi(t) is not a positive finite
    /// number for the series representation.
    double xi_ratio_d1(double t) const;
    double xi_ratio_d2(double t) const;

    std::string to_json_text() const;

private:
    XiKind kind_;
    std::vector<double> xi_, s_, t_, u_, v_;
    double sigma_;
    std::string name_;
    DerivativesAtOne s1_{}, t1_{}, u1_{}, v1_{};
    std::vector<double> xi_d1_coeffs_, xi_d2_coeffs_; // series_only only
};

/// The discrete operator's argument p(x) = n^2 x^2 T(1) + n x U(1) + V(1).
double p_of_x(const BoasBuckSystem& sys, int n, double x);

/**
 * Kernel coefficients Theta_j at a point, stored in overflow-safe form:
 * weights[j] = Theta_j(point) / normalizer with log_normalizer = ln(S(1) *
 * xi(A(1))), A(s) = point^2 T(s) + point U(s) + V(s). For valid systems the
 * weights are a (sub-)probability vector and tail_mass_bound bounds the mass
 * of the truncated indices.
 */
struct ThetaTable {
    double point = 0.0;
    std::vector<double> weights;
    double log_normalizer = 0.0;
    double tail_mass_bound = 0.0;

    int max_index() const { return static_cast<int>(weights.size()) - 1; }
    double weight(int j) const { return weights[static_cast<std::size_t>(j)]; }
    /// Raw Theta_j; overflows to inf when the normalizer exceeds double range.
    double theta(int j) const { return weight(j) * std::exp(log_normalizer); }
};

/// Kernel coefficients Theta_0..Theta_J at argument y >= 0.
/// Throws PositivityViolationError when a weight dips below -1e-9,
/// DegenerateNormalizerError when S(1)*xi(A(1)) is not a positive finite number.
ThetaTable theta_values(const BoasBuckSystem& sys, double y, int J);

/**
 * Normalized weight vector at y = n*x, truncated at the first J_cut whose
 * cumulative weight reaches 1 - trunc_eps. Throws TruncationFailureError when
 * the cap is hit first (default cap 20000).
 */
ThetaTable weight_distribution(const BoasBuckSystem& sys, int n, double x, double trunc_eps,
                               int j_cap = 20000);

struct ValidationCheck {
    std::string name;
    bool hard = true;  ///< hard checks gate operator use; soft ones only warn
    bool passed = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    /// True when every hard check passed (warnings do not count).
    bool passed() const;
    std::size_t warning_count() const;
    std::string summary() const;
};

/**
 * Structural checks: S(1) > 0, T'(1) = T''(1) = 0, U'(1) = 1 (tolerance
 * 1e-10), xi >= 0 and Theta_j(y) >= 0 sampled on y in {0, y_step, ..., y_max}
 * with indices j <= j_check. Vanishing stored coefficients of xi, S, T are
 * reported as warnings, not failures.
 */
ValidationReport validate_system(const BoasBuckSystem& sys, int j_check = 512, double y_max = 50.0,
                                 double y_step = 0.1);

/// S = 1, xi = exp, U = s^2/2: even kernel weights (y/2)^k / k!.
BoasBuckSystem make_exp_quadratic_system();
/// S = e^s (stored to s_order), xi = exp, U = s^2/2, V = s^3/6.
BoasBuckSystem make_exp_cubic_system(int s_order = 40);

} // namespace boasbuck
