#pragma once

#include <span>
#include <vector>

namespace boasbuck {

/**
 * Dense truncated power series sum_{k=0}^{J} c_k s^k.
 *
 * The truncation order J is part of the value: binary operations require both
 * operands to share it, and results are truncated back to it. Coefficients are
 * plain doubles; index k is the power of s.
 */
class TruncatedSeries {
public:
    /// Zero series of order 0.
    TruncatedSeries() : coeffs_(1, 0.0) {}

    /// Order is coeffs.size()-1; coeffs must be nonempty.
    explicit TruncatedSeries(std::vector<double> coeffs);

    static TruncatedSeries zero(int order);
    static TruncatedSeries constant(double c0, int order);
    /// Coefficients of exp(s): 1/k! for k <= order.
    static TruncatedSeries exponential(int order);

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    double coeff(int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
    std::span<const double> coeffs() const { return coeffs_; }

    /// Index of the lowest nonzero coefficient; order()+1 for the zero series.
    int valuation() const;
    /// Index of the highest nonzero coefficient; -1 for the zero series.
    int effective_degree() const;

    /// Copy truncated (or zero-padded) to new_order.
    TruncatedSeries truncated(int new_order) const;

    double& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }

private:
    std::vector<double> coeffs_;
};

/// a + b. Orders must match.
TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b);

/// c * a.
TruncatedSeries series_scale(double c, const TruncatedSeries& a);

/**
 * Cauchy product truncated at the common order J.
 *
 * Coefficient m of the result is accumulated in fixed index order, and terms
 * beyond each operand's effective degree are skipped, so the result for m is
 * bit-identical across runs and across larger truncation orders.
 */
TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b);

/**
 * outer(inner) truncated at the common order J, by Horner's rule over the
 * outer coefficients. inner must have valuation >= 1 (zero constant term);
 * this keeps every result coefficient a finite sum. Coefficient m of the
 * result depends only on outer/inner coefficients of index <= m, so tables
 * built at different truncation orders agree exactly on shared indices.
 */
TruncatedSeries series_compose(const TruncatedSeries& outer, const TruncatedSeries& inner);

/// Horner evaluation of the truncated polynomial at t.
double series_eval(const TruncatedSeries& a, double t);

struct DerivativesAtOne {
    double value; ///< F(1)
    double d1;    ///< F'(1)
    double d2;    ///< F''(1)
};

/**
 * Value and first two derivatives at s=1 of F(s) = sum_j c_j s^{j+shift},
 * i.e. of the stored series reinterpreted with a power shift. shift must be
 * one of 0,1,2,3 (the shifts used by the generating-function families).
 *
 *   F(1)   = sum c_j
 *   F'(1)  = sum (j+shift) c_j
 *   F''(1) = sum (j+shift)(j+shift-1) c_j
 */
DerivativesAtOne series_derivatives_at_one(const TruncatedSeries& a, int shift);

} // namespace boasbuck
