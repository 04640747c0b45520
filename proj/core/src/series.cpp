#include "boasbuck/series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "boasbuck/errors.hpp"

namespace boasbuck {

TruncatedSeries::TruncatedSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        throw std::invalid_argument("TruncatedSeries: coefficient vector must be nonempty");
    }
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("TruncatedSeries: coefficients must be finite");
        }
    }
}

TruncatedSeries TruncatedSeries::zero(int order) {
    if (order < 0) throw std::invalid_argument("TruncatedSeries::zero: order must be >= 0");
    return TruncatedSeries(std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
}

TruncatedSeries TruncatedSeries::constant(double c0, int order) {
    TruncatedSeries r = zero(order);
    r[0] = c0;
    return r;
}

TruncatedSeries TruncatedSeries::exponential(int order) {
    TruncatedSeries r = zero(order);
    double c = 1.0;
    r[0] = 1.0;
    for (int k = 1; k <= order; ++k) {
        c /= static_cast<double>(k);
        r[k] = c;
    }
    return r;
}

int TruncatedSeries::valuation() const {
    for (int k = 0; k <= order(); ++k) {
        if (coeffs_[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return order() + 1;
}

int TruncatedSeries::effective_degree() const {
    for (int k = order(); k >= 0; --k) {
        if (coeffs_[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return -1;
}

TruncatedSeries TruncatedSeries::truncated(int new_order) const {
    TruncatedSeries r = zero(new_order);
    const int m = std::min(order(), new_order);
    for (int k = 0; k <= m; ++k) r[k] = coeff(k);
    return r;
}

namespace {

void require_same_order(const TruncatedSeries& a, const TruncatedSeries& b, const char* op) {
    if (a.order() != b.order()) {
        throw OrderMismatchError(std::string(op) + ": operands truncated at different orders (" +
                                 std::to_string(a.order()) + " vs " + std::to_string(b.order()) +
                                 ")");
    }
}

} // namespace

TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_order(a, b, "series_add");
    TruncatedSeries r = TruncatedSeries::zero(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a.coeff(k) + b.coeff(k);
    return r;
}

TruncatedSeries series_scale(double c, const TruncatedSeries& a) {
    TruncatedSeries r = TruncatedSeries::zero(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = c * a.coeff(k);
    return r;
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_order(a, b, "series_mul");
    const int J = a.order();
    const int da = a.effective_degree();
    const int db = b.effective_degree();
    TruncatedSeries r = TruncatedSeries::zero(J);
    if (da < 0 || db < 0) return r;
    for (int m = 0; m <= J; ++m) {
        // c_m = sum_{i} a_i b_{m-i}, i ascending; skip structurally absent terms.
        const int ilo = std::max(0, m - db);
        const int ihi = std::min(m, da);
        double acc = 0.0;
        for (int i = ilo; i <= ihi; ++i) acc += a.coeff(i) * b.coeff(m - i);
        r[m] = acc;
    }
    return r;
}

TruncatedSeries series_compose(const TruncatedSeries& outer, const TruncatedSeries& inner) {
    require_same_order(outer, inner, "series_compose");
    if (inner.order() >= 0 && inner.coeff(0) != 0.0) {
        throw CompositionDomainError(
            "series_compose: inner series must have zero constant term, got " +
            std::to_string(inner.coeff(0)));
    }
    const int J = outer.order();
    // Horner: r <- r*inner + outer_k, from the top coefficient down.
    TruncatedSeries r = TruncatedSeries::constant(outer.coeff(J), J);
    for (int k = J - 1; k >= 0; --k) {
        r = series_mul(r, inner);
        r[0] += outer.coeff(k);
    }
    return r;
}

double series_eval(const TruncatedSeries& a, double t) {
    double acc = 0.0;
    for (int k = a.order(); k >= 0; --k) acc = acc * t + a.coeff(k);
    return acc;
}

DerivativesAtOne series_derivatives_at_one(const TruncatedSeries& a, int shift) {
    if (shift < 0 || shift > 3) {
        throw std::invalid_argument("series_derivatives_at_one: shift must be in {0,1,2,3}");
    }
    DerivativesAtOne d{0.0, 0.0, 0.0};
    for (int j = 0; j <= a.order(); ++j) {
        const double c = a.coeff(j);
        const double p = static_cast<double>(j + shift);
        d.value += c;
        d.d1 += p * c;
        d.d2 += p * (p - 1.0) * c;
    }
    return d;
}

} // namespace boasbuck
