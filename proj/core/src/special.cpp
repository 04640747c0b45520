#include "boasbuck/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "boasbuck/errors.hpp"

namespace boasbuck {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Log-density drop (in e-folds) delimiting the effective support.
constexpr double kSupportDrop = 70.0;

/// Max intervals processed by the adaptive fallback before giving up.
constexpr int kMaxAdaptiveIntervals = 100000;

} // namespace

void QuadratureSpec::validate() const {
    if (nodes < 8) throw std::invalid_argument("QuadratureSpec: nodes must be >= 8");
    if (!(rel_tol > 0.0) || rel_tol > 1e-3) {
        throw std::invalid_argument("QuadratureSpec: rel_tol must be in (0, 1e-3]");
    }
    if (!(domain_cap > 0.0)) throw std::invalid_argument("QuadratureSpec: domain_cap must be > 0");
}

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw PoleError("log_beta: arguments must be positive, got a=" + std::to_string(a) +
                        " b=" + std::to_string(b));
    }
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

/// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIt = 20000;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIt; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw QuadratureFailureError("regularized_incomplete_beta: continued fraction stalled at a=" +
                                 std::to_string(a) + " b=" + std::to_string(b));
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw PoleError("regularized_incomplete_beta: shape parameters must be positive");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbt = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double beta_prime_moment_closed(int j, int n, int m) {
    if (j < 1) throw PoleError("beta_prime_moment_closed: j must be >= 1");
    if (n < 1) throw std::invalid_argument("beta_prime_moment_closed: n must be >= 1");
    if (m < 0) throw std::invalid_argument("beta_prime_moment_closed: m must be >= 0");
    if (m >= n + 1) {
        throw DivergentMomentError("beta_prime_moment_closed: moment of order " +
                                   std::to_string(m) + " diverges for kernel index n=" +
                                   std::to_string(n));
    }
    const double dj = j;
    const double dn = n;
    return std::exp(std::lgamma(dj + m) + std::lgamma(dn + 1.0 - m) - std::lgamma(dj) -
                    std::lgamma(dn + 1.0));
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int n) {
    if (n < 2) throw std::invalid_argument("gauss_legendre_rule: order must be >= 2");
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton on P_n from the Chebyshev-angle initial guess.
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    auto [pos, ok] = cache.emplace(n, std::make_pair(std::move(x), std::move(w)));
    (void)ok;
    return pos->second;
}

namespace {

using Integrand = std::function<double(double)>;

struct PanelSums {
    double value;
    double l1; ///< integral of |g|, used only for tolerance scaling
};

PanelSums gl_panel(const Integrand& g, double lo, double hi,
                   const std::pair<std::vector<double>, std::vector<double>>& rule) {
    const double c = 0.5 * (hi + lo);
    const double h = 0.5 * (hi - lo);
    double acc = 0.0;
    double accabs = 0.0;
    const auto& xs = rule.first;
    const auto& ws = rule.second;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = g(c + h * xs[i]);
        acc += ws[i] * v;
        accabs += ws[i] * std::fabs(v);
    }
    return {acc * h, accabs * h};
}

double gl_value(const Integrand& g, double lo, double hi,
                const std::pair<std::vector<double>, std::vector<double>>& rule) {
    const double c = 0.5 * (hi + lo);
    const double h = 0.5 * (hi - lo);
    double acc = 0.0;
    const auto& xs = rule.first;
    const auto& ws = rule.second;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += ws[i] * g(c + h * xs[i]);
    return acc * h;
}

double adaptive_bisection(const Integrand& g, double lo, double hi, double tol_abs) {
    const auto& r15 = gauss_legendre_rule(15);
    struct Seg {
        double lo, hi, whole;
    };
    std::vector<Seg> stack;
    stack.push_back({lo, hi, gl_value(g, lo, hi, r15)});
    const double width_total = hi - lo;
    double total = 0.0;
    int processed = 0;
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        if (++processed > kMaxAdaptiveIntervals) {
            throw QuadratureFailureError(
                "adaptive quadrature exceeded the interval budget without meeting tolerance");
        }
        const double mid = 0.5 * (s.lo + s.hi);
        const double ql = gl_value(g, s.lo, mid, r15);
        const double qr = gl_value(g, mid, s.hi, r15);
        const double q2 = ql + qr;
        const double err = std::fabs(q2 - s.whole);
        const double width = s.hi - s.lo;
        if (err <= tol_abs * (width / width_total) || width <= 1e-14 * width_total) {
            total += q2;
        } else {
            stack.push_back({s.lo, mid, ql});
            stack.push_back({mid, s.hi, qr});
        }
    }
    return total;
}

/// Fixed-rule pass with refinement estimate, falling back to bisection.
double integrate_effective(const Integrand& g, double lo, double hi, const QuadratureSpec& q) {
    if (!(hi > lo)) return 0.0;
    const auto& rule = gauss_legendre_rule(q.nodes);
    const double mid = 0.5 * (lo + hi);
    const PanelSums whole = gl_panel(g, lo, hi, rule);
    const PanelSums left = gl_panel(g, lo, mid, rule);
    const PanelSums right = gl_panel(g, mid, hi, rule);
    const double v2 = left.value + right.value;
    const double l1 = left.l1 + right.l1;
    // The error scale is the L1 mass of the integrand, not the value: for
    // cancelling integrands (f changing sign inside the support) a tolerance
    // relative to the near-zero value is unattainable fp-wise and pointless,
    // since downstream sums weight each expectation by its kernel mass.
    const double scale = std::max({std::fabs(v2), l1, std::numeric_limits<double>::min()});
    if (q.scheme == QuadratureSpec::Scheme::gauss_jacobi_mapped &&
        std::fabs(v2 - whole.value) <= q.rel_tol * scale) {
        return v2;
    }
    return adaptive_bisection(g, lo, hi, q.rel_tol * scale);
}

/**
 * Edge of the effective support: first point between t_mode and bound where
 * the unimodal log-density has dropped `drop` e-folds below its peak. Returns
 * bound itself when no such crossing exists.
 */
double support_edge(const Integrand& lr, double t_mode, double bound, double target) {
    if (bound == t_mode) return bound;
    if (lr(bound) >= target) return bound;
    double inside = t_mode;
    double outside = bound;
    double frac = 1.0 / 1024.0;
    while (frac < 1.0) {
        const double probe = t_mode + frac * (bound - t_mode);
        if (lr(probe) < target) {
            outside = probe;
            break;
        }
        inside = probe;
        frac *= 2.0;
    }
    for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (inside + outside);
        if (lr(m) >= target) {
            inside = m;
        } else {
            outside = m;
        }
    }
    return outside;
}

double expectation_on_unit_interval(const Integrand& log_density, const Integrand& g,
                                    double t_mode, double t_cap, const QuadratureSpec& q) {
    const double peak = log_density(t_mode);
    if (!std::isfinite(peak)) {
        throw QuadratureFailureError("kernel log-density is not finite at its mode");
    }
    const double target = peak - kSupportDrop;
    const double lo = support_edge(log_density, t_mode, 0.0, target);
    const double hi = support_edge(log_density, t_mode, t_cap, target);
    return integrate_effective(g, lo, hi, q);
}

} // namespace

double beta_prime_expectation(const std::function<double(double)>& f, int j, int n,
                              const QuadratureSpec& quad) {
    if (j < 1) throw PoleError("beta_prime_expectation: j must be >= 1 (kernel pole at j=0)");
    if (n < 1) throw std::invalid_argument("beta_prime_expectation: n must be >= 1");
    quad.validate();
    const double lnb = log_beta(j, n + 1.0);
    const double dj = j;
    const double dn = n;
    // Mapped variable t = s/(1+s): the weight becomes the Beta(j, n+1) density.
    const auto log_density = [dj, dn, lnb](double t) {
        const double lt = (dj > 1.0) ? (dj - 1.0) * std::log(t) : 0.0;
        return lt + dn * std::log1p(-t) - lnb;
    };
    const auto g = [&](double t) { return std::exp(log_density(t)) * f(t / (1.0 - t)); };
    const double t_cap = quad.domain_cap / (1.0 + quad.domain_cap);
    const double t_mode = std::clamp((dj - 1.0) / (dn + dj - 1.0), 0.0, t_cap);
    return expectation_on_unit_interval(log_density, g, t_mode, t_cap, quad);
}

double gamma_expectation(const std::function<double(double)>& f, int j, int n,
                         const QuadratureSpec& quad) {
    if (j < 0) throw std::invalid_argument("gamma_expectation: j must be >= 0");
    if (n < 1) throw std::invalid_argument("gamma_expectation: n must be >= 1");
    quad.validate();
    const double dj = j;
    const double dn = n;
    const double lgj = std::lgamma(dj + 1.0);
    const double lnn = std::log(dn);
    // t = s/(1+s); the -2*log1p(-t) term is the Jacobian ds/dt.
    const auto log_density = [dj, dn, lgj, lnn](double t) {
        const double s = t / (1.0 - t);
        const double lt = (dj > 0.0) ? dj * std::log(dn * s) : 0.0;
        return -dn * s + lt + lnn - lgj - 2.0 * std::log1p(-t);
    };
    const auto g = [&](double t) { return std::exp(log_density(t)) * f(t / (1.0 - t)); };
    const double t_cap = quad.domain_cap / (1.0 + quad.domain_cap);
    // Mode of the mapped integrand: root of -n s^2 + (j+2-n) s + j = 0.
    const double bq = dj + 2.0 - dn;
    const double s_mode = std::max(0.0, (bq + std::sqrt(bq * bq + 4.0 * dn * dj)) / (2.0 * dn));
    const double t_mode = std::clamp(s_mode / (1.0 + s_mode), 0.0, t_cap);
    return expectation_on_unit_interval(log_density, g, t_mode, t_cap, quad);
}

} // namespace boasbuck
