#include "boasbuck/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "boasbuck/errors.hpp"

namespace boasbuck {

namespace {

/// ln2 split so that off*kLn2Hi is exact for |off| < 2^20 (33-bit mantissa).
constexpr double kLn2Hi = 0x1.62e42feep-1;
constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;

/// Normalized weights below this are positivity violations.
constexpr double kNegativityTol = -1e-9;

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

DerivativesAtOne stats_of(const std::vector<double>& coeffs, int shift) {
    if (coeffs.empty()) return {0.0, 0.0, 0.0};
    return series_derivatives_at_one(TruncatedSeries(coeffs), shift);
}

void check_finite(const std::vector<double>& coeffs, const char* family) {
    for (double c : coeffs) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument(std::string("BoasBuckSystem: ") + family +
                                        " coefficients must be finite");
        }
    }
}

/// A(1) = y^2 T(1) + y U(1) + V(1), the single evaluation shared by the
/// normalizer and p_of_x so their roundings agree.
double a_at_one(const BoasBuckSystem& sys, double y) {
    return (y * y) * sys.t_at_one().value + y * sys.u_at_one().value + sys.v_at_one().value;
}

/// Dense plain-power coefficients of A(s) = y^2 T(s) + y U(s) + V(s) up to
/// degree `deg` (structural shifts applied; a[0] is always 0).
std::vector<double> a_plain_coeffs(const BoasBuckSystem& sys, double y, int deg) {
    std::vector<double> a(static_cast<std::size_t>(deg) + 1, 0.0);
    const double y2 = y * y;
    const auto& t = sys.t_coeffs();
    const auto& u = sys.u_coeffs();
    const auto& v = sys.v_coeffs();
    for (std::size_t j = 0; j < t.size(); ++j) {
        const std::size_t k = j + 1;
        if (k <= static_cast<std::size_t>(deg)) a[k] += y2 * t[j];
    }
    for (std::size_t j = 0; j < u.size(); ++j) {
        const std::size_t k = j + 2;
        if (k <= static_cast<std::size_t>(deg)) a[k] += y * u[j];
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
        const std::size_t k = j + 3;
        if (k <= static_cast<std::size_t>(deg)) a[k] += v[j];
    }
    return a;
}

int structural_a_degree(const BoasBuckSystem& sys) {
    int deg = 0;
    if (!sys.t_coeffs().empty()) deg = std::max(deg, static_cast<int>(sys.t_coeffs().size()));
    if (!sys.u_coeffs().empty()) deg = std::max(deg, static_cast<int>(sys.u_coeffs().size()) + 1);
    if (!sys.v_coeffs().empty()) deg = std::max(deg, static_cast<int>(sys.v_coeffs().size()) + 2);
    return deg;
}

/**
 * Coefficients of F = exp(A) for polynomial A with A(0)=0, via
 * k F_k = sum_m m a_m F_{k-m}, stored as mantissa * 2^off per index so the
 * sequence survives magnitudes far beyond double range.
 */
struct ScaledExpCoeffs {
    std::vector<double> mant;
    std::vector<int> off;
    const std::vector<double>* a = nullptr;
    int deg_a = 0;

    void init(const std::vector<double>& coeffs) {
        a = &coeffs;
        deg_a = 0;
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) {
            if (coeffs[static_cast<std::size_t>(k)] != 0.0) {
                deg_a = k;
                break;
            }
        }
        mant.assign(1, 1.0);
        off.assign(1, 0);
    }

    void ensure(int upto) {
        for (int k = static_cast<int>(mant.size()); k <= upto; ++k) {
            const int base = off[static_cast<std::size_t>(k - 1)];
            double acc = 0.0;
            const int mmax = std::min(k, deg_a);
            for (int m = 1; m <= mmax; ++m) {
                const double am = (*a)[static_cast<std::size_t>(m)];
                if (am == 0.0) continue;
                const std::size_t i = static_cast<std::size_t>(k - m);
                acc += static_cast<double>(m) * am * std::ldexp(mant[i], off[i] - base);
            }
            acc /= static_cast<double>(k);
            if (acc == 0.0) {
                mant.push_back(0.0);
                off.push_back(base);
                continue;
            }
            int e = 0;
            const double nm = std::frexp(acc, &e);
            mant.push_back(nm);
            off.push_back(base + e);
        }
    }
};

/// Scaled convolution (S * F)_j: returns {mantissa, off} with value mant*2^off.
std::pair<double, int> s_convolution_at(const ScaledExpCoeffs& f, const std::vector<double>& s,
                                        int j) {
    const int kmax = std::min(j, static_cast<int>(s.size()) - 1);
    int m_off = std::numeric_limits<int>::min();
    for (int k = 0; k <= kmax; ++k) {
        if (s[static_cast<std::size_t>(k)] == 0.0) continue;
        m_off = std::max(m_off, f.off[static_cast<std::size_t>(j - k)]);
    }
    if (m_off == std::numeric_limits<int>::min()) return {0.0, 0};
    double acc = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        const double qk = s[static_cast<std::size_t>(k)];
        if (qk == 0.0) continue;
        const std::size_t i = static_cast<std::size_t>(j - k);
        acc += qk * std::ldexp(f.mant[i], f.off[i] - m_off);
    }
    return {acc, m_off};
}

} // namespace

BoasBuckSystem::BoasBuckSystem(XiKind kind, std::vector<double> xi_coeffs,
                               std::vector<double> s_coeffs, std::vector<double> t_coeffs,
                               std::vector<double> u_coeffs, std::vector<double> v_coeffs,
                               double sigma, std::string name)
    : kind_(kind),
      xi_(std::move(xi_coeffs)),
      s_(std::move(s_coeffs)),
      t_(std::move(t_coeffs)),
      u_(std::move(u_coeffs)),
      v_(std::move(v_coeffs)),
      sigma_(sigma),
      name_(std::move(name)) {
    check_finite(xi_, "xi");
    check_finite(s_, "S");
    check_finite(t_, "T");
    check_finite(u_, "U");
    check_finite(v_, "V");
    if (!(sigma_ >= 0.0)) throw std::invalid_argument("BoasBuckSystem: sigma must be >= 0");
    if (kind_ == XiKind::series_only && xi_.empty()) {
        throw std::invalid_argument("BoasBuckSystem: series-only xi requires xi_coeffs");
    }
    s1_ = stats_of(s_, 0);
    t1_ = stats_of(t_, 1);
    u1_ = stats_of(u_, 2);
    v1_ = stats_of(v_, 3);
    if (kind_ == XiKind::series_only) {
        for (std::size_t k = 1; k < xi_.size(); ++k) {
            xi_d1_coeffs_.push_back(static_cast<double>(k) * xi_[k]);
        }
        for (std::size_t k = 1; k < xi_d1_coeffs_.size(); ++k) {
            xi_d2_coeffs_.push_back(static_cast<double>(k) * xi_d1_coeffs_[k]);
        }
    }
}

namespace {

double horner(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
}

} // namespace

double BoasBuckSystem::xi(double t) const {
    if (kind_ == XiKind::exp_kind) return std::exp(t);
    return horner(xi_, t);
}

double BoasBuckSystem::xi_d1(double t) const {
    if (kind_ == XiKind::exp_kind) return std::exp(t);
    return horner(xi_d1_coeffs_, t);
}

double BoasBuckSystem::xi_d2(double t) const {
    if (kind_ == XiKind::exp_kind) return std::exp(t);
    return horner(xi_d2_coeffs_, t);
}

double BoasBuckSystem::xi_log(double t) const {
    if (kind_ == XiKind::exp_kind) return t;
    const double v = horner(xi_, t);
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DegenerateNormalizerError("xi_log: series xi is not positive at t=" +
                                        std::to_string(t));
    }
    return std::log(v);
}

double BoasBuckSystem::xi_ratio_d1(double t) const {
    if (kind_ == XiKind::exp_kind) return 1.0;
    const double v = horner(xi_, t);
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DegenerateNormalizerError("xi_ratio_d1: series xi is not positive at t=" +
                                        std::to_string(t));
    }
    return horner(xi_d1_coeffs_, t) / v;
}

double BoasBuckSystem::xi_ratio_d2(double t) const {
    if (kind_ == XiKind::exp_kind) return 1.0;
    const double v = horner(xi_, t);
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DegenerateNormalizerError("xi_ratio_d2: series xi is not positive at t=" +
                                        std::to_string(t));
    }
    return horner(xi_d2_coeffs_, t) / v;
}

BoasBuckSystem BoasBuckSystem::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("system JSON parse error: ") + e.what());
    }
    try {
        const std::string kind_str = j.at("xi_kind").get<std::string>();
        XiKind kind;
        if (kind_str == "exp") {
            kind = XiKind::exp_kind;
        } else if (kind_str == "series-only") {
            kind = XiKind::series_only;
        } else {
            throw std::invalid_argument("system JSON: xi_kind must be \"exp\" or \"series-only\"");
        }
        auto arr = [&j](const char* key) -> std::vector<double> {
            if (!j.contains(key)) return {};
            return j.at(key).get<std::vector<double>>();
        };
        const double sigma = j.contains("sigma") ? j.at("sigma").get<double>() : 2.0;
        const std::string name = j.contains("name") ? j.at("name").get<std::string>() : "";
        return BoasBuckSystem(kind, arr("xi_coeffs"), arr("s_coeffs"), arr("t_coeffs"),
                              arr("u_coeffs"), arr("v_coeffs"), sigma, name);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("system JSON: ") + e.what());
    }
}

BoasBuckSystem BoasBuckSystem::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open system file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string BoasBuckSystem::to_json_text() const {
    nlohmann::json j;
    j["xi_kind"] = (kind_ == XiKind::exp_kind) ? "exp" : "series-only";
    j["xi_coeffs"] = xi_;
    j["s_coeffs"] = s_;
    j["t_coeffs"] = t_;
    j["u_coeffs"] = u_;
    j["v_coeffs"] = v_;
    j["sigma"] = sigma_;
    j["name"] = name_;
    return j.dump(2);
}

double p_of_x(const BoasBuckSystem& sys, int n, double x) {
    if (n < 1) throw std::invalid_argument("p_of_x: n must be >= 1");
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("p_of_x: x must be >= 0");
    return a_at_one(sys, static_cast<double>(n) * x);
}

namespace {

void require_point(double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) {
        throw std::invalid_argument("kernel argument y must be finite and >= 0");
    }
}

/// Table builder for exp-kind xi. When trunc_eps > 0 the index is cut at
/// cumulative weight 1 - trunc_eps (TruncationFailureError if j_limit is hit
/// first); with trunc_eps == 0 it fills exactly j_limit + 1 entries.
ThetaTable exp_kind_table(const BoasBuckSystem& sys, double y, int j_limit, double trunc_eps) {
    const double s_one = sys.s_at_one().value;
    if (!(s_one > 0.0) || !std::isfinite(s_one)) {
        throw DegenerateNormalizerError("normalizer S(1) = " + std::to_string(s_one) +
                                        " is not positive");
    }
    const double a1 = a_at_one(sys, y);
    if (!std::isfinite(a1)) {
        throw DegenerateNormalizerError("A(1) is not finite at y=" + std::to_string(y));
    }
    const double ln_s1 = std::log(s_one);

    ThetaTable table;
    table.point = y;
    table.log_normalizer = a1 + ln_s1;

    const std::vector<double> a = a_plain_coeffs(sys, y, std::max(1, structural_a_degree(sys)));
    ScaledExpCoeffs f;
    f.init(a);

    KahanSum cum;
    bool cut_found = (trunc_eps <= 0.0);
    double worst = 0.0;
    for (int j = 0; j <= j_limit; ++j) {
        f.ensure(j);
        const auto [cmant, coff] = s_convolution_at(f, sys.s_coeffs(), j);
        double w = 0.0;
        if (cmant != 0.0) {
            // w = cmant * 2^off / (S(1) e^{A(1)}); off*kLn2Hi is exact, and the
            // large cancellation off*ln2 - A(1) happens between two clean terms.
            const double arg = (coff * kLn2Hi - a1) + (coff * kLn2Lo - ln_s1);
            w = cmant * std::exp(arg);
        }
        worst = std::min(worst, w);
        table.weights.push_back(w);
        cum.add(w);
        if (trunc_eps > 0.0 && 1.0 - cum.value() <= trunc_eps) {
            cut_found = true;
            break;
        }
    }
    if (worst < kNegativityTol) {
        throw PositivityViolationError("kernel coefficient below tolerance at y=" +
                                       std::to_string(y) + ": normalized value " +
                                       std::to_string(worst));
    }
    if (!cut_found) {
        throw TruncationFailureError("weight cumulative mass did not reach 1 - " +
                                     std::to_string(trunc_eps) + " within " +
                                     std::to_string(j_limit) + " terms at y=" +
                                     std::to_string(y));
    }
    table.tail_mass_bound = std::max(0.0, 1.0 - cum.value());
    return table;
}

/// Fixed-order table for series-only xi: Theta = S * (xi o A) at order J.
ThetaTable series_kind_table(const BoasBuckSystem& sys, double y, int J) {
    const double s_one = sys.s_at_one().value;
    const double a1 = a_at_one(sys, y);
    const double norm = s_one * sys.xi(a1);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DegenerateNormalizerError("normalizer S(1)*xi(A(1)) = " + std::to_string(norm) +
                                        " is not positive at y=" + std::to_string(y));
    }
    TruncatedSeries xi_j = TruncatedSeries::zero(J);
    for (std::size_t k = 0; k < sys.xi_coeffs().size() && k <= static_cast<std::size_t>(J); ++k) {
        xi_j[static_cast<int>(k)] = sys.xi_coeffs()[k];
    }
    TruncatedSeries a_j(a_plain_coeffs(sys, y, J));
    TruncatedSeries s_j = TruncatedSeries::zero(J);
    for (std::size_t k = 0; k < sys.s_coeffs().size() && k <= static_cast<std::size_t>(J); ++k) {
        s_j[static_cast<int>(k)] = sys.s_coeffs()[k];
    }
    const TruncatedSeries theta = series_mul(s_j, series_compose(xi_j, a_j));

    ThetaTable table;
    table.point = y;
    table.log_normalizer = std::log(norm);
    table.weights.resize(static_cast<std::size_t>(J) + 1);
    KahanSum cum;
    double worst = 0.0;
    for (int j = 0; j <= J; ++j) {
        const double w = theta.coeff(j) / norm;
        worst = std::min(worst, w);
        table.weights[static_cast<std::size_t>(j)] = w;
        cum.add(w);
    }
    if (worst < kNegativityTol) {
        throw PositivityViolationError("kernel coefficient below tolerance at y=" +
                                       std::to_string(y) + ": normalized value " +
                                       std::to_string(worst));
    }
    table.tail_mass_bound = std::max(0.0, 1.0 - cum.value());
    return table;
}

} // namespace

ThetaTable theta_values(const BoasBuckSystem& sys, double y, int J) {
    require_point(y);
    if (J < 0) throw std::invalid_argument("theta_values: J must be >= 0");
    if (sys.xi_kind() == XiKind::exp_kind) return exp_kind_table(sys, y, J, 0.0);
    return series_kind_table(sys, y, J);
}

ThetaTable weight_distribution(const BoasBuckSystem& sys, int n, double x, double trunc_eps,
                               int j_cap) {
    if (n < 1) throw std::invalid_argument("weight_distribution: n must be >= 1");
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("weight_distribution: x must be finite and >= 0");
    }
    if (!(trunc_eps > 0.0) || trunc_eps > 1e-3) {
        throw std::invalid_argument("weight_distribution: trunc_eps must be in (0, 1e-3]");
    }
    if (j_cap < 1) throw std::invalid_argument("weight_distribution: j_cap must be >= 1");
    const double y = static_cast<double>(n) * x;
    if (sys.xi_kind() == XiKind::exp_kind) return exp_kind_table(sys, y, j_cap, trunc_eps);

    // series-only: grow the composition order until the tail mass is in.
    for (int J = 256;; J *= 2) {
        if (J > j_cap) J = j_cap;
        ThetaTable table = series_kind_table(sys, y, J);
        KahanSum cum;
        for (int j = 0; j <= table.max_index(); ++j) {
            cum.add(table.weight(j));
            if (1.0 - cum.value() <= trunc_eps) {
                table.weights.resize(static_cast<std::size_t>(j) + 1);
                table.tail_mass_bound = std::max(0.0, 1.0 - cum.value());
                return table;
            }
        }
        if (J == j_cap) {
            throw TruncationFailureError(
                "weight cumulative mass did not reach 1 - " + std::to_string(trunc_eps) +
                " within " + std::to_string(j_cap) + " terms at y=" + std::to_string(y));
        }
    }
}

bool ValidationReport::passed() const {
    for (const auto& c : checks) {
        if (c.hard && !c.passed) return false;
    }
    return true;
}

std::size_t ValidationReport::warning_count() const {
    std::size_t k = 0;
    for (const auto& c : checks) {
        if (!c.hard && !c.passed) ++k;
    }
    return k;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "  ok   " : (c.hard ? "  FAIL " : "  warn ")) << c.name;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << "\n";
    }
    return os.str();
}

namespace {

std::string float_str(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void check_family_nonvanishing(ValidationReport& report, const char* label,
                               const std::vector<double>& coeffs) {
    ValidationCheck c;
    c.name = std::string(label) + " coefficients nonvanishing";
    c.hard = false;
    if (coeffs.empty()) {
        c.passed = false;
        c.detail = "family is identically zero";
    } else {
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (coeffs[k] == 0.0) {
                c.passed = false;
                c.detail = "stored coefficient " + std::to_string(k) + " is zero";
                break;
            }
        }
    }
    report.checks.push_back(std::move(c));
}

} // namespace

ValidationReport validate_system(const BoasBuckSystem& sys, int j_check, double y_max,
                                 double y_step) {
    if (j_check < 0 || !(y_step > 0.0) || !(y_max >= 0.0)) {
        throw std::invalid_argument("validate_system: bad sampling parameters");
    }
    constexpr double kTol = 1e-10;
    ValidationReport report;

    {
        ValidationCheck c{"S(1) > 0", true, true, ""};
        const double v = sys.s_at_one().value;
        c.passed = std::isfinite(v) && v > 0.0;
        c.detail = "S(1) = " + float_str(v);
        report.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c{"T'(1) = 0", true, true, ""};
        c.passed = std::fabs(sys.t_at_one().d1) <= kTol;
        c.detail = "T'(1) = " + float_str(sys.t_at_one().d1);
        report.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c{"T''(1) = 0", true, true, ""};
        c.passed = std::fabs(sys.t_at_one().d2) <= kTol;
        c.detail = "T''(1) = " + float_str(sys.t_at_one().d2);
        report.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c{"U'(1) = 1", true, true, ""};
        c.passed = std::fabs(sys.u_at_one().d1 - 1.0) <= kTol;
        c.detail = "U'(1) = " + float_str(sys.u_at_one().d1);
        report.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c{"xi >= 0 on sample grid", true, true, ""};
        double worst = std::numeric_limits<double>::infinity();
        double worst_t = 0.0;
        for (double t = 0.0; t <= y_max + 1e-12; t += y_step) {
            const double v = sys.xi(t);
            if (v < worst) {
                worst = v;
                worst_t = t;
            }
        }
        c.passed = worst >= 0.0;
        c.detail = "min xi = " + float_str(worst) + " at t = " + float_str(worst_t);
        report.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c{"Theta_j >= 0 on sample grid", true, true, ""};
        double worst = 0.0;
        double worst_y = 0.0;
        try {
            for (double y = 0.0; y <= y_max + 1e-12; y += y_step) {
                const ThetaTable t = theta_values(sys, y, j_check);
                for (int j = 0; j <= t.max_index(); ++j) {
                    if (t.weight(j) < worst) {
                        worst = t.weight(j);
                        worst_y = y;
                    }
                }
            }
            c.passed = worst >= kNegativityTol;
            c.detail = "min normalized Theta = " + float_str(worst) + " at y = " +
                       float_str(worst_y);
        } catch (const Error& e) {
            c.passed = false;
            c.detail = e.what();
        }
        report.checks.push_back(std::move(c));
    }

    if (sys.xi_kind() == XiKind::series_only) {
        check_family_nonvanishing(report, "xi", sys.xi_coeffs());
    } else {
        report.checks.push_back({"xi coefficients nonvanishing", false, true, "exp kind"});
    }
    check_family_nonvanishing(report, "S", sys.s_coeffs());
    check_family_nonvanishing(report, "T", sys.t_coeffs());

    return report;
}

BoasBuckSystem make_exp_quadratic_system() {
    return BoasBuckSystem(XiKind::exp_kind, {}, {1.0}, {}, {0.5}, {}, 2.0, "exp_quadratic");
}

BoasBuckSystem make_exp_cubic_system(int s_order) {
    if (s_order < 0) throw std::invalid_argument("make_exp_cubic_system: s_order must be >= 0");
    std::vector<double> s(static_cast<std::size_t>(s_order) + 1, 0.0);
    double c = 1.0;
    s[0] = 1.0;
    for (int k = 1; k <= s_order; ++k) {
        c /= static_cast<double>(k);
        s[static_cast<std::size_t>(k)] = c;
    }
    return BoasBuckSystem(XiKind::exp_kind, {}, std::move(s), {}, {0.5}, {1.0 / 6.0}, 2.0,
                          "exp_cubic");
}

} // namespace boasbuck
