#include "boasbuck/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace boasbuck {

namespace {

/// Grid sizes for the discretized suprema.
constexpr int kClassicalPairSpan = 16;   // grid step = delta / 16
constexpr int kClassicalMaxPoints = 1 << 22;
constexpr int kDtStepCount = 64;
constexpr int kDtPointCount = 512;
constexpr int kWeightedStepCount = 64;
constexpr int kWeightedPointCount = 2048;
constexpr int kNormPointCount = 4096;
constexpr int kLipschitzPointCount = 256;

} // namespace

GridFunction::GridFunction(std::vector<double> pts, std::vector<double> vals, GrowthBound g)
    : points(std::move(pts)), values(std::move(vals)), growth(g) {
    if (points.size() < 2 || points.size() != values.size()) {
        throw std::invalid_argument("GridFunction: need >= 2 matching points/values");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]) || !std::isfinite(values[i])) {
            throw std::invalid_argument("GridFunction: points and values must be finite");
        }
        if (i > 0 && !(points[i] > points[i - 1])) {
            throw std::invalid_argument("GridFunction: points must be strictly increasing");
        }
    }
}

GridFunction GridFunction::sample(const ScalarFn& f, double lo, double hi, int count,
                                  GrowthBound g) {
    if (count < 2) throw std::invalid_argument("GridFunction::sample: count must be >= 2");
    if (!(hi > lo)) throw std::invalid_argument("GridFunction::sample: need hi > lo");
    std::vector<double> pts(static_cast<std::size_t>(count));
    std::vector<double> vals(static_cast<std::size_t>(count));
    const double h = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
        const double x = lo + h * i;
        pts[static_cast<std::size_t>(i)] = x;
        vals[static_cast<std::size_t>(i)] = f(x);
    }
    return GridFunction(std::move(pts), std::move(vals), g);
}

double GridFunction::eval(double t) const {
    if (t <= points.front()) return values.front();
    if (t >= points.back()) return values.back();
    const auto it = std::upper_bound(points.begin(), points.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - points.begin());
    const double w = (t - points[i - 1]) / (points[i] - points[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

ScalarFn GridFunction::fn() const {
    return [g = *this](double t) { return g.eval(t); };
}

ModulusResult modulus_classical(const ScalarFn& f, double delta, double lo, double hi) {
    if (!(delta > 0.0)) return {0.0, 0.0};
    if (!(hi > lo)) throw std::invalid_argument("modulus_classical: need hi > lo");
    double h = std::min(delta, hi - lo) / kClassicalPairSpan;
    long count = static_cast<long>(std::ceil((hi - lo) / h)) + 1;
    if (count > kClassicalMaxPoints) {
        count = kClassicalMaxPoints;
        h = (hi - lo) / static_cast<double>(count - 1);
    }
    std::vector<double> vals(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        vals[static_cast<std::size_t>(i)] = f(std::min(hi, lo + h * i));
    }
    const long kmax = std::min<long>(count - 1, static_cast<long>(std::floor(delta / h + 1e-9)));
    double sup = 0.0;
    for (long i = 0; i < count; ++i) {
        for (long k = 1; k <= kmax && i + k < count; ++k) {
            sup = std::max(sup, std::fabs(vals[static_cast<std::size_t>(i + k)] -
                                          vals[static_cast<std::size_t>(i)]));
        }
    }
    return {sup, h};
}

double dt_step_weight(double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("dt_step_weight: x must be >= 0");
    return std::sqrt(x * (1.0 + x));
}

ModulusResult modulus_ditzian_totik(const ScalarFn& f, double delta, double gamma, double lo,
                                    double hi) {
    if (!(gamma >= 0.0) || gamma > 1.0) {
        throw std::invalid_argument("modulus_ditzian_totik: gamma must be in [0,1]");
    }
    if (!(lo >= 0.0)) throw std::invalid_argument("modulus_ditzian_totik: lo must be >= 0");
    if (!(hi > lo)) throw std::invalid_argument("modulus_ditzian_totik: need hi > lo");
    if (!(delta > 0.0)) return {0.0, 0.0};
    const double xstep = (hi - lo) / (kDtPointCount - 1);
    double sup = 0.0;
    for (int l = 1; l <= kDtStepCount; ++l) {
        const double i = delta * l / kDtStepCount;
        for (int j = 0; j < kDtPointCount; ++j) {
            const double x = lo + xstep * j;
            const double d = 0.5 * i * std::pow(dt_step_weight(x), gamma);
            const double a = x - d;
            const double b = x + d;
            if (a < lo || b > hi) continue;
            sup = std::max(sup, std::fabs(f(b) - f(a)));
        }
    }
    return {sup, xstep};
}

ModulusResult weighted_modulus(const ScalarFn& f, double delta, double x_max,
                               bool absolute_differences) {
    if (!(x_max > 0.0)) throw std::invalid_argument("weighted_modulus: x_max must be > 0");
    if (!(delta > 0.0)) return {0.0, 0.0};
    const double xstep = x_max / (kWeightedPointCount - 1);
    double sup = -std::numeric_limits<double>::infinity();
    for (int l = 1; l <= kWeightedStepCount; ++l) {
        const double h = delta * l / kWeightedStepCount;
        for (int j = 0; j < kWeightedPointCount; ++j) {
            const double x = xstep * j;
            const double xh = x + h;
            double num = f(xh) - f(x);
            if (absolute_differences) num = std::fabs(num);
            sup = std::max(sup, num / (1.0 + xh * xh));
        }
    }
    return {sup, xstep};
}

double weighted_norm(const ScalarFn& f, double x_max, const GrowthBound& growth) {
    if (!(x_max > 0.0)) throw std::invalid_argument("weighted_norm: x_max must be > 0");
    const double xstep = x_max / (kNormPointCount - 1);
    double sup = 0.0;
    for (int j = 0; j < kNormPointCount; ++j) {
        const double x = xstep * j;
        sup = std::max(sup, std::fabs(f(x)) / (1.0 + x * x));
    }
    if (growth.sigma < 2.0) {
        // |f|/(1+x^2) <= M(1+x^sigma)/(1+x^2) is decreasing past x_max for
        // sigma < 2, so the tail supremum is bounded by its value at x_max.
        sup = std::max(sup, growth.M * (1.0 + std::pow(x_max, growth.sigma)) /
                                (1.0 + x_max * x_max));
    }
    return sup;
}

double lipschitz_fit(const ScalarFn& f, double r, double x_lo, double hi) {
    if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("lipschitz_fit: r must be in (0,1]");
    if (!(x_lo > 0.0)) throw std::invalid_argument("lipschitz_fit: x_lo must be > 0");
    if (!(hi > x_lo)) throw std::invalid_argument("lipschitz_fit: need hi > x_lo");
    std::vector<double> svals(kLipschitzPointCount + 1);
    std::vector<double> fs(kLipschitzPointCount + 1);
    for (int i = 0; i <= kLipschitzPointCount; ++i) {
        const double s = hi * i / kLipschitzPointCount;
        svals[static_cast<std::size_t>(i)] = s;
        fs[static_cast<std::size_t>(i)] = f(s);
    }
    double k_est = 0.0;
    for (int j = 0; j < kLipschitzPointCount; ++j) {
        const double x = x_lo + (hi - x_lo) * j / (kLipschitzPointCount - 1);
        const double fx = f(x);
        for (int i = 0; i <= kLipschitzPointCount; ++i) {
            const double s = svals[static_cast<std::size_t>(i)];
            const double ds = std::fabs(s - x);
            if (ds == 0.0) continue;
            const double ratio = std::fabs(fs[static_cast<std::size_t>(i)] - fx) *
                                 std::pow(s + x, 0.5 * r) / std::pow(ds, r);
            k_est = std::max(k_est, ratio);
        }
    }
    return k_est;
}

namespace {

double poly_eval(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return d;
}

/// Total variation of the polynomial `g` on [a,b]: split at the stationary
/// points (sign changes of g' located by scan + bisection) and sum |delta g|.
double poly_variation(const std::vector<double>& g, double a, double b) {
    if (!(b > a)) return 0.0;
    const std::vector<double> gp = poly_derivative(g);
    std::vector<double> cuts{a};
    if (!gp.empty()) {
        constexpr int kScan = 64;
        double prev_t = a;
        double prev_v = poly_eval(gp, a);
        for (int i = 1; i <= kScan; ++i) {
            const double t = a + (b - a) * i / kScan;
            const double v = poly_eval(gp, t);
            if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
                double x0 = prev_t;
                double x1 = t;
                double v0 = prev_v;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (x0 + x1);
                    const double vm = poly_eval(gp, mid);
                    if ((v0 < 0.0) == (vm < 0.0)) {
                        x0 = mid;
                        v0 = vm;
                    } else {
                        x1 = mid;
                    }
                }
                cuts.push_back(0.5 * (x0 + x1));
            }
            prev_t = t;
            prev_v = v;
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double var = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        var += std::fabs(poly_eval(g, cuts[i]) - poly_eval(g, cuts[i - 1]));
    }
    return var;
}

} // namespace

PiecewiseFunction::PiecewiseFunction(std::vector<PiecewisePiece> pieces)
    : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("PiecewiseFunction: need >= 1 piece");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        if (!(p.hi > p.lo)) throw std::invalid_argument("PiecewiseFunction: piece needs hi > lo");
        if (p.coeffs.empty()) {
            throw std::invalid_argument("PiecewiseFunction: piece needs coefficients");
        }
        for (double c : p.coeffs) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("PiecewiseFunction: coefficients must be finite");
            }
        }
        if (i > 0) {
            const auto& q = pieces_[i - 1];
            if (std::fabs(p.lo - q.hi) > 1e-12 * std::max(1.0, std::fabs(p.lo))) {
                throw std::invalid_argument("PiecewiseFunction: pieces must be contiguous");
            }
            const double left = poly_eval(q.coeffs, q.hi);
            const double right = poly_eval(p.coeffs, p.lo);
            const double scale = std::max({1.0, std::fabs(left), std::fabs(right)});
            if (std::fabs(left - right) > 1e-9 * scale) {
                throw std::invalid_argument(
                    "PiecewiseFunction: pieces must be continuous at breakpoints");
            }
        }
    }
}

PiecewiseFunction PiecewiseFunction::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("piecewise JSON parse error: ") + e.what());
    }
    if (!j.is_array()) throw std::invalid_argument("piecewise JSON: top level must be an array");
    std::vector<PiecewisePiece> pieces;
    for (const auto& item : j) {
        try {
            const std::string kind = item.at("kind").get<std::string>();
            if (kind != "poly") {
                throw std::invalid_argument("piecewise JSON: unsupported kind \"" + kind + "\"");
            }
            PiecewisePiece p;
            p.lo = item.at("lo").get<double>();
            p.hi = item.at("hi").get<double>();
            p.coeffs = item.at("coeffs").get<std::vector<double>>();
            pieces.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("piecewise JSON: ") + e.what());
        }
    }
    return PiecewiseFunction(std::move(pieces));
}

PiecewiseFunction PiecewiseFunction::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open piecewise file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

PiecewiseFunction PiecewiseFunction::abs_deviation(double center, double lo, double hi) {
    if (!(lo < center) || !(center < hi)) {
        throw std::invalid_argument("abs_deviation: need lo < center < hi");
    }
    std::vector<PiecewisePiece> pieces;
    pieces.push_back({lo, center, {center, -1.0}});
    pieces.push_back({center, hi, {-center, 1.0}});
    return PiecewiseFunction(std::move(pieces));
}

const PiecewisePiece& PiecewiseFunction::piece_at(double t) const {
    if (t <= pieces_.front().lo) return pieces_.front();
    for (const auto& p : pieces_) {
        if (t < p.hi) return p;
    }
    return pieces_.back();
}

const PiecewisePiece& PiecewiseFunction::piece_left(double t) const {
    if (t <= pieces_.front().lo) return pieces_.front();
    for (std::size_t i = pieces_.size(); i-- > 0;) {
        if (t > pieces_[i].lo) return pieces_[i];
    }
    return pieces_.front();
}

double PiecewiseFunction::eval(double t) const { return poly_eval(piece_at(t).coeffs, t); }

double PiecewiseFunction::derivative_left(double t) const {
    return poly_eval(poly_derivative(piece_left(t).coeffs), t);
}

double PiecewiseFunction::derivative_right(double t) const {
    return poly_eval(poly_derivative(piece_at(t).coeffs), t);
}

ScalarFn PiecewiseFunction::fn() const {
    return [pf = *this](double t) { return pf.eval(t); };
}

namespace {

double variation_impl(const PiecewiseFunction& pf, double a, double b,
                      std::optional<double> center) {
    if (!(b >= a)) throw std::invalid_argument("total_variation: need b >= a");
    if (a < pf.lo() - 1e-12 || b > pf.hi() + 1e-12) {
        throw std::invalid_argument("total_variation: [a,b] outside descriptor domain");
    }
    if (b == a) return 0.0;
    std::vector<double> cuts{a, b};
    for (const auto& p : pf.pieces()) {
        if (p.lo > a && p.lo < b) cuts.push_back(p.lo);
    }
    if (center && *center > a && *center < b) cuts.push_back(*center);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto piece_containing = [&pf](double t) -> const PiecewisePiece& {
        for (const auto& p : pf.pieces()) {
            if (t < p.hi) return p;
        }
        return pf.pieces().back();
    };
    double var = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i - 1] + cuts[i]);
        const auto& piece = piece_containing(mid);
        var += poly_variation(poly_derivative(piece.coeffs), cuts[i - 1], cuts[i]);
    }
    for (std::size_t i = 1; i + 1 < cuts.size(); ++i) {
        const double z = cuts[i];
        if (center && z == *center) continue; // clipped: no jump counted at the center
        var += std::fabs(pf.derivative_right(z) - pf.derivative_left(z));
    }
    return var;
}

} // namespace

double total_variation(const PiecewiseFunction& pf, double a, double b) {
    return variation_impl(pf, a, b, std::nullopt);
}

double total_variation(const PiecewiseFunction& pf, double a, double b, double center) {
    return variation_impl(pf, a, b, center);
}

} // namespace boasbuck
