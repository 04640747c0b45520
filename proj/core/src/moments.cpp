#include "boasbuck/moments.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boasbuck/errors.hpp"

namespace boasbuck {

namespace {

/// The scalar statistics every closed form is built from.
struct MomentInputs {
    double r1 = 0.0;      // xi'(p)/xi(p)
    double r2 = 0.0;      // xi''(p)/xi(p)
    double s1_rel = 0.0;  // S'(1)/S(1)
    double s2_rel = 0.0;  // S''(1)/S(1)
    double u2 = 0.0;      // U''(1)
    double v1 = 0.0;      // V'(1)
    double v2 = 0.0;      // V''(1)
};

MomentInputs moment_inputs(const BoasBuckSystem& sys, int n, double x) {
    if (n < 1) throw std::invalid_argument("moments: n must be >= 1");
    if (!(x >= 0.0)) throw std::invalid_argument("moments: x must be >= 0");
    const double p = p_of_x(sys, n, x);
    MomentInputs in;
    in.r1 = sys.xi_ratio_d1(p); // throws DegenerateNormalizerError if xi(p) <= 0
    in.r2 = sys.xi_ratio_d2(p);
    const double sv = sys.s_at_one().value;
    in.s1_rel = sys.s_at_one().d1 / sv;
    in.s2_rel = sys.s_at_one().d2 / sv;
    in.u2 = sys.u_at_one().d2;
    in.v1 = sys.v_at_one().d1;
    in.v2 = sys.v_at_one().d2;
    return in;
}

/// Shared constant term of the Durrmeyer second moment and of mu2, without
/// the 1/(n(n-1)) factor; vsq is (V'(1))^2 or the displayed (V''(1))^2.
double durrmeyer_const_core(const MomentInputs& in, double vsq) {
    return vsq * in.r2 + (2.0 * in.s1_rel * in.v1 + 2.0 * in.v1 + in.v2) * in.r1 +
           (2.0 * in.s1_rel + in.s2_rel);
}

} // namespace

MomentTriple discrete_moments(const BoasBuckSystem& sys, int n, double x) {
    const MomentInputs in = moment_inputs(sys, n, x);
    const double nn = static_cast<double>(n);
    MomentTriple m;
    m.m0 = 1.0;
    m.m1 = in.r1 * x + (in.s1_rel + in.v1 * in.r1) / nn;
    m.m2 = in.r2 * x * x +
           (in.r1 * (2.0 * in.s1_rel + in.u2 + 1.0) + 2.0 * in.v1 * in.r2) * x / nn +
           ((in.s2_rel + in.s1_rel) + (2.0 * in.s1_rel * in.v1 + in.v2 + in.v1) * in.r1 +
            in.v1 * in.v1 * in.r2) /
               (nn * nn);
    return m;
}

MomentTriple durrmeyer_moments(const BoasBuckSystem& sys, int n, double x) {
    if (n < 2) throw std::invalid_argument("durrmeyer_moments: n must be >= 2");
    const MomentInputs in = moment_inputs(sys, n, x);
    const double nn = static_cast<double>(n);
    MomentTriple m;
    m.m0 = 1.0;
    m.m1 = in.r1 * x + (in.s1_rel + in.v1 * in.r1) / nn;
    m.m2 = (nn / (nn - 1.0)) * in.r2 * x * x +
           (x / (nn - 1.0)) *
               (2.0 * in.v1 * in.r2 + (2.0 + 2.0 * in.s1_rel + in.u2) * in.r1) +
           durrmeyer_const_core(in, in.v1 * in.v1) / (nn * (nn - 1.0));
    return m;
}

double durrmeyer_m2_as_displayed(const BoasBuckSystem& sys, int n, double x) {
    if (n < 2) throw std::invalid_argument("durrmeyer_m2_as_displayed: n must be >= 2");
    const MomentInputs in = moment_inputs(sys, n, x);
    const double nn = static_cast<double>(n);
    return (nn / (nn - 1.0)) * in.r2 * x * x +
           (x / (nn - 1.0)) *
               (2.0 * in.v1 * in.r2 + (2.0 + 2.0 * in.s1_rel + in.u2) * in.r1) +
           durrmeyer_const_core(in, in.v2 * in.v2) / (nn * (nn - 1.0));
}

CentralPair central_moments(const BoasBuckSystem& sys, int n, double x) {
    if (n < 2) throw std::invalid_argument("central_moments: n must be >= 2");
    const MomentInputs in = moment_inputs(sys, n, x);
    const double nn = static_cast<double>(n);
    CentralPair c;
    c.mu1 = (in.r1 - 1.0) * x + (in.s1_rel + in.v1 * in.r1) / nn;
    c.mu2 = ((nn / (nn - 1.0)) * in.r2 - 2.0 * in.r1 + 1.0) * x * x +
            ((2.0 / (nn - 1.0)) * in.v1 * in.r2 +
             (1.0 / (nn - 1.0)) * (2.0 + in.u2 + 2.0 * in.s1_rel) * in.r1 -
             (2.0 / nn) * (in.v1 * in.r1 + in.s1_rel)) *
                x +
            durrmeyer_const_core(in, in.v1 * in.v1) / (nn * (nn - 1.0));
    return c;
}

namespace {

void fold_discrepancy(double applied, double closed, double& max_abs, double& max_rel) {
    const double abs_err = std::fabs(applied - closed);
    max_abs = std::max(max_abs, abs_err);
    max_rel = std::max(max_rel, abs_err / (1.0 + std::fabs(closed)));
}

} // namespace

MomentReport moment_report(const BoasBuckSystem& sys, const OperatorConfig& cfg, double x) {
    cfg.validate();
    MomentReport rep;
    rep.n = cfg.n;
    rep.x = x;
    rep.discrete_closed = discrete_moments(sys, cfg.n, x);
    rep.durrmeyer_closed = durrmeyer_moments(sys, cfg.n, x);
    rep.central_closed = central_moments(sys, cfg.n, x);

    const ScalarFn one = [](double) { return 1.0; };
    const ScalarFn ident = [](double s) { return s; };
    const ScalarFn square = [](double s) { return s * s; };
    const ScalarFn centered = [x](double s) { return s - x; };
    const ScalarFn centered_sq = [x](double s) { return (s - x) * (s - x); };

    OperatorConfig disc = cfg;
    disc.kind = OperatorKind::discrete;
    rep.discrete_applied.m0 = apply_discrete(sys, disc, one, x).value;
    rep.discrete_applied.m1 = apply_discrete(sys, disc, ident, x).value;
    rep.discrete_applied.m2 = apply_discrete(sys, disc, square, x).value;

    OperatorConfig durr = cfg;
    durr.kind = OperatorKind::durrmeyer;
    rep.durrmeyer_applied.m0 = apply_durrmeyer(sys, durr, one, x).value;
    rep.durrmeyer_applied.m1 = apply_durrmeyer(sys, durr, ident, x).value;
    rep.durrmeyer_applied.m2 = apply_durrmeyer(sys, durr, square, x).value;
    rep.central_applied.mu1 = apply_durrmeyer(sys, durr, centered, x).value;
    rep.central_applied.mu2 = apply_durrmeyer(sys, durr, centered_sq, x).value;

    fold_discrepancy(rep.discrete_applied.m0, rep.discrete_closed.m0, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.discrete_applied.m1, rep.discrete_closed.m1, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.discrete_applied.m2, rep.discrete_closed.m2, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.durrmeyer_applied.m0, rep.durrmeyer_closed.m0, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.durrmeyer_applied.m1, rep.durrmeyer_closed.m1, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.durrmeyer_applied.m2, rep.durrmeyer_closed.m2, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.central_applied.mu1, rep.central_closed.mu1, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    fold_discrepancy(rep.central_applied.mu2, rep.central_closed.mu2, rep.max_abs_discrepancy,
                     rep.max_rel_discrepancy);
    return rep;
}

std::string MomentReport::summary() const {
    std::ostringstream os;
    os.precision(12);
    os << "n=" << n << " x=" << x << '\n';
    os << "  discrete   closed m0=" << discrete_closed.m0 << " m1=" << discrete_closed.m1
       << " m2=" << discrete_closed.m2 << '\n';
    os << "  discrete   applied m0=" << discrete_applied.m0 << " m1=" << discrete_applied.m1
       << " m2=" << discrete_applied.m2 << '\n';
    os << "  durrmeyer  closed m0=" << durrmeyer_closed.m0 << " m1=" << durrmeyer_closed.m1
       << " m2=" << durrmeyer_closed.m2 << '\n';
    os << "  durrmeyer  applied m0=" << durrmeyer_applied.m0 << " m1=" << durrmeyer_applied.m1
       << " m2=" << durrmeyer_applied.m2 << '\n';
    os << "  central    closed mu1=" << central_closed.mu1 << " mu2=" << central_closed.mu2
       << '\n';
    os << "  central    applied mu1=" << central_applied.mu1 << " mu2=" << central_applied.mu2
       << '\n';
    os << "  max |applied-closed| = " << max_abs_discrepancy
       << "  (relative " << max_rel_discrepancy << ")";
    return os.str();
}

namespace {

/// a + b/n fitted through the two largest grid entries, evaluated at n = inf.
double richardson_tail(const std::vector<int>& n_grid, const std::vector<double>& v) {
    const std::size_t k = v.size();
    const double n1 = static_cast<double>(n_grid[k - 2]);
    const double n2 = static_cast<double>(n_grid[k - 1]);
    return (n2 * v[k - 1] - n1 * v[k - 2]) / (n2 - n1);
}

void screen_divergence(const std::vector<double>& v, const char* what) {
    if (v.size() < 3) return;
    const std::size_t k = v.size();
    const double d_last = std::fabs(v[k - 1] - v[k - 2]);
    const double d_prev = std::fabs(v[k - 2] - v[k - 3]);
    if (d_last > 0.9 * d_prev + 1e-9 * (1.0 + std::fabs(v[k - 1]))) {
        throw LimitEstimateFailureError(std::string(what) +
                                        ": successive estimates are not contracting");
    }
}

} // namespace

LimitEstimates limit_estimates(const BoasBuckSystem& sys, double x,
                               const std::vector<int>& n_grid) {
    if (!(x > 0.0)) throw std::invalid_argument("limit_estimates: x must be > 0");
    if (n_grid.size() < 2) throw std::invalid_argument("limit_estimates: need >= 2 grid entries");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw std::invalid_argument("limit_estimates: grid entries must be >= 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw std::invalid_argument("limit_estimates: grid must be strictly increasing");
        }
    }

    std::vector<double> seq_ell1;
    std::vector<double> seq_eta;
    double m_bound = 0.0;
    for (int n : n_grid) {
        const double p = p_of_x(sys, n, x);
        seq_ell1.push_back(n * (sys.xi_ratio_d1(p) - 1.0));
        const CentralPair c = central_moments(sys, n, x);
        seq_eta.push_back(n * c.mu2);
        m_bound = std::max(m_bound, n * c.mu2 / (x * (x + 1.0)));
    }
    screen_divergence(seq_ell1, "ell1");
    screen_divergence(seq_eta, "eta1");

    LimitEstimates out;
    out.ell1 = richardson_tail(n_grid, seq_ell1);
    out.eta1 = richardson_tail(n_grid, seq_eta);
    out.ell2 = (out.eta1 - (2.0 + sys.u_at_one().d2) * x) / (x * x);
    out.m_bound = m_bound;
    return out;
}

} // namespace boasbuck
