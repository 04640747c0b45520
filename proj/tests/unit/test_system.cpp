#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "boasbuck/errors.hpp"
#include "boasbuck/system.hpp"

using namespace boasbuck;

namespace {

/// Independent exp-series oracle: coefficients of exp(g(s)) with g(0)=0 via
/// the derivative recurrence k f_k = sum_m m g_m f_{k-m}. Plain doubles, so
/// only usable while the values stay in range (small y, moderate J).
std::vector<double> exp_series_oracle(const std::vector<double>& g, int j_max) {
    std::vector<double> f(static_cast<std::size_t>(j_max) + 1, 0.0);
    f[0] = 1.0;
    for (int k = 1; k <= j_max; ++k) {
        double acc = 0.0;
        for (int m = 1; m <= k && m < static_cast<int>(g.size()); ++m) {
            acc += m * g[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(k - m)];
        }
        f[static_cast<std::size_t>(k)] = acc / k;
    }
    return f;
}

} // namespace

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(BoasBuckSystem(XiKind::exp_kind, {}, {1.0}, {}, {0.5}, {}, -1.0, "bad"),
                    std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(BoasBuckSystem(XiKind::exp_kind, {}, {nan}, {}, {0.5}, {}, 2.0, "bad"),
                    std::invalid_argument);
    CHECK_THROWS_AS(BoasBuckSystem(XiKind::series_only, {}, {1.0}, {}, {0.5}, {}, 2.0, "bad"),
                    std::invalid_argument);
}

TEST_CASE("p(x) for the quadratic-exponential system is n*x/2") {
    const BoasBuckSystem sys = make_exp_quadratic_system();
    CHECK(p_of_x(sys, 10, 1.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(p_of_x(sys, 7, 0.0) == doctest::Approx(0.0));
    CHECK(p_of_x(sys, 4, 2.5) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("xi evaluators") {
    const BoasBuckSystem sys = make_exp_quadratic_system();
    CHECK(sys.xi(1.3) == doctest::Approx(std::exp(1.3)).epsilon(1e-15));
    CHECK(sys.xi_d1(1.3) == doctest::Approx(std::exp(1.3)).epsilon(1e-15));
    CHECK(sys.xi_d2(1.3) == doctest::Approx(std::exp(1.3)).epsilon(1e-15));
    CHECK(sys.xi_log(700.0) == doctest::Approx(700.0)); // stays finite

    // series-only xi: the stored polynomial is the function.
    const BoasBuckSystem poly(XiKind::series_only, {1.0, 2.0, 0.5}, {1.0}, {}, {0.5}, {}, 2.0,
                              "poly_xi");
    CHECK(poly.xi(2.0) == doctest::Approx(1.0 + 4.0 + 2.0).epsilon(1e-15));
    CHECK(poly.xi_d1(2.0) == doctest::Approx(2.0 + 2.0).epsilon(1e-15));
    CHECK(poly.xi_d2(2.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("quadratic-exponential weights follow the even-index Poisson law") {
    const BoasBuckSystem sys = make_exp_quadratic_system();
    const double y = 6.0;
    const ThetaTable table = theta_values(sys, y, 40);
    const double lambda = y / 2.0;
    double fact = 1.0;
    for (int k = 0; 2 * k <= table.max_index(); ++k) {
        if (k > 0) fact *= k;
        const double expected = std::exp(-lambda) * std::pow(lambda, k) / fact;
        CHECK(table.weight(2 * k) == doctest::Approx(expected).epsilon(1e-12));
        if (2 * k + 1 <= table.max_index()) {
            CHECK(table.weight(2 * k + 1) == doctest::Approx(0.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("cubic system weights match an independent exp-series oracle") {
    const BoasBuckSystem sys = make_exp_cubic_system();
    const double y = 5.0;
    const int j_max = 60;
    // Theta generating function: exp(s) * exp(y s^2/2 + s^3/6)
    //                          = exp(s + y s^2/2 + s^3/6).
    std::vector<double> g(static_cast<std::size_t>(j_max) + 1, 0.0);
    g[1] = 1.0;
    g[2] = y / 2.0;
    g[3] = 1.0 / 6.0;
    const std::vector<double> theta = exp_series_oracle(g, j_max);
    double norm = 0.0; // normalizer = S(1) xi(A(1)) = e * e^{y/2 + 1/6}
    norm = std::exp(1.0 + y / 2.0 + 1.0 / 6.0);

    const ThetaTable table = theta_values(sys, y, j_max);
    for (int j = 0; j <= j_max; ++j) {
        CHECK(table.weight(j) ==
              doctest::Approx(theta[static_cast<std::size_t>(j)] / norm).epsilon(1e-9));
    }
}

TEST_CASE("weight distribution is a probability vector with controlled tail") {
    const BoasBuckSystem sys = make_exp_cubic_system();
    for (double x : {0.1, 1.0, 10.0}) {
        const ThetaTable t = weight_distribution(sys, 20, x, 1e-12);
        double sum = 0.0;
        for (int j = 0; j <= t.max_index(); ++j) {
            CHECK(t.weight(j) >= 0.0);
            sum += t.weight(j);
        }
        CHECK(sum >= 1.0 - 1e-12 - t.tail_mass_bound);
        CHECK(sum <= 1.0 + 1e-9);
        CHECK(t.tail_mass_bound <= 1e-11);
    }
}

TEST_CASE("weight distribution stays finite at very large arguments") {
    // n*x = 6400 overflows any naive Theta_j table; the scaled path must not.
    const BoasBuckSystem sys = make_exp_quadratic_system();
    const ThetaTable t = weight_distribution(sys, 640, 10.0, 1e-12);
    double sum = 0.0;
    int nonzero = 0;
    for (int j = 0; j <= t.max_index(); ++j) {
        const double w = t.weight(j);
        REQUIRE(std::isfinite(w));
        REQUIRE(w >= 0.0);
        if (w > 0.0) ++nonzero;
        sum += w;
    }
    CHECK(nonzero > 100);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    // Poisson(3200) spot check against the scaled table at the mode.
    const double lambda = 3200.0;
    const int k = 3200; // weight index 6400
    // log pmf = -lambda + k log lambda - lgamma(k+1)
    const double logp = -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    CHECK(t.weight(2 * k) == doctest::Approx(std::exp(logp)).epsilon(1e-9));
}

TEST_CASE("series-only tables do not depend on the truncation order used") {
    const TruncatedSeries e30 = TruncatedSeries::exponential(30);
    const std::vector<double> xi_coeffs(e30.coeffs().begin(), e30.coeffs().end());
    const BoasBuckSystem sys(XiKind::series_only, xi_coeffs, {1.0}, {}, {0.5}, {}, 2.0,
                             "exp_series30");
    const double y = 3.0;
    const ThetaTable a = theta_values(sys, y, 24);
    const ThetaTable b = theta_values(sys, y, 48);
    for (int j = 0; j <= 24; ++j) {
        CHECK(a.weight(j) == b.weight(j)); // bit-identical
    }
    CHECK(a.log_normalizer == b.log_normalizer);
}

TEST_CASE("negative kernel coefficients are rejected") {
    // S = 1 - s/2 makes Theta_1 negative while S(1) = 1/2 stays positive.
    const BoasBuckSystem sys(XiKind::exp_kind, {}, {1.0, -0.5}, {}, {0.5}, {}, 2.0, "neg");
    CHECK_THROWS_AS(weight_distribution(sys, 4, 1.0, 1e-12), PositivityViolationError);
    const ValidationReport report = validate_system(sys, 64, 5.0, 0.5);
    CHECK_FALSE(report.passed());
}

TEST_CASE("degenerate normalizer is reported") {
    // S(1) = 0.
    const BoasBuckSystem sys(XiKind::exp_kind, {}, {1.0, -1.0}, {}, {0.5}, {}, 2.0, "deg");
    CHECK_THROWS_AS(theta_values(sys, 1.0, 8), DegenerateNormalizerError);
}

TEST_CASE("structural validation separates hard failures from warnings") {
    const BoasBuckSystem good = make_exp_cubic_system();
    const ValidationReport ok = validate_system(good, 64, 5.0, 0.5);
    CHECK(ok.passed());

    // T with T'(1) != 0 breaks a structural assumption.
    const BoasBuckSystem bad_t(XiKind::exp_kind, {}, {1.0}, {0.3}, {0.5}, {}, 2.0, "bad_t");
    const ValidationReport rt = validate_system(bad_t, 64, 5.0, 0.5);
    CHECK_FALSE(rt.passed());

    // U'(1) != 1.
    const BoasBuckSystem bad_u(XiKind::exp_kind, {}, {1.0}, {}, {0.7}, {}, 2.0, "bad_u");
    CHECK_FALSE(validate_system(bad_u, 64, 5.0, 0.5).passed());

    const std::string text = ok.summary();
    CHECK(text.find("ok") != std::string::npos);
    CHECK(validate_system(bad_t, 64, 5.0, 0.5).summary().find("FAIL") != std::string::npos);
}

TEST_CASE("JSON round trip preserves the system") {
    const BoasBuckSystem sys = make_exp_cubic_system();
    const std::string text = sys.to_json_text();
    const BoasBuckSystem back = BoasBuckSystem::from_json_text(text);
    CHECK(back.name() == sys.name());
    CHECK(back.xi_kind() == sys.xi_kind());
    CHECK(back.sigma() == sys.sigma());
    REQUIRE(back.s_coeffs().size() == sys.s_coeffs().size());
    for (std::size_t i = 0; i < sys.s_coeffs().size(); ++i) {
        CHECK(back.s_coeffs()[i] == sys.s_coeffs()[i]);
    }
    CHECK(back.u_coeffs() == sys.u_coeffs());
    CHECK(back.v_coeffs() == sys.v_coeffs());

    CHECK_THROWS_AS(BoasBuckSystem::from_json_text("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(BoasBuckSystem::from_json_text(R"({"xi_kind":"mystery"})"),
                    std::invalid_argument);
}

TEST_CASE("shipped system files load and validate") {
    const BoasBuckSystem quad =
        BoasBuckSystem::from_json_file(std::string(BOASBUCK_DATA_DIR) +
                                       "/systems/exp_quadratic.json");
    CHECK(quad.name() == "exp_quadratic");
    CHECK(validate_system(quad, 64, 5.0, 0.5).passed());

    const BoasBuckSystem cubic = BoasBuckSystem::from_json_file(
        std::string(BOASBUCK_DATA_DIR) + "/systems/exp_cubic.json");
    CHECK(cubic.name() == "exp_cubic");
    CHECK(cubic.s_coeffs().size() == 41);
    CHECK(validate_system(cubic, 64, 5.0, 0.5).passed());
}
