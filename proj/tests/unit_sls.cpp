#include <cmath>

#include "doctest.h"
#include "harcontam/rng.hpp"
#include "harcontam/sls.hpp"

using namespace harcontam;

namespace {

SlsSpec iid_spec(double sigma = 1.0) {
    SlsSpec s;
    s.label = "iid";
    RegimeSpec r;
    r.sigma_fn = ParamCurve::constant(sigma);
    s.regimes = {r};
    return s;
}

SlsSpec ar1_spec(double rho, double sigma = 1.0) {
    SlsSpec s = iid_spec(sigma);
    s.label = "ar1";
    s.regimes[0].ar_fn = ParamCurve::constant(rho);
    return s;
}

}  // namespace

TEST_CASE("simulate_path is deterministic and finite") {
    SlsSpec m1 = builtin_spec("M1");
    TimeSeries a = simulate_path(m1, 200, 42);
    TimeSeries b = simulate_path(m1, 200, 42);
    REQUIRE(a.size() == 200);
    for (long t = 0; t < 200; ++t) CHECK(a.values[t] == b.values[t]);
    a.validate();
    TimeSeries c = simulate_path(m1, 200, 43);
    CHECK(a.values[0] != c.values[0]);
    TimeSeries z = simulate_path(m1, 200, 42, ArInit::zero_start);
    CHECK(a.values[0] != z.values[0]);
}

TEST_CASE("degenerate AR(0) spec gives i.i.d. draws") {
    TimeSeries y = simulate_path(iid_spec(), 4, 7);
    REQUIRE(y.size() == 4);
    // with rho = 0 the values are exactly the gaussian innovations
    Rng rng(7);
    CHECK(y.values[0] == doctest::Approx(rng.gaussian()).epsilon(1e-15));
}

TEST_CASE("builtin specs match published parameterizations") {
    SlsSpec m1 = builtin_spec("M1");
    REQUIRE(m1.regimes.size() == 2);
    CHECK(m1.regimes[0].ar_fn(0.05) == doctest::Approx(0.9));
    double lo = 1.0, hi = -1.0;
    for (int i = 1; i <= 1000; ++i) {
        const double u = 0.1 + 0.9 * i / 1000.0;
        const double r = m1.regimes[1].ar_fn(u);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(lo == doctest::Approx(0.172).epsilon(5e-3));  // range ~[0.172, 0.263]
    CHECK(hi == doctest::Approx(0.263).epsilon(5e-3));

    SlsSpec m4 = builtin_spec("M4");
    lo = 1.0;
    hi = -1.0;
    for (int i = 1; i <= 1000; ++i) {
        const double u = static_cast<double>(i) / 1000.0;
        const double r = m4.regimes[0].ar_fn(u);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi == doctest::Approx(0.95).epsilon(1e-2));  // quoted range ~[0.07, 0.95]
    CHECK(lo == doctest::Approx(0.07).epsilon(0.15));

    CHECK_THROWS_AS(builtin_spec("M9"), LookupError);
}

TEST_CASE("M3 applies exactly three MAD-scaled outliers") {
    const long T = 200;
    SlsSpec m2 = builtin_spec("M2");
    SlsSpec m3 = builtin_spec("M3");
    TimeSeries base = simulate_path(m2, T, 11);
    TimeSeries out = simulate_path(m3, T, 11);
    std::vector<long> changed;
    for (long t = 0; t < T; ++t)
        if (base.values[t] != out.values[t]) changed.push_back(t + 1);
    REQUIRE(changed == std::vector<long>{50, 100, 150});
    const double cbar = mad_outlier_constant() * mad(base.values);
    CHECK(cbar > 0.0);
    for (long t : changed) {
        CHECK(out.values[t - 1] >= cbar);
        CHECK(out.values[t - 1] <= 10.0 * cbar);
    }
    CHECK(mad_outlier_constant() == doctest::Approx(1.482602218505602).epsilon(1e-12));
}

TEST_CASE("local_spectrum closed forms") {
    CHECK(local_spectrum(iid_spec(), 0.5, 1.234) == doctest::Approx(1.0 / (2.0 * M_PI)));
    CHECK(local_spectrum(ar1_spec(0.5), 0.5, 0.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    Rng rng(5);
    SlsSpec m1 = builtin_spec("M1");
    for (int i = 0; i < 20; ++i) {
        const double u = rng.uniform01();
        const double w = rng.uniform(0.0, M_PI);
        CHECK(local_spectrum(m1, u, w) == doctest::Approx(local_spectrum(m1, u, -w)));
    }
    CHECK_THROWS_AS(local_spectrum(m1, 1.5, 0.0), SpecError);
}

TEST_CASE("local_autocov_true closed form and quadrature agree") {
    CHECK(local_autocov_true(iid_spec(), 0.5, 0) == doctest::Approx(1.0));
    CHECK(local_autocov_true(iid_spec(), 0.5, 1) == doctest::Approx(0.0));
    CHECK(local_autocov_true(ar1_spec(0.9), 0.5, 0) ==
          doctest::Approx(1.0 / 0.19).epsilon(1e-10));
    // the verify flag cross-checks against the spectral integral to 1e-8,
    // sampled over every builtin spec for lags up to 50
    Rng rng(99);
    for (const std::string name : {"M1", "M2", "M3", "M4"}) {
        SlsSpec s = builtin_spec(name);
        for (int i = 0; i < 40; ++i) {
            const double u = rng.uniform01() * 0.999 + 0.001;
            const long k = static_cast<long>(rng.uniform(0.0, 51.0));
            CHECK_NOTHROW(local_autocov_true(s, u, k, true));
        }
    }
}

TEST_CASE("theoretical_gamma recursion oracle") {
    SlsSpec iid = iid_spec();
    CHECK(theoretical_gamma(iid, 100, 0) == doctest::Approx(1.0));
    CHECK(theoretical_gamma(iid, 100, 1) == doctest::Approx(0.0));
    CHECK(theoretical_gamma(iid, 100, 5) == doctest::Approx(0.0));

    SlsSpec ar = ar1_spec(0.5);
    for (long k : {0L, 1L, 3L, 7L}) {
        const double want = std::pow(0.5, k) / 0.75;
        CHECK(theoretical_gamma(ar, 400, k) ==
              doctest::Approx(want * (400.0 - k) / 400.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(theoretical_gamma(iid, 10, 10), SpecError);
}

TEST_CASE("theoretical_gamma on M1: recursion vs stationary approximation") {
    // The two conventions differ at small k; both are reported, neither is
    // forced onto the published single-realization numbers.
    SlsSpec m1 = builtin_spec("M1");
    const double rec0 = theoretical_gamma(m1, 200, 0);
    const double sta0 = theoretical_gamma_stationary(m1, 0);
    CHECK(rec0 == doctest::Approx(1.004).epsilon(2e-3));  // frozen from the recursion
    CHECK(sta0 > 0.95);  // ~ 0.1/0.19 + int_{0.1}^1 c(u,0) du
    CHECK(sta0 < 1.05);
    CHECK(std::fabs(rec0 - sta0) < 0.05);
    // stationary approximation is nonnegative at all lags for AR coefficients >= 0
    CHECK(theoretical_gamma_stationary(m1, 10) >= 0.0);
}

TEST_CASE("d_star_true") {
    CHECK(d_star_true(iid_spec()) == doctest::Approx(0.0));
    SlsSpec s;
    RegimeSpec r1, r2;
    r1.lambda_lo = 0.0;
    r1.lambda_hi = 0.1;
    r1.mean_fn = ParamCurve::constant(1.27);
    r2.lambda_lo = 0.1;
    r2.lambda_hi = 1.0;
    r2.mean_fn = ParamCurve::constant(-0.03);
    s.regimes = {r1, r2};
    CHECK(d_star_true(s) == doctest::Approx(0.09 * 1.3 * 1.3).epsilon(1e-10));
    // monotone in the mean gap
    s.regimes[0].mean_fn = ParamCurve::constant(2.0);
    CHECK(d_star_true(s) > 0.1521);
}

TEST_CASE("regime sample mean matches the recursion oracle in MC") {
    SlsSpec m1 = builtin_spec("M1");
    const long T = 200, T1 = 20;
    const int R = 5000;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < R; ++r) {
        TimeSeries y = simulate_path(m1, T, derive_seed(314, r));
        double v1 = 0.0;
        for (long t = 0; t < T1; ++t) v1 += y.values[t];
        v1 /= T1;
        sum += v1;
        sumsq += v1 * v1;
    }
    const double m = sum / R;
    const double se = std::sqrt((sumsq / R - m * m) / R);
    CHECK(std::fabs(m - 0.0) < 3.0 * se);  // E(Vbar_1) = 0 for the zero-mean design
}

TEST_CASE("spec JSON and series CSV round trips") {
    SlsSpec m1 = builtin_spec("M1");
    SlsSpec back = sls_from_json(sls_to_json(m1));
    TimeSeries a = simulate_path(m1, 128, 5);
    TimeSeries b = simulate_path(back, 128, 5);
    for (long t = 0; t < 128; ++t) CHECK(a.values[t] == b.values[t]);

    TimeSeries c = series_from_csv(series_to_csv(a));
    REQUIRE(c.size() == a.size());
    for (long t = 0; t < a.size(); ++t) CHECK(a.values[t] == c.values[t]);

    SlsSpec m3 = builtin_spec("M3");
    SlsSpec back3 = sls_from_json(sls_to_json(m3));
    REQUIRE(back3.outliers.has_value());
    CHECK(back3.outliers->positions.size() == 3);

    CHECK_THROWS_AS(sls_from_json("{not json"), SpecError);
}

TEST_CASE("spec validation rejects bad inputs") {
    SlsSpec s = iid_spec();
    s.regimes[0].lambda_hi = 0.7;  // no longer a partition of (0,1]
    CHECK_THROWS_AS(s.validate(), SpecError);
    SlsSpec s2 = ar1_spec(1.2);
    CHECK_THROWS_AS(simulate_path(s2, 50, 1), SpecError);
}
