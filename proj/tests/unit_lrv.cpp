#include <cmath>
#include <complex>

#include "doctest.h"
#include "harcontam/inference.hpp"
#include "harcontam/lrv.hpp"
#include "harcontam/quadrature.hpp"
#include "harcontam/rng.hpp"

using namespace harcontam;

namespace {

TimeSeries random_series(long T, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    TimeSeries y;
    y.values.resize(T);
    for (long t = 0; t < T; ++t) y.values[t] = scale * rng.gaussian();
    return y;
}

TimeSeries ar1_series(long T, double rho, std::uint64_t seed, double sigma = 1.0) {
    Rng rng(seed);
    TimeSeries y;
    y.values.resize(T);
    y.values[0] = rng.gaussian() * sigma / std::sqrt(1.0 - rho * rho);
    for (long t = 1; t < T; ++t) y.values[t] = rho * y.values[t - 1] + sigma * rng.gaussian();
    return y;
}

void demean(TimeSeries& y) {
    const double m = mean(y.values);
    for (double& v : y.values) v -= m;
}

}  // namespace

TEST_CASE("kernel shapes") {
    CHECK(lag_kernel_eval(LagKernel::bartlett, 0.0) == 1.0);
    CHECK(lag_kernel_eval(LagKernel::qs, 0.0) == 1.0);
    CHECK(lag_kernel_eval(LagKernel::bartlett, 0.25) == doctest::Approx(0.75));
    CHECK(lag_kernel_eval(LagKernel::bartlett, 1.1) == 0.0);
    CHECK(lag_kernel_eval(LagKernel::qs, -0.7) ==
          doctest::Approx(lag_kernel_eval(LagKernel::qs, 0.7)));
    // curvature at zero: (1 - K(x))/x^2 -> 18 pi^2/125
    const double x = 1e-3;
    CHECK((1.0 - lag_kernel_eval(LagKernel::qs, x)) / (x * x) ==
          doctest::Approx(18.0 * M_PI * M_PI / 125.0).epsilon(1e-5));

    // K2: unit mass, symmetry about 1/2
    const double mass =
        integrate([](double t) { return smoothing_kernel_eval(SmoothingKernel::quadratic, t); },
                  0.0, 1.0, 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    for (double t : {0.1, 0.3, 0.45})
        CHECK(smoothing_kernel_eval(SmoothingKernel::quadratic, t) ==
              doctest::Approx(smoothing_kernel_eval(SmoothingKernel::quadratic, 1.0 - t)));
}

TEST_CASE("hac: support limit and long-run AR(1) benchmark") {
    TimeSeries y = random_series(300, 17);
    demean(y);
    // Bartlett with b1 >= 1 keeps only lag zero
    const double g0 = sample_autocov(y, 0, false).values[0];
    CHECK(hac(y, LagKernel::bartlett, 1.0, false).value == doctest::Approx(g0).epsilon(1e-12));
    CHECK_THROWS_AS(hac(y, LagKernel::bartlett, -0.1, false), SpecError);

    // single long AR(1) run: data-driven QS within 5% of 1/(1-rho)^2 = 4
    TimeSeries ar = ar1_series(20000, 0.5, 99);
    demean(ar);
    CHECK(andrews91(ar, false).value == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("nw87 delegates to Bartlett with the fixed lag rule") {
    TimeSeries y = random_series(200, 23);
    demean(y);
    LrvEstimate e = nw87(y);
    CHECK(e.diagnostics.at("lag_truncation") == doctest::Approx(4.0));
    const double m = 0.75 * std::cbrt(200.0);
    CHECK(e.value == doctest::Approx(hac(y, LagKernel::bartlett, 1.0 / m, true).value));
    CHECK(e.value > 0.0);
}

TEST_CASE("andrews91 white-noise limit and prewhitening clamp") {
    const int R = 2000;
    double sj = 0.0, sg = 0.0;
    for (int r = 0; r < R; ++r) {
        TimeSeries y = random_series(200, derive_seed(37, r));
        demean(y);
        sj += andrews91(y, false).value;
        sg += sample_autocov(y, 0, false).values[0];
    }
    CHECK(sj / sg == doctest::Approx(1.0).epsilon(0.10));

    // near-unit-root fit is clipped at 0.97 and reported
    TimeSeries rw;
    rw.values.resize(400);
    rw.values[0] = 0.0;
    Rng rng(5);
    for (long t = 1; t < 400; ++t) rw.values[t] = rw.values[t - 1] + 0.05 * rng.gaussian();
    LrvEstimate e = andrews91(rw, true);
    CHECK(e.diagnostics.at("prewhiten_clipped") == 1.0);
    CHECK(std::fabs(e.diagnostics.at("prewhiten_rho")) <= 0.97);

    // prewhitened estimate is close to the truth for strong dependence
    const int R2 = 50;
    double s = 0.0;
    for (int r = 0; r < R2; ++r) {
        TimeSeries y = ar1_series(10000, 0.9, derive_seed(40, r));
        demean(y);
        s += andrews91(y, true).value;
    }
    CHECK(s / R2 == doctest::Approx(100.0).epsilon(0.10));
}

TEST_CASE("kvb equals Bartlett at full bandwidth (dual route)") {
    for (int i = 0; i < 100; ++i) {
        TimeSeries y = random_series(60 + 3 * i, derive_seed(52, i));
        if (i % 2 == 0) demean(y);
        const double a = kvb(y).value;
        const double b = hac(y, LagKernel::bartlett, 1.0 / y.size(), false).value;
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
    TimeSeries c;
    c.values.assign(50, 4.2);
    demean(c);
    CHECK(kvb(c).value == doctest::Approx(0.0));
}

TEST_CASE("ewc: constants vanish, white-noise level, default B") {
    TimeSeries c;
    c.values.assign(100, 3.3);
    CHECK(std::fabs(ewc(c, 10).value) < 1e-18);
    CHECK(ewc_default_B(200) == 14);
    CHECK(ewc_default_B(200) % 2 == 0);

    const int R = 2000;
    const long T = 128;
    double s = 0.0, ss = 0.0;
    for (int r = 0; r < R; ++r) {
        TimeSeries y = random_series(T, derive_seed(61, r));
        const double v = ewc(y, T - 1).value;
        s += v;
        ss += v * v;
    }
    const double m = s / R;
    const double se = std::sqrt((ss / R - m * m) / R);
    CHECK(std::fabs(m - 1.0) < 3.0 * se);
    CHECK_THROWS_AS(ewc(c, 0), SpecError);
    CHECK_THROWS_AS(ewc(c, 100), SpecError);
}

TEST_CASE("dk_bandwidths: block count, white-noise ordering, D1 spot value") {
    TimeSeries y = random_series(200, 71);
    DkBandwidths bw = dk_bandwidths(y);
    CHECK(bw.n_T == 24);
    CHECK(bw.b2_local.size() == 8);
    for (double b2 : bw.b2_local) {
        CHECK(b2 >= 24.0 / 200.0 - 1e-12);
        CHECK(b2 <= 1.0);
    }

    // independent transcription of the reference curvature constant at u=0.5
    {
        const double u = 0.5;
        const double sw[] = {-M_PI, -3, -2, -1, 0, 1, 2, 3, M_PI};
        const double a = 0.8 * (std::cos(1.5) + std::cos(4 * M_PI * u));
        const double ap = 0.8 * (-4 * M_PI * std::sin(4 * M_PI * u));
        const double app = 0.8 * (-16 * M_PI * M_PI * std::cos(4 * M_PI * u));
        double re = 0.0;
        for (double w : sw) {
            const std::complex<double> e(std::cos(w), -std::sin(w));
            const std::complex<double> x = 1.0 + a * e;
            const std::complex<double> x2 = x * x;
            const std::complex<double> term =
                3.0 / M_PI / (x2 * x2) * ap * e - 1.0 / M_PI * std::pow(std::abs(x), -3.0) * app * e;
            re += term.real();
        }
        re /= 9.0;
        CHECK(dk_reference_d1(u) == doctest::Approx(re * re).epsilon(1e-12));
    }

    // white noise needs fewer lags than strong AR(1): larger b1 on median
    std::vector<double> b1_wn, b1_ar;
    for (int r = 0; r < 200; ++r) {
        TimeSeries wn = random_series(200, derive_seed(81, r));
        TimeSeries ar = ar1_series(200, 0.9, derive_seed(82, r));
        b1_wn.push_back(dk_bandwidths(wn).b1);
        b1_ar.push_back(dk_bandwidths(ar).b1);
    }
    CHECK(median(b1_wn) > median(b1_ar));
}

TEST_CASE("dk bandwidth homogeneity under rescaling") {
    // phi2 is scale-free; the plug-in b2 inherits the D2 ~ c^4 scaling, capped
    // by the [n_T/T, u] clamp
    TimeSeries y = ar1_series(400, 0.4, 404);
    TimeSeries ys = y;
    for (double& v : ys.values) v *= 2.0;
    DkBandwidths a = dk_bandwidths(y), b = dk_bandwidths(ys);
    CHECK(a.phi2 == doctest::Approx(b.phi2).epsilon(1e-10));
    const double lo = static_cast<double>(a.n_T) / 400.0;
    int checked = 0;
    for (size_t r = 0; r < a.b2_local.size(); ++r) {
        const double u = static_cast<double>((r + 1) * a.n_T) / 400.0;
        const double scaled = std::pow(2.0, 0.8) * a.b2_local[r];
        if (a.b2_local[r] > lo + 1e-12 && scaled < std::min(u, 1.0) - 1e-12) {
            CHECK(b.b2_local[r] == doctest::Approx(scaled).epsilon(1e-8));
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("dk_hac: stationary benchmark and contamination ordering") {
    const int R = 60;
    double s = 0.0;
    for (int r = 0; r < R; ++r) {
        TimeSeries y = ar1_series(2000, 0.5, derive_seed(90, r));
        demean(y);
        s += dk_hac(y, false).value;
    }
    CHECK(s / R == doctest::Approx(4.0).epsilon(0.10));

    // Contamination inflates KVB relative to DK beyond the intrinsic 1/3
    // full-bandwidth shrinkage: the KVB/DK ratio is larger on M1 (break in
    // persistence) than on the break-free second regime alone.
    SlsSpec m1 = builtin_spec("M1");
    SlsSpec m1b = builtin_spec("M1");
    m1b.regimes[0].ar_fn = m1.regimes[1].ar_fn;  // regime-2 dynamics everywhere
    m1b.regimes[0].sigma_fn = m1.regimes[1].sigma_fn;
    double ratio_m1 = 0.0, ratio_flat = 0.0;
    for (int r = 0; r < 300; ++r) {
        TimeSeries y = simulate_path(m1, 200, derive_seed(95, r));
        TimeSeries yf = simulate_path(m1b, 200, derive_seed(95, r));
        demean(y);
        demean(yf);
        ratio_m1 += kvb(y).value / dk_hac(y, false).value;
        ratio_flat += kvb(yf).value / dk_hac(yf, false).value;
    }
    CHECK(ratio_m1 > ratio_flat);

    // diagnostics carry the bandwidth chain
    TimeSeries y = simulate_path(m1, 200, 7);
    demean(y);
    LrvEstimate e = dk_hac(y, false);
    CHECK(e.n_T == 24);
    CHECK(e.b1 > 0.0);
    CHECK(e.b2 > 0.0);
    CHECK(e.diagnostics.count("phi2") == 1);
    LrvEstimate ep = dk_hac(y, true);
    CHECK(ep.diagnostics.at("pw_approx") == 1.0);
    CHECK(ep.value >= 0.0);
}

TEST_CASE("PSD estimators stay nonnegative on random input") {
    for (int i = 0; i < 10000; ++i) {
        TimeSeries y = random_series(40 + (i % 60), derive_seed(1001, i),
                                     std::pow(10.0, (i % 7) - 3));
        if (i % 2 == 0) demean(y);
        CHECK(kvb(y).value >= -1e-10);
        CHECK(ewc(y, 8).value >= -1e-10);
        if (i % 25 == 0) {
            CHECK(hac(y, LagKernel::bartlett, 0.05, true).value >= -1e-10);
            CHECK(hac(y, LagKernel::qs, 0.05, true).value >= -1e-10);
        }
    }
}

TEST_CASE("scale equivariance of the LRV estimators") {
    TimeSeries y = ar1_series(300, 0.3, 111);
    demean(y);
    TimeSeries ys = y;
    const double c = 5.5;
    for (double& v : ys.values) v *= c;
    CHECK(nw87(ys).value == doctest::Approx(c * c * nw87(y).value).epsilon(1e-12));
    CHECK(kvb(ys).value == doctest::Approx(c * c * kvb(y).value).epsilon(1e-12));
    CHECK(ewc(ys, 12).value == doctest::Approx(c * c * ewc(y, 12).value).epsilon(1e-12));
    CHECK(andrews91(ys).value == doctest::Approx(c * c * andrews91(y).value).epsilon(1e-12));
}

TEST_CASE("mean-shift contamination inflates long-bandwidth estimators monotonically") {
    TimeSeries base = random_series(200, 321);
    double prev_kvb = -1.0, prev_nw = -1.0;
    for (double delta : {0.0, 1.0, 2.0, 4.0}) {
        TimeSeries y = base;
        for (long t = 100; t < 200; ++t) y.values[t] += delta;
        demean(y);
        const double jk = kvb(y).value;
        const double jn = nw87(y).value;
        CHECK(jk > prev_kvb);
        CHECK(jn > prev_nw);
        prev_kvb = jk;
        prev_nw = jn;
    }
}

TEST_CASE("consistent estimators approach the long-run variance as T grows") {
    const double target = 4.0;  // AR(1), rho = 0.5
    for (const std::string method : {"nw87", "a91", "dk"}) {
        double bias_small = 0.0, bias_big = 0.0;
        const int R = 150;
        for (int r = 0; r < R; ++r) {
            TimeSeries y1 = ar1_series(500, 0.5, derive_seed(7001, r));
            TimeSeries y2 = ar1_series(4000, 0.5, derive_seed(7002, r));
            demean(y1);
            demean(y2);
            bias_small += lrv_by_method(y1, method).value - target;
            bias_big += lrv_by_method(y2, method).value - target;
        }
        bias_small /= R;
        bias_big /= R;
        CHECK(std::fabs(bias_big) < std::fabs(bias_small));
    }
}
