#include "harcontam/lrv.hpp"

#include <cmath>
#include <complex>

#include "json.hpp"

namespace harcontam {

namespace {

// AR(1) slope through the origin on consecutive pairs
double ar1_coef(const std::vector<double>& v, long lo, long hi) {  // 1-based inclusive, lo >= 2
    double num = 0.0, den = 0.0;
    for (long t = lo; t <= hi; ++t) {
        num += v[t - 1] * v[t - 2];
        den += v[t - 2] * v[t - 2];
    }
    return den > 0.0 ? num / den : 0.0;
}

double weighted_lag_sum(const AcfEstimate& acf, LagKernel kernel, double b1) {
    KahanSum acc;
    acc.add(acf.values[0]);
    for (size_t k = 1; k < acf.values.size(); ++k) {
        const double w = lag_kernel_eval(kernel, b1 * static_cast<double>(k));
        if (w != 0.0) acc.add(2.0 * w * acf.values[k]);
    }
    return acc.value();
}

}  // namespace

LrvEstimate hac(const TimeSeries& y, LagKernel kernel, double b1, bool demean) {
    const long T = y.size();
    if (!(b1 > 0.0)) throw SpecError("hac requires b1 > 0");
    const long L = lag_kernel_support(kernel, b1, T - 1);
    const AcfEstimate acf = sample_autocov(y, L, demean);
    LrvEstimate e;
    e.value = weighted_lag_sum(acf, kernel, b1);
    e.method = std::string("hac-") + to_string(kernel);
    e.b1 = b1;
    return e;
}

LrvEstimate nw87(const TimeSeries& y) {
    const long T = y.size();
    if (T < 8) throw SpecError("nw87 requires T >= 8");
    const double m = 0.75 * std::cbrt(static_cast<double>(T));
    LrvEstimate e = hac(y, LagKernel::bartlett, 1.0 / m, true);
    e.method = "nw87";
    e.diagnostics["lag_truncation"] = std::floor(m);
    return e;
}

LrvEstimate andrews91(const TimeSeries& y, bool prewhiten) {
    const long T = y.size();
    if (T < 20) throw SpecError("andrews91 requires T >= 20");
    const std::vector<double>& v = y.values;

    if (prewhiten) {
        double rho = ar1_coef(v, 2, T);
        const bool clipped = std::fabs(rho) > 0.97;
        rho = std::max(-0.97, std::min(0.97, rho));
        TimeSeries e;
        e.values.resize(T - 1);
        for (long t = 2; t <= T; ++t) e.values[t - 2] = v[t - 1] - rho * v[t - 2];
        LrvEstimate base = andrews91(e, false);
        base.value /= (1.0 - rho) * (1.0 - rho);
        base.method = "a91-pw";
        base.diagnostics["prewhiten_rho"] = rho;
        base.diagnostics["prewhiten_clipped"] = clipped ? 1.0 : 0.0;
        return base;
    }

    const double rho = ar1_coef(v, 2, T);
    double sse = 0.0, denom = 0.0;
    for (long t = 2; t <= T; ++t) {
        const double r = v[t - 1] - rho * v[t - 2];
        sse += r * r;
        denom += v[t - 2] * v[t - 2];
    }
    if (!(sse > 0.0) || !(denom > 0.0)) throw NumericError("andrews91: degenerate AR(1) fit");
    const double om = 1.0 - rho;
    const double alpha2 = 4.0 * rho * rho / (om * om * om * om);
    const double st = 1.3221 * std::pow(alpha2 * static_cast<double>(T), 0.2);
    LrvEstimate e;
    if (st <= 1e-12) {
        e = hac(y, LagKernel::qs, 1e12, true);  // only lag 0 survives
        e.b1 = 0.0;
    } else {
        e = hac(y, LagKernel::qs, 1.0 / st, true);
    }
    e.method = "a91";
    e.diagnostics["rho_hat"] = rho;
    e.diagnostics["alpha2"] = alpha2;
    e.diagnostics["S_T"] = st;
    return e;
}

LrvEstimate kvb(const TimeSeries& y) {
    const long T = y.size();
    if (T < 2) throw SpecError("kvb requires T >= 2");
    // (1/T) sum_{s,t} (1-|t-s|/T) V_t V_s via partial sums:
    // sum = (1/T) [ sum_{j=1}^{T} S_j^2 + sum_{i=1}^{T-1} (S_T - S_i)^2 ]
    const std::vector<double>& v = y.values;
    KahanSum acc;
    double s = 0.0;
    std::vector<double> ps(T);
    for (long t = 0; t < T; ++t) {
        s += v[t];
        ps[t] = s;
    }
    for (long j = 0; j < T; ++j) acc.add(ps[j] * ps[j]);
    for (long i = 0; i < T - 1; ++i) {
        const double d = ps[T - 1] - ps[i];
        acc.add(d * d);
    }
    LrvEstimate e;
    e.value = acc.value() / (static_cast<double>(T) * static_cast<double>(T));
    e.method = "kvb";
    e.b1 = 1.0 / static_cast<double>(T);
    return e;
}

long ewc_default_B(long T) {
    const double x = 0.4 * std::pow(static_cast<double>(T), 2.0 / 3.0);
    long B = 2 * static_cast<long>(std::llround(x / 2.0));
    return std::max<long>(2, std::min(B, T - 1));
}

LrvEstimate ewc(const TimeSeries& y, long B) {
    const long T = y.size();
    if (B < 1 || B >= T) throw SpecError("ewc requires 1 <= B < T");
    const std::vector<double>& v = y.values;
    KahanSum acc;
    for (long j = 1; j <= B; ++j) {
        double lam = 0.0;
        const double w = M_PI * static_cast<double>(j) / static_cast<double>(T);
        for (long t = 1; t <= T; ++t) lam += v[t - 1] * std::cos(w * (t - 0.5));
        lam *= std::sqrt(2.0 / static_cast<double>(T));
        acc.add(lam * lam);
    }
    LrvEstimate e;
    e.value = acc.value() / static_cast<double>(B);
    e.method = "ewc";
    e.diagnostics["B"] = static_cast<double>(B);
    return e;
}

double dk_reference_d1(double u) {
    static const double sw[] = {-M_PI, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, M_PI};
    const double a = 0.8 * (std::cos(1.5) + std::cos(4.0 * M_PI * u));
    const double a1 = 0.8 * (-4.0 * M_PI * std::sin(4.0 * M_PI * u));
    const double a2 = 0.8 * (-16.0 * M_PI * M_PI * std::cos(4.0 * M_PI * u));
    std::complex<double> tot(0.0, 0.0);
    for (double w : sw) {
        const std::complex<double> ejw(std::cos(w), -std::sin(w));
        const std::complex<double> x = 1.0 + a * ejw;
        const std::complex<double> t1 =
            3.0 / M_PI * std::pow(x, -4.0) * a1 * ejw;
        const std::complex<double> t2 =
            1.0 / M_PI * std::pow(std::abs(x), -3.0) * a2 * ejw;
        tot += t1 - t2;
    }
    const double m = (tot / 9.0).real();
    return m * m;
}

DkBandwidths dk_bandwidths(const TimeSeries& y, const D1Override& d1) {
    const long T = y.size();
    if (T < 50) throw SpecError("dk_bandwidths requires T >= 50");
    const std::vector<double>& v = y.values;
    DkBandwidths bw;
    bw.n_T = static_cast<long>(std::pow(static_cast<double>(T), 0.6));
    const long nT = bw.n_T;
    const long nblocks = T / nT;
    if (nblocks < 2) throw SpecError("dk_bandwidths: too few blocks");

    // rolling AR(1) fits a1(u), sigma(u) on trailing windows ending at
    // t = j n_T + 1; first feasible window is j = 1.
    double A = 0.0, B = 0.0;
    for (long j = 1; j <= nblocks - 1; ++j) {
        const long t = j * nT + 1;
        double a1 = ar1_coef(v, t - nT + 1, t);
        a1 = std::max(-0.99, std::min(0.99, a1));
        double sse = 0.0;
        for (long i = t - nT + 1; i <= t; ++i) {
            const double r = v[i - 1] - a1 * v[i - 2];
            sse += r * r;
        }
        const double sig2 = sse / static_cast<double>(nT);
        const double om = 1.0 - a1;
        A += sig2 * a1 * a1 / (om * om * om * om);
        B += sig2 / (om * om);
    }
    A *= static_cast<double>(nT) / T;
    B *= static_cast<double>(nT) / T;
    if (!(B > 0.0)) throw NumericError("dk_bandwidths: B term nonpositive");
    bw.phi2 = 18.0 * A * A / (B * B);

    // local b2 via D1/D2; pilot c_hat_DK with b2 = n_T/T
    const long L = static_cast<long>(std::pow(static_cast<double>(T), 4.0 / 25.0));
    const double b2_pilot = static_cast<double>(nT) / T;
    bw.b2_local.resize(nblocks);
    for (long r = 1; r <= nblocks; ++r) {
        const double u = static_cast<double>(r * nT) / T;
        double d2 = 0.0;
        for (long l = -L; l <= L; ++l) {
            const double c = dk_autocov_kernel(y, l, u, b2_pilot);
            d2 += c * c;
        }
        d2 *= 2.0;
        const double d1v = d1 ? d1(u) : dk_reference_d1(u);
        double b2;
        if (!(d2 > 0.0)) throw NumericError("dk_bandwidths: D2(u) nonpositive at u=" +
                                            std::to_string(u));
        if (!(d1v > 0.0)) {
            b2 = b2_pilot;
        } else {
            b2 = 1.6786 * std::pow(d1v, -0.2) * std::pow(d2, 0.2) *
                 std::pow(static_cast<double>(T), -0.2);
        }
        // floor at the block spacing (the Riemann sum over blocks must cover
        // the sample), cap at the available trailing history
        b2 = std::max(b2, b2_pilot);
        b2 = std::min({b2, u, 1.0});
        bw.b2_local[r - 1] = b2;
    }
    KahanSum bsum;
    for (long r = 1; r <= nblocks - 1; ++r) bsum.add(bw.b2_local[r - 1]);
    bw.b2_bar = bsum.value() * static_cast<double>(nT) / T;

    if (!(bw.phi2 > 0.0))
        throw NumericError("dk_bandwidths: phi2 nonpositive");
    bw.b1 = 0.6828 * std::pow(bw.phi2 * static_cast<double>(T) * bw.b2_bar, -0.2);
    return bw;
}

namespace {

// sum over lags of K1(b1 k) c_hat_DK(u, k), lags -(T-1)..(T-1)
double dk_block_lrv(const TimeSeries& y, double u, double b2, double b1) {
    const long T = y.size();
    KahanSum acc;
    acc.add(dk_autocov_kernel(y, 0, u, b2));
    for (long k = 1; k < T; ++k) {
        const double w = lag_kernel_eval(LagKernel::qs, b1 * static_cast<double>(k));
        if (std::fabs(w) < 1e-9 && k > 80) break;  // QS tail negligible
        if (w != 0.0) acc.add(2.0 * w * dk_autocov_kernel(y, k, u, b2));
    }
    return acc.value();
}

}  // namespace

LrvEstimate dk_hac(const TimeSeries& y, const DkBandwidths& bw, bool prewhiten) {
    const long T = y.size();
    const long nT = bw.n_T;
    const long nblocks = T / nT;
    LrvEstimate e;
    e.b1 = bw.b1;
    e.b2 = bw.b2_bar;
    e.n_T = nT;
    e.diagnostics["phi2"] = bw.phi2;
    e.diagnostics["blocks"] = static_cast<double>(nblocks);

    if (!prewhiten) {
        KahanSum acc;
        for (long r = 1; r <= nblocks; ++r) {
            const double u = static_cast<double>(r * nT) / T;
            acc.add(dk_block_lrv(y, u, bw.b2_local[r - 1], bw.b1));
        }
        e.value = acc.value() * static_cast<double>(nT) / T;
        e.method = "dk";
        return e;
    }

    // blockwise AR(1) whitening; tail observations past the last full block
    // are whitened with the last block's coefficient
    std::vector<double> a1(nblocks);
    TimeSeries w;
    w.values = y.values;
    for (long r = 1; r <= nblocks; ++r) {
        const long lo = (r - 1) * nT + 1;
        const long hi = r < nblocks ? r * nT : T;
        double a = ar1_coef(y.values, std::max<long>(lo, 2), hi);
        a = std::max(-0.97, std::min(0.97, a));
        a1[r - 1] = a;
        for (long t = std::max<long>(lo, 2); t <= hi; ++t)
            w.values[t - 1] = y.values[t - 1] - a * y.values[t - 2];
    }
    DkBandwidths bww = dk_bandwidths(w);
    KahanSum acc;
    for (long r = 1; r <= nblocks; ++r) {
        const double u = static_cast<double>(r * nT) / T;
        const double recolor = 1.0 / ((1.0 - a1[r - 1]) * (1.0 - a1[r - 1]));
        acc.add(recolor * dk_block_lrv(w, u, bww.b2_local[r - 1], bww.b1));
    }
    e.value = acc.value() * static_cast<double>(nT) / T;
    if (e.value < 0.0) e.value = 0.0;
    e.method = "dk-pw";
    e.b1 = bww.b1;
    e.b2 = bww.b2_bar;
    e.diagnostics["phi2"] = bww.phi2;
    e.diagnostics["pw_approx"] = 1.0;
    for (long r = 0; r < nblocks; ++r)
        e.diagnostics["pw_a1_block" + std::to_string(r + 1)] = a1[r];
    return e;
}

LrvEstimate dk_hac(const TimeSeries& y, bool prewhiten) {
    if (prewhiten) return dk_hac(y, dk_bandwidths(y), true);
    return dk_hac(y, dk_bandwidths(y), false);
}

std::string lrv_to_json(const LrvEstimate& e) {
    nlohmann::json j;
    j["value"] = e.value;
    j["method"] = e.method;
    j["b1"] = e.b1;
    if (e.b2 > 0.0) j["b2"] = e.b2;
    if (e.n_T > 0) j["n_T"] = e.n_T;
    j["diagnostics"] = e.diagnostics;
    return j.dump(2);
}

}  // namespace harcontam
