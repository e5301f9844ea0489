#include "harcontam/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "json.hpp"

namespace harcontam {

namespace {

// FFTW planning is not thread safe; execution on plan-local buffers is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// |DFT|^2 of x at frequencies 2 pi j / n, j = 0..n/2, scaled by 1/scale.
std::vector<double> dft_power(const std::vector<double>& x, double scale) {
    const long n = static_cast<long>(x.size());
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                              reinterpret_cast<fftw_complex*>(out.data()),
                                              FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    std::vector<double> pw(n / 2 + 1);
    for (long j = 0; j <= n / 2; ++j) pw[j] = std::norm(out[j]) / scale;
    return pw;
}

}  // namespace

AcfEstimate sample_autocov(const TimeSeries& y, long max_lag, bool demean) {
    const long T = y.size();
    if (max_lag < 0 || max_lag >= T) throw SpecError("sample_autocov requires 0 <= max_lag < T");
    double vbar = 0.0;
    if (demean) vbar = mean(y.values);
    AcfEstimate a;
    a.demeaned = demean;
    a.method = "global";
    a.lags.reserve(max_lag + 1);
    a.values.reserve(max_lag + 1);
    const double* v = y.values.data();
    for (long k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (long t = k; t < T; ++t) s += (v[t] - vbar) * (v[t - k] - vbar);
        a.lags.push_back(k);
        a.values.push_back(s / static_cast<double>(T));
    }
    return a;
}

PeriodogramEstimate periodogram(const TimeSeries& y) {
    const long T = y.size();
    if (T < 2) throw SpecError("periodogram requires T >= 2");
    PeriodogramEstimate p;
    p.ordinates = dft_power(y.values, static_cast<double>(T));
    p.frequencies.resize(p.ordinates.size());
    for (size_t j = 0; j < p.frequencies.size(); ++j)
        p.frequencies[j] = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(T);
    return p;
}

double local_autocov_hat(const TimeSeries& y, double u, long k, long n2) {
    const long T = y.size();
    if (n2 <= 0 || n2 % 2 != 0) throw SpecError("local_autocov_hat requires even n2 > 0");
    const long c = static_cast<long>(std::floor(u * T + 1e-9));
    const long ka = std::labs(k);
    const long lead_off = ka / 2;             // floor(|k|/2) on the lead index
    const long lag_off = ka - ka / 2;         // remainder on the lag index
    const long lead0 = c + lead_off - n2 / 2 + 1;
    const long lag0 = c - lag_off - n2 / 2 + 1;
    const long m0 = c - n2 / 2 + 1;
    if (lag0 < 1) throw BoundaryError("local window leaves sample on the left", lag0);
    if (lead0 + n2 - 1 > T) throw BoundaryError("local window leaves sample on the right",
                                                lead0 + n2 - 1);
    if (m0 < 1) throw BoundaryError("mean window leaves sample on the left", m0);
    if (m0 + n2 - 1 > T) throw BoundaryError("mean window leaves sample on the right",
                                             m0 + n2 - 1);
    const double* v = y.values.data();
    double vw = 0.0;
    for (long s = 0; s < n2; ++s) vw += v[m0 - 1 + s];
    vw /= static_cast<double>(n2);
    double acc = 0.0;
    for (long s = 0; s < n2; ++s)
        acc += (v[lead0 - 1 + s] - vw) * (v[lag0 - 1 + s] - vw);
    return acc / static_cast<double>(n2);
}

AcfEstimate dk_autocov(const TimeSeries& y, long max_lag, long n_T, long n2) {
    const long T = y.size();
    if (n_T <= 0 || n2 <= 0 || n_T % 2 != 0 || n2 % 2 != 0)
        throw SpecError("dk_autocov requires even positive n_T, n2");
    const long nblocks = T / n_T;
    if (nblocks < 1) throw SpecError("dk_autocov requires floor(T/n_T) >= 1");
    AcfEstimate a;
    a.method = "dk";
    a.demeaned = true;
    for (long k = 0; k <= max_lag; ++k) {
        const long ka = std::labs(k);
        // feasible window centers for this lag
        const long cmin = n2 / 2 + (ka - ka / 2);
        const long cmax = T - n2 / 2 - ka / 2;
        KahanSum acc;
        int clamped = 0;
        if (cmin <= cmax) {
            for (long r = 1; r <= nblocks; ++r) {
                long c = r * n_T;
                if (c < cmin) { c = cmin; ++clamped; }
                if (c > cmax) { c = cmax; ++clamped; }
                acc.add(local_autocov_hat(y, static_cast<double>(c) / T, k, n2));
            }
        }
        a.clamped_blocks += clamped;
        a.lags.push_back(k);
        a.values.push_back(acc.value() * static_cast<double>(n_T) / static_cast<double>(T));
    }
    return a;
}

double dk_autocov_kernel(const TimeSeries& y, long k, double u, double b2, SmoothingKernel k2,
                         bool demean_local) {
    const long T = y.size();
    if (!(b2 > 0.0 && b2 <= 1.0)) throw SpecError("dk_autocov_kernel requires b2 in (0,1]");
    const long ka = std::labs(k);
    const double* v = y.values.data();
    double m = 0.0;
    if (demean_local) {
        double wsum = 0.0, vsum = 0.0;
        for (long t = 1; t <= T; ++t) {
            const double w = smoothing_kernel_eval(k2, (u - static_cast<double>(t) / T) / b2);
            wsum += w;
            vsum += w * v[t - 1];
        }
        if (wsum > 0.0) m = vsum / wsum;
    }
    // support: (T u - (s - |k|/2)) / (T b2) in [0,1]
    const double half = static_cast<double>(ka) / 2.0;
    long s_lo = static_cast<long>(std::ceil(u * T - b2 * T + half - 1e-9));
    long s_hi = static_cast<long>(std::floor(u * T + half + 1e-9));
    s_lo = std::max(s_lo, ka + 1);
    s_hi = std::min(s_hi, T);
    double acc = 0.0;
    for (long s = s_lo; s <= s_hi; ++s) {
        const double arg = (u * T - (static_cast<double>(s) - half)) / (T * b2);
        const double w = smoothing_kernel_eval(k2, arg);
        if (w != 0.0) acc += w * (v[s - 1] - m) * (v[s - 1 - ka] - m);
    }
    return acc / (T * b2);
}

PeriodogramEstimate local_periodogram(const TimeSeries& y, double u, long n) {
    const long T = y.size();
    if (n <= 0 || n % 2 != 0) throw SpecError("local_periodogram requires even n > 0");
    const long c = static_cast<long>(std::floor(u * T + 1e-9));
    const long w0 = c - n / 2 + 1;
    if (w0 < 1) throw BoundaryError("local periodogram window leaves sample on the left", w0);
    if (w0 + n - 1 > T)
        throw BoundaryError("local periodogram window leaves sample on the right", w0 + n - 1);
    std::vector<double> seg(y.values.begin() + (w0 - 1), y.values.begin() + (w0 - 1 + n));
    PeriodogramEstimate p;
    p.ordinates = dft_power(seg, static_cast<double>(n));
    p.frequencies.resize(p.ordinates.size());
    for (size_t l = 0; l < p.frequencies.size(); ++l)
        p.frequencies[l] = 2.0 * M_PI * static_cast<double>(l) / static_cast<double>(n);
    p.window_u = u;
    p.window_len = n;
    return p;
}

ContaminationReport d_star_hat(const TimeSeries& y, const std::vector<double>& break_fractions,
                               long max_lag) {
    const long T = y.size();
    for (size_t i = 0; i < break_fractions.size(); ++i) {
        if (!(break_fractions[i] > 0.0 && break_fractions[i] < 1.0))
            throw SpecError("break fraction outside (0,1)");
        if (i > 0 && !(break_fractions[i] > break_fractions[i - 1]))
            throw SpecError("break fractions must be strictly increasing");
    }
    std::vector<long> bounds;  // regime end indices
    for (double b : break_fractions)
        bounds.push_back(static_cast<long>(std::floor(b * T + 1e-9)));
    bounds.push_back(T);

    ContaminationReport rep;
    long lo = 0;
    for (long hi : bounds) {
        if (hi <= lo) throw SpecError("empty regime in d_star_hat");
        double s = 0.0;
        for (long t = lo; t < hi; ++t) s += y.values[t];
        rep.regime_means.push_back(s / static_cast<double>(hi - lo));
        rep.regime_fractions.push_back(static_cast<double>(hi - lo) / T);
        lo = hi;
    }
    double d = 0.0;
    for (size_t j1 = 0; j1 < rep.regime_means.size(); ++j1)
        for (size_t j2 = 0; j2 < rep.regime_means.size(); ++j2)
            if (j1 != j2) {
                const double dm = rep.regime_means[j2] - rep.regime_means[j1];
                d += rep.regime_fractions[j1] * rep.regime_fractions[j2] * dm * dm;
            }
    rep.d_hat = 0.5 * d;

    rep.corrected_acf = sample_autocov(y, std::min(max_lag, T - 1), true);
    for (double& v : rep.corrected_acf.values) v -= rep.d_hat;
    rep.corrected_acf.method = "global-corrected";
    return rep;
}

std::string acf_to_csv(const AcfEstimate& a) {
    std::string out = "lag,value\n";
    for (size_t i = 0; i < a.lags.size(); ++i)
        out += std::to_string(a.lags[i]) + "," + fmt_g17(a.values[i]) + "\n";
    return out;
}

std::string periodogram_to_csv(const PeriodogramEstimate& p) {
    std::string out = "freq,value\n";
    for (size_t i = 0; i < p.frequencies.size(); ++i)
        out += fmt_g17(p.frequencies[i]) + "," + fmt_g17(p.ordinates[i]) + "\n";
    return out;
}

std::string contamination_to_json(const ContaminationReport& r,
                                  const std::vector<double>& break_fractions) {
    nlohmann::json j;
    j["d_hat"] = r.d_hat;
    j["regimes"] = nlohmann::json::array();
    double lo = 0.0;
    for (size_t i = 0; i < r.regime_means.size(); ++i) {
        const double hi = i < break_fractions.size() ? break_fractions[i] : 1.0;
        j["regimes"].push_back(
            nlohmann::json{{"lo", lo}, {"hi", hi}, {"mean", r.regime_means[i]}});
        lo = hi;
    }
    j["corrected_acf"] = r.corrected_acf.values;
    return j.dump(2);
}

}  // namespace harcontam
