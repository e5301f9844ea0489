#ifndef HARCONTAM_SLS_HPP
#define HARCONTAM_SLS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harcontam/common.hpp"

namespace harcontam {

// Parametric curve on rescaled time u in (0,1], with analytic first and
// second derivatives (needed for the spectral curvature integrals).
struct ParamCurve {
    enum class Form { constant, cosine, cos_shift_cos, sine_shift };
    Form form = Form::constant;
    double a = 0.0;  // scale (or the constant itself)
    double b = 0.0;  // frequency / shift, meaning depends on form

    static ParamCurve constant(double c) { return {Form::constant, c, 0.0}; }
    // a*cos(b*u)
    static ParamCurve cosine(double a_, double b_) { return {Form::cosine, a_, b_}; }
    // a*cos(b - cos(u))
    static ParamCurve cos_shift_cos(double a_, double b_) { return {Form::cos_shift_cos, a_, b_}; }
    // a*sin(u - b)
    static ParamCurve sine_shift(double a_, double b_) { return {Form::sine_shift, a_, b_}; }

    double operator()(double u) const;
    double d1(double u) const;
    double d2(double u) const;
    std::string form_name() const;
    static ParamCurve from_name(const std::string& name, double a, double b);
};

struct RegimeSpec {
    double lambda_lo = 0.0;
    double lambda_hi = 1.0;
    ParamCurve mean_fn = ParamCurve::constant(0.0);
    ParamCurve ar_fn = ParamCurve::constant(0.0);
    ParamCurve sigma_fn = ParamCurve::constant(1.0);  // innovation std dev
};

struct OutlierRule {
    std::vector<double> positions;  // time fractions in (0,1)
    double lo_mult = 1.0;           // draw ~ Uniform(lo_mult*cbar, hi_mult*cbar)
    double hi_mult = 10.0;
};

struct SlsSpec {
    std::vector<RegimeSpec> regimes;
    std::optional<OutlierRule> outliers;
    std::string label;

    void validate() const;
    const RegimeSpec& regime_at(double u) const;  // u in (0,1], breaks belong left
    int regime_index_of_t(long t, long T) const;  // regime j for t in (floor(T l_{j-1}), floor(T l_j)]
    std::vector<double> break_fractions() const;  // interior breaks only
};

struct TimeSeries {
    std::vector<double> values;
    std::optional<std::uint64_t> seed;
    std::string spec_label;

    long size() const { return static_cast<long>(values.size()); }
    void validate() const;
};

enum class ArInit { frozen_stationary, zero_start };

// MAD-to-sigma constant -1/(sqrt(2) erfc^{-1}(3/2)) ~= 1.4826
double mad_outlier_constant();

TimeSeries simulate_path(const SlsSpec& spec, long T, std::uint64_t seed,
                         ArInit init = ArInit::frozen_stationary);

// M1..M4 from the simulation design; DM designs live in inference.hpp.
SlsSpec builtin_spec(const std::string& name);

// time-varying tvAR(1) spectral density sigma^2(u)/(2pi) |1 - rho(u) e^{-iw}|^{-2}
double local_spectrum(const SlsSpec& spec, double u, double omega);

// c(u,k): closed form sigma^2 rho^{|k|} / (1-rho^2); verify=true cross-checks
// the spectral integral int e^{iwk} f(u,w) dw to 1e-8.
double local_autocov_true(const SlsSpec& spec, double u, long k, bool verify = true);

// Exact finite-T Gamma_T(k) = T^{-1} sum_{t=k+1}^T E(V_t V_{t-k}) via the
// moment recursion with the spec's time-varying coefficients.
double theoretical_gamma(const SlsSpec& spec, long T, long k,
                         ArInit init = ArInit::frozen_stationary);

// Stationary approximation int_0^1 c(u,k) du (frozen coefficients).
double theoretical_gamma_stationary(const SlsSpec& spec, long k);

// d* = 2^{-1} sum_{j1 != j2} r_j1 r_j2 (mu_bar_j2 - mu_bar_j1)^2
double d_star_true(const SlsSpec& spec);

// JSON round trip and CSV export (single column `v`)
std::string sls_to_json(const SlsSpec& spec);
SlsSpec sls_from_json(const std::string& text);
std::string series_to_csv(const TimeSeries& y);
TimeSeries series_from_csv(const std::string& text);

}  // namespace harcontam

#endif
