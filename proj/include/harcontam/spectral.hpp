#ifndef HARCONTAM_SPECTRAL_HPP
#define HARCONTAM_SPECTRAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "harcontam/kernels.hpp"
#include "harcontam/sls.hpp"

namespace harcontam {

struct AcfEstimate {
    std::vector<long> lags;
    std::vector<double> values;
    bool demeaned = true;
    std::string method = "global";  // "global" or "dk"
    int clamped_blocks = 0;         // dk only: blocks shifted inward at the edges
};

struct PeriodogramEstimate {
    std::vector<double> frequencies;  // on [0, pi]
    std::vector<double> ordinates;
    std::optional<double> window_u;   // local periodogram midpoint fraction
    std::optional<long> window_len;
};

struct ContaminationReport {
    double d_hat = 0.0;
    std::vector<double> regime_means;
    std::vector<double> regime_fractions;
    AcfEstimate corrected_acf;
};

// Gamma_hat(k) = T^{-1} sum_{t=|k|+1}^T (V_t - Vbar)(V_{t-|k|} - Vbar), divisor T.
AcfEstimate sample_autocov(const TimeSeries& y, long max_lag, bool demean = true);

// I_T(w_j) = |T^{-1/2} sum_t e^{-i w_j t} V_t|^2 at w_j = 2 pi j / T, j = 0..T/2.
PeriodogramEstimate periodogram(const TimeSeries& y);

// c_hat_T(u,k): window of length n2 centered at floor(Tu), window-mean demeaned.
// Throws BoundaryError when the window leaves [1,T].
double local_autocov_hat(const TimeSeries& y, double u, long k, long n2);

// Gamma_hat_DK(k) = (n_T/T) sum_r c_hat_T(r n_T/T, k); infeasible windows are
// shifted inward and counted in clamped_blocks.
AcfEstimate dk_autocov(const TimeSeries& y, long max_lag, long n_T, long n2);

// c_hat_DK,T(u,k) = (T b2)^{-1} sum_{s=|k|+1}^T K2(((Tu-(s-|k|/2))/T)/b2) V_s V_{s-|k|}.
// demean_local subtracts the K2-weighted local mean first (off by default; the
// estimator is normally fed globally demeaned residuals).
double dk_autocov_kernel(const TimeSeries& y, long k, double u, double b2,
                         SmoothingKernel k2 = SmoothingKernel::quadratic,
                         bool demean_local = false);

// Local periodogram over the length-n window with midpoint floor(Tu),
// ordinates at w_l = 2 pi l / n, l = 0..n/2. n must be even.
PeriodogramEstimate local_periodogram(const TimeSeries& y, double u, long n);

// Regime means, fractions, d_hat* and the d_hat*-corrected ACF.
ContaminationReport d_star_hat(const TimeSeries& y, const std::vector<double>& break_fractions,
                               long max_lag = 20);

std::string acf_to_csv(const AcfEstimate& a);
std::string periodogram_to_csv(const PeriodogramEstimate& p);
std::string contamination_to_json(const ContaminationReport& r,
                                  const std::vector<double>& break_fractions);

}  // namespace harcontam

#endif
