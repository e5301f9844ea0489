#ifndef HARCONTAM_LRV_HPP
#define HARCONTAM_LRV_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "harcontam/kernels.hpp"
#include "harcontam/spectral.hpp"

namespace harcontam {

struct LrvEstimate {
    double value = 0.0;
    std::string method;
    double b1 = 0.0;
    double b2 = 0.0;   // 0 when not applicable
    long n_T = 0;      // 0 when not applicable
    std::map<std::string, double> diagnostics;
};

struct DkBandwidths {
    double b1 = 0.0;
    double b2_bar = 0.0;
    std::vector<double> b2_local;  // per block r = 1..floor(T/n_T)
    double phi2 = 0.0;
    long n_T = 0;
};

// Optional replacement for the built-in reference-model curvature constant
// D1(u) used by the b2 plug-in.
using D1Override = std::function<double(double)>;

// Built-in D1(u): deterministic reference-model sum over
// S_w = {-pi,-3,-2,-1,0,1,2,3,pi}.
double dk_reference_d1(double u);

// J_hat = sum_{k=-(T-1)}^{T-1} K1(b1 k) Gamma_hat(k)
LrvEstimate hac(const TimeSeries& y, LagKernel kernel, double b1, bool demean = true);

// Bartlett with b1 = 1/(0.75 T^{1/3})
LrvEstimate nw87(const TimeSeries& y);

// QS with the AR(1) plug-in S_T = 1.3221 (alpha2 T)^{1/5}; prewhiten applies
// the AR(1) filter/recolor with |rho| capped at 0.97.
LrvEstimate andrews91(const TimeSeries& y, bool prewhiten = false);

// Full-bandwidth Bartlett via the partial-sum identity; equals
// hac(y, bartlett, 1/T) to 1e-10.
LrvEstimate kvb(const TimeSeries& y);

// Equally weighted cosine estimator with B terms.
LrvEstimate ewc(const TimeSeries& y, long B);
long ewc_default_B(long T);  // nearest even integer to 0.4 T^{2/3}

// MSE plug-in bandwidths: n_T = floor(T^{0.6}); rolling AR(1) fits on trailing
// windows; phi_hat(2); D2(u) from pilot c_hat_DK; b2(u) clamped to [n_T/T, u];
// b1 = 0.6828 (phi2 T b2_bar)^{-1/5}.
DkBandwidths dk_bandwidths(const TimeSeries& y, const D1Override& d1 = {});

// DK-HAC: QS over lags of the block-integrated kernel-smoothed local
// autocovariance. prewhiten = blockwise AR(1) whitening/recoloring
// (approximation, labeled pw-approx in diagnostics).
LrvEstimate dk_hac(const TimeSeries& y, const DkBandwidths& bw, bool prewhiten = false);
LrvEstimate dk_hac(const TimeSeries& y, bool prewhiten = false);

std::string lrv_to_json(const LrvEstimate& e);

}  // namespace harcontam

#endif
