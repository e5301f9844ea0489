#ifndef HARCONTAM_EDGEWORTH_HPP
#define HARCONTAM_EDGEWORTH_HPP

#include <optional>
#include <string>
#include <utility>

#include "harcontam/kernels.hpp"
#include "harcontam/sls.hpp"

namespace harcontam {

struct SpectralSummary {
    double f0_int = 0.0;    // int_0^1 f(u,0) du
    double fd_int = 0.0;    // int_0^1 f^(d_f)(u,0) du (omega-derivative)
    double fuu0_int = 0.0;  // int over continuity set of (d^2/du^2) f(u,0) du
    int d_f = 2;
    double kernel_moment = 0.0;  // mu_{d_f}(K) of the spectral window
    double k2_moment = 0.0;      // int x^2 K2(x) dx
};

struct EdgeworthCdf {
    double c1 = 0.0;
    std::optional<double> c2;
    double b1 = 0.0;
    double b2 = 0.0;  // required when c2 present
};

enum class CdfVariant { additive, rescaled };

// Analytic spectral derivative integrals for a tvAR(1) spec. Only d_f = 2 and
// the QS lag kernel are supported (the simulations use no other pair).
SpectralSummary spectral_summary_tvar1(const SlsSpec& spec, int d_f = 2,
                                       LagKernel kernel = LagKernel::qs,
                                       SmoothingKernel k2 = SmoothingKernel::quadratic);

// pointwise derivatives, exposed for the finite-difference oracles
double f_omega2_at(const SlsSpec& spec, double u);  // (d^2/dw^2) f(u, w) at w = 0
double f_u2_at(const SlsSpec& spec, double u);      // (d^2/du^2) f(u, 0)

double cbar1(const SpectralSummary& s);
double cbar2(const SpectralSummary& s);

// P(Z <= z) ~ Phi(z) + (1/2) c1 z phi(z) b1^{d_f} (+ (1/2) c2 z phi(z) b2^2),
// clamped to [0,1]. The rescaled variant evaluates
// Phi(z (1 + c1 b1^{d_f}/2 + c2 b2^2/2)).
double edgeworth_cdf(double z, const EdgeworthCdf& model, int d_f = 2,
                     CdfVariant variant = CdfVariant::additive);

// nominal error-in-rejection-probability scales: {(T b1)^{-1/2}, label} for
// hac, (T b1 b2)^{-1/2} for dk
std::pair<double, std::string> erp_order_report(const std::string& method, long T, double b1,
                                                std::optional<double> b2 = std::nullopt);

double qs_spectral_window_moment2();  // mu_2(K) for the QS kernel, 36 pi^2/125

}  // namespace harcontam

#endif
