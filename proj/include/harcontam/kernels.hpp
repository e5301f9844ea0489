#ifndef HARCONTAM_KERNELS_HPP
#define HARCONTAM_KERNELS_HPP

#include <cmath>
#include <string>

#include "harcontam/common.hpp"

namespace harcontam {

enum class LagKernel { bartlett, qs };

inline std::string to_string(LagKernel k) {
    return k == LagKernel::bartlett ? "bartlett" : "qs";
}

inline LagKernel lag_kernel_from_string(const std::string& s) {
    if (s == "bartlett") return LagKernel::bartlett;
    if (s == "qs") return LagKernel::qs;
    throw LookupError("unknown lag kernel: " + s);
}

// K1(0)=1, even. Bartlett: max(0, 1-|x|). Quadratic spectral per Andrews (1991).
inline double lag_kernel_eval(LagKernel k, double x) {
    x = std::fabs(x);
    if (k == LagKernel::bartlett) return x < 1.0 ? 1.0 - x : 0.0;
    const double a = 6.0 * M_PI * x / 5.0;
    if (a < 1e-4) return 1.0 - a * a / 10.0;
    return 25.0 / (12.0 * M_PI * M_PI * x * x) * (std::sin(a) / a - std::cos(a));
}

// Effective lag support: lags with |K1(b1*k)| identically zero beyond this are
// skipped. QS has unbounded support, so the caller's T-1 cap applies.
inline long lag_kernel_support(LagKernel k, double b1, long tmax) {
    if (k == LagKernel::bartlett) {
        const double m = 1.0 / b1;
        return std::min<long>(tmax, static_cast<long>(std::ceil(m)));
    }
    return tmax;
}

enum class SmoothingKernel { quadratic, rectangular };

inline std::string to_string(SmoothingKernel k) {
    return k == SmoothingKernel::quadratic ? "quadratic" : "rectangular";
}

// K2 on [0,1], symmetric about 1/2, integrates to one.
inline double smoothing_kernel_eval(SmoothingKernel k, double x) {
    if (x < 0.0 || x > 1.0) return 0.0;
    if (k == SmoothingKernel::rectangular) return 1.0;
    return 6.0 * x * (1.0 - x);
}

}  // namespace harcontam

#endif
