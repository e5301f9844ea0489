#ifndef HARCONTAM_QUADRATURE_HPP
#define HARCONTAM_QUADRATURE_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "harcontam/common.hpp"

namespace harcontam {

// Adaptive Gauss-Kronrod (G7,K15) on [a,b], absolute tolerance target.
// Throws NumericError when the error estimate misses the target badly.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    double err = 0.0;
    double l1 = 0.0;
    double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, 15, 1e-12, &err, &l1);
    if (err > abs_tol && err > 1e-13 * (1.0 + l1))
        throw NumericError("quadrature did not converge (err=" + std::to_string(err) + ")");
    return val;
}

}  // namespace harcontam

#endif
