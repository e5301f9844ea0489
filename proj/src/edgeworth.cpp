#include "harcontam/edgeworth.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "harcontam/quadrature.hpp"

namespace harcontam {

double qs_spectral_window_moment2() { return 36.0 * M_PI * M_PI / 125.0; }

double f_omega2_at(const SlsSpec& spec, double u) {
    const RegimeSpec& r = spec.regime_at(u);
    const double rho = r.ar_fn(u);
    const double s2 = r.sigma_fn(u) * r.sigma_fn(u);
    const double om = 1.0 - rho;
    return -s2 * rho / (M_PI * om * om * om * om);
}

double f_u2_at(const SlsSpec& spec, double u) {
    // f(u,0) = s(u) h(rho(u)) with s = sigma^2, h(r) = (2 pi)^{-1} (1-r)^{-2}
    const RegimeSpec& reg = spec.regime_at(u);
    const double rho = reg.ar_fn(u);
    const double rho1 = reg.ar_fn.d1(u);
    const double rho2 = reg.ar_fn.d2(u);
    const double sg = reg.sigma_fn(u);
    const double sg1 = reg.sigma_fn.d1(u);
    const double sg2 = reg.sigma_fn.d2(u);
    const double s = sg * sg;
    const double s1 = 2.0 * sg * sg1;
    const double s2d = 2.0 * (sg1 * sg1 + sg * sg2);
    const double om = 1.0 - rho;
    const double h = 1.0 / (2.0 * M_PI * om * om);
    const double h1 = 2.0 / (2.0 * M_PI * om * om * om);
    const double h2 = 6.0 / (2.0 * M_PI * om * om * om * om);
    return s2d * h + 2.0 * s1 * h1 * rho1 + s * (h2 * rho1 * rho1 + h1 * rho2);
}

SpectralSummary spectral_summary_tvar1(const SlsSpec& spec, int d_f, LagKernel kernel,
                                       SmoothingKernel k2) {
    spec.validate();
    if (d_f != 2) throw SpecError("only d_f = 2 is supported");
    if (kernel != LagKernel::qs)
        throw SpecError("spectral summary requires the QS kernel (Bartlett has first-order "
                        "spectral bias, no d_f = 2 moment)");
    SpectralSummary s;
    s.d_f = 2;
    s.kernel_moment = qs_spectral_window_moment2();
    s.k2_moment = integrate([&](double x) { return x * x * smoothing_kernel_eval(k2, x); }, 0.0,
                            1.0, 1e-12);
    for (const auto& r : spec.regimes) {
        s.f0_int += integrate(
            [&](double u) {
                const double rho = r.ar_fn(u);
                const double sg = r.sigma_fn(u);
                return sg * sg / (2.0 * M_PI * (1.0 - rho) * (1.0 - rho));
            },
            r.lambda_lo, r.lambda_hi, 1e-11);
        s.fd_int += integrate([&](double u) { return f_omega2_at(spec, u); }, r.lambda_lo,
                              r.lambda_hi, 1e-11);
        s.fuu0_int += integrate([&](double u) { return f_u2_at(spec, u); }, r.lambda_lo,
                               r.lambda_hi, 1e-11);
    }
    if (!(s.f0_int > 0.0)) throw NumericError("spectral summary: f0 integral nonpositive");
    return s;
}

double cbar1(const SpectralSummary& s) {
    if (!(s.f0_int > 0.0)) throw SpecError("cbar1 requires positive f0 integral");
    double fact = 1.0;
    for (int i = 2; i <= s.d_f; ++i) fact *= i;
    return s.kernel_moment * s.fd_int / (fact * s.f0_int);
}

double cbar2(const SpectralSummary& s) {
    if (!(s.f0_int > 0.0)) throw SpecError("cbar2 requires positive f0 integral");
    return s.k2_moment * s.fuu0_int / (2.0 * s.f0_int);
}

double edgeworth_cdf(double z, const EdgeworthCdf& model, int d_f, CdfVariant variant) {
    if (model.c2 && !(model.b2 > 0.0 && model.b2 < 1.0))
        throw SpecError("edgeworth_cdf with c2 requires b2 in (0,1)");
    if (!(model.b1 > 0.0 && model.b1 < 1.0) && (model.c1 != 0.0))
        throw SpecError("edgeworth_cdf requires b1 in (0,1)");
    boost::math::normal_distribution<double> n01;
    const double b1d = std::pow(model.b1, static_cast<double>(d_f));
    double corr = 0.5 * model.c1 * b1d;
    if (model.c2) corr += 0.5 * *model.c2 * model.b2 * model.b2;
    if (variant == CdfVariant::rescaled) return boost::math::cdf(n01, z * (1.0 + corr));
    const double phi = boost::math::pdf(n01, z);
    const double val = boost::math::cdf(n01, z) + corr * z * phi;
    return std::min(1.0, std::max(0.0, val));
}

std::pair<double, std::string> erp_order_report(const std::string& method, long T, double b1,
                                                std::optional<double> b2) {
    if (method == "hac") {
        return {1.0 / std::sqrt(static_cast<double>(T) * b1), "(T b1)^{-1/2}"};
    }
    if (method == "dk") {
        if (!b2) throw SpecError("erp_order_report with method=dk requires b2");
        return {1.0 / std::sqrt(static_cast<double>(T) * b1 * *b2), "(T b1 b2)^{-1/2}"};
    }
    throw LookupError("erp_order_report: method must be 'hac' or 'dk'");
}

}  // namespace harcontam
