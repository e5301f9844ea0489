#include "harcontam/sls.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <sstream>

#include "harcontam/quadrature.hpp"
#include "harcontam/rng.hpp"
#include "json.hpp"

namespace harcontam {

double ParamCurve::operator()(double u) const {
    switch (form) {
        case Form::constant: return a;
        case Form::cosine: return a * std::cos(b * u);
        case Form::cos_shift_cos: return a * std::cos(b - std::cos(u));
        case Form::sine_shift: return a * std::sin(u - b);
    }
    return a;
}

double ParamCurve::d1(double u) const {
    switch (form) {
        case Form::constant: return 0.0;
        case Form::cosine: return -a * b * std::sin(b * u);
        case Form::cos_shift_cos: {
            const double th = b - std::cos(u);
            return -a * std::sin(th) * std::sin(u);
        }
        case Form::sine_shift: return a * std::cos(u - b);
    }
    return 0.0;
}

double ParamCurve::d2(double u) const {
    switch (form) {
        case Form::constant: return 0.0;
        case Form::cosine: return -a * b * b * std::cos(b * u);
        case Form::cos_shift_cos: {
            const double th = b - std::cos(u);
            const double thp = std::sin(u);
            return -a * std::cos(th) * thp * thp - a * std::sin(th) * std::cos(u);
        }
        case Form::sine_shift: return -a * std::sin(u - b);
    }
    return 0.0;
}

std::string ParamCurve::form_name() const {
    switch (form) {
        case Form::constant: return "constant";
        case Form::cosine: return "cosine";
        case Form::cos_shift_cos: return "cos_shift_cos";
        case Form::sine_shift: return "sine_shift";
    }
    return "constant";
}

ParamCurve ParamCurve::from_name(const std::string& name, double a, double b) {
    if (name == "constant") return constant(a);
    if (name == "cosine") return cosine(a, b);
    if (name == "cos_shift_cos") return cos_shift_cos(a, b);
    if (name == "sine_shift") return sine_shift(a, b);
    throw LookupError("unknown curve form: " + name);
}

void SlsSpec::validate() const {
    if (regimes.empty()) throw SpecError("spec has no regimes");
    double lo = 0.0;
    for (size_t j = 0; j < regimes.size(); ++j) {
        const auto& r = regimes[j];
        if (std::fabs(r.lambda_lo - lo) > 1e-12)
            throw SpecError("regimes do not partition (0,1]: gap at " + std::to_string(lo));
        if (!(r.lambda_hi > r.lambda_lo))
            throw SpecError("regime " + std::to_string(j) + " has lambda_hi <= lambda_lo");
        // sample the curves over the regime
        for (int i = 0; i <= 32; ++i) {
            const double u = r.lambda_lo + (r.lambda_hi - r.lambda_lo) * (i + 0.5) / 33.0;
            if (std::fabs(r.ar_fn(u)) >= 1.0)
                throw SpecError("|ar(u)| >= 1 at u=" + std::to_string(u));
            if (!(r.sigma_fn(u) > 0.0))
                throw SpecError("sigma(u) <= 0 at u=" + std::to_string(u));
        }
        lo = r.lambda_hi;
    }
    if (std::fabs(lo - 1.0) > 1e-12) throw SpecError("last regime must end at 1");
    if (outliers) {
        if (!(outliers->lo_mult < outliers->hi_mult))
            throw SpecError("outlier multipliers must satisfy lo < hi");
        for (double p : outliers->positions)
            if (!(p > 0.0 && p < 1.0)) throw SpecError("outlier position outside (0,1)");
    }
}

const RegimeSpec& SlsSpec::regime_at(double u) const {
    if (!(u > 0.0 && u <= 1.0 + 1e-12)) throw SpecError("u outside (0,1]");
    for (const auto& r : regimes)
        if (u <= r.lambda_hi + 1e-12) return r;
    return regimes.back();
}

int SlsSpec::regime_index_of_t(long t, long T) const {
    for (size_t j = 0; j < regimes.size(); ++j) {
        const long hi = static_cast<long>(std::floor(regimes[j].lambda_hi * T + 1e-9));
        if (t <= hi) return static_cast<int>(j);
    }
    return static_cast<int>(regimes.size()) - 1;
}

std::vector<double> SlsSpec::break_fractions() const {
    std::vector<double> out;
    for (size_t j = 0; j + 1 < regimes.size(); ++j) out.push_back(regimes[j].lambda_hi);
    return out;
}

void TimeSeries::validate() const {
    for (double v : values)
        if (!std::isfinite(v)) throw NumericError("time series contains non-finite value");
}

double mad_outlier_constant() {
    // -1/(sqrt(2) erfc^{-1}(3/2)); erfc^{-1}(3/2) is negative.
    return -1.0 / (std::sqrt(2.0) * boost::math::erfc_inv(1.5));
}

TimeSeries simulate_path(const SlsSpec& spec, long T, std::uint64_t seed, ArInit init) {
    spec.validate();
    if (T < 2) throw SpecError("T must be >= 2");
    Rng rng(seed);

    std::vector<double> rho(T), sig(T), mu(T);
    for (long t = 1; t <= T; ++t) {
        const double u = static_cast<double>(t) / T;
        const RegimeSpec& r = spec.regimes[spec.regime_index_of_t(t, T)];
        rho[t - 1] = r.ar_fn(u);
        sig[t - 1] = r.sigma_fn(u);
        mu[t - 1] = r.mean_fn(u);
    }

    std::vector<double> x(T);
    if (init == ArInit::frozen_stationary)
        x[0] = rng.gaussian() * sig[0] / std::sqrt(1.0 - rho[0] * rho[0]);
    else
        x[0] = rng.gaussian() * sig[0];
    for (long t = 1; t < T; ++t) x[t] = rho[t] * x[t - 1] + sig[t] * rng.gaussian();

    TimeSeries y;
    y.values.resize(T);
    for (long t = 0; t < T; ++t) {
        y.values[t] = mu[t] + x[t];
        if (!std::isfinite(y.values[t])) throw NumericError("non-finite draw in simulate_path");
    }

    if (spec.outliers) {
        const double cbar = mad_outlier_constant() * mad(y.values);
        for (double p : spec.outliers->positions) {
            long t = static_cast<long>(std::floor(p * T + 1e-9));
            t = std::max<long>(1, std::min(T, t));
            y.values[t - 1] = rng.uniform(spec.outliers->lo_mult * cbar,
                                          spec.outliers->hi_mult * cbar);
        }
    }

    y.seed = seed;
    y.spec_label = spec.label;
    return y;
}

SlsSpec builtin_spec(const std::string& name) {
    SlsSpec s;
    s.label = name;
    if (name == "M1") {
        RegimeSpec r1;
        r1.lambda_lo = 0.0;
        r1.lambda_hi = 0.1;
        r1.ar_fn = ParamCurve::constant(0.9);
        r1.sigma_fn = ParamCurve::constant(1.0);
        RegimeSpec r2;
        r2.lambda_lo = 0.1;
        r2.lambda_hi = 1.0;
        r2.ar_fn = ParamCurve::cos_shift_cos(0.3, 1.5);
        r2.sigma_fn = ParamCurve::constant(std::sqrt(0.5));
        s.regimes = {r1, r2};
        return s;
    }
    if (name == "M2" || name == "M3") {
        RegimeSpec r;
        r.lambda_lo = 0.0;
        r.lambda_hi = 1.0;
        r.ar_fn = ParamCurve::cosine(0.7, 1.5);
        r.sigma_fn = ParamCurve::constant(std::sqrt(0.5));
        s.regimes = {r};
        if (name == "M3") {
            OutlierRule o;
            o.positions = {0.25, 0.5, 0.75};
            o.lo_mult = 1.0;
            o.hi_mult = 10.0;
            s.outliers = o;
        }
        return s;
    }
    if (name == "M4") {
        RegimeSpec r;
        r.lambda_lo = 0.0;
        r.lambda_hi = 1.0;
        r.ar_fn = ParamCurve::cosine(0.95, 1.5);
        r.sigma_fn = ParamCurve::constant(std::sqrt(0.4));
        s.regimes = {r};
        return s;
    }
    throw LookupError("unknown builtin spec: " + name);
}

double local_spectrum(const SlsSpec& spec, double u, double omega) {
    if (!(u > 0.0 && u <= 1.0)) throw SpecError("u outside (0,1]");
    const RegimeSpec& r = spec.regime_at(u);
    const double rho = r.ar_fn(u);
    const double s2 = r.sigma_fn(u) * r.sigma_fn(u);
    return s2 / (2.0 * M_PI) / (1.0 + rho * rho - 2.0 * rho * std::cos(omega));
}

double local_autocov_true(const SlsSpec& spec, double u, long k, bool verify) {
    if (!(u > 0.0 && u <= 1.0)) throw SpecError("u outside (0,1]");
    const RegimeSpec& r = spec.regime_at(u);
    const double rho = r.ar_fn(u);
    const double s2 = r.sigma_fn(u) * r.sigma_fn(u);
    const double closed = s2 * std::pow(rho, std::labs(k)) / (1.0 - rho * rho);
    if (verify) {
        // int_{-pi}^{pi} e^{iwk} f(u,w) dw = 2 int_0^pi cos(wk) f(u,w) dw
        const double quad =
            2.0 * integrate([&](double w) { return std::cos(w * k) * local_spectrum(spec, u, w); },
                            0.0, M_PI, 1e-10);
        if (std::fabs(quad - closed) > 1e-8)
            throw NumericError("local_autocov_true: quadrature and closed form disagree by " +
                               std::to_string(quad - closed));
    }
    return closed;
}

double theoretical_gamma(const SlsSpec& spec, long T, long k, ArInit init) {
    spec.validate();
    if (k < 0 || k >= T) throw SpecError("theoretical_gamma requires 0 <= k < T");
    std::vector<double> rho(T), sig2(T), mu(T);
    for (long t = 1; t <= T; ++t) {
        const double u = static_cast<double>(t) / T;
        const RegimeSpec& r = spec.regimes[spec.regime_index_of_t(t, T)];
        rho[t - 1] = r.ar_fn(u);
        sig2[t - 1] = r.sigma_fn(u) * r.sigma_fn(u);
        mu[t - 1] = r.mean_fn(u);
    }
    // second moments m_t = E X_t^2 of the zero-mean AR component
    std::vector<double> m(T);
    m[0] = init == ArInit::frozen_stationary ? sig2[0] / (1.0 - rho[0] * rho[0]) : sig2[0];
    for (long t = 1; t < T; ++t) m[t] = rho[t] * rho[t] * m[t - 1] + sig2[t];
    // E X_t X_{t-k} = (prod_{j=t-k+1}^t rho_j) m_{t-k}
    KahanSum acc;
    for (long t = k; t < T; ++t) {  // 0-based t, pairs (t, t-k)
        double p = 1.0;
        for (long j = t - k + 1; j <= t; ++j) p *= rho[j];
        acc.add(p * m[t - k] + mu[t] * mu[t - k]);
    }
    return acc.value() / static_cast<double>(T);
}

double theoretical_gamma_stationary(const SlsSpec& spec, long k) {
    spec.validate();
    KahanSum acc;
    for (const auto& r : spec.regimes) {
        acc.add(integrate(
            [&](double u) {
                const double rho = r.ar_fn(u);
                const double s2 = r.sigma_fn(u) * r.sigma_fn(u);
                return s2 * std::pow(rho, std::labs(k)) / (1.0 - rho * rho);
            },
            r.lambda_lo, r.lambda_hi, 1e-10));
    }
    return acc.value();
}

double d_star_true(const SlsSpec& spec) {
    spec.validate();
    const size_t n = spec.regimes.size();
    std::vector<double> mbar(n), frac(n);
    for (size_t j = 0; j < n; ++j) {
        const auto& r = spec.regimes[j];
        frac[j] = r.lambda_hi - r.lambda_lo;
        mbar[j] = integrate([&](double u) { return r.mean_fn(u); }, r.lambda_lo, r.lambda_hi,
                            1e-12) /
                  frac[j];
    }
    double d = 0.0;
    for (size_t j1 = 0; j1 < n; ++j1)
        for (size_t j2 = 0; j2 < n; ++j2)
            if (j1 != j2) d += frac[j1] * frac[j2] * (mbar[j2] - mbar[j1]) * (mbar[j2] - mbar[j1]);
    return 0.5 * d;
}

// ---------------------------------------------------------------- JSON / CSV

using nlohmann::json;

static json curve_to_json(const ParamCurve& c) {
    return json{{"form", c.form_name()}, {"a", c.a}, {"b", c.b}};
}

static ParamCurve curve_from_json(const json& j) {
    return ParamCurve::from_name(j.at("form").get<std::string>(), j.at("a").get<double>(),
                                 j.value("b", 0.0));
}

std::string sls_to_json(const SlsSpec& spec) {
    json j;
    j["label"] = spec.label;
    j["regimes"] = json::array();
    for (const auto& r : spec.regimes) {
        j["regimes"].push_back(json{{"lambda_lo", r.lambda_lo},
                                    {"lambda_hi", r.lambda_hi},
                                    {"mean", curve_to_json(r.mean_fn)},
                                    {"ar", curve_to_json(r.ar_fn)},
                                    {"sigma", curve_to_json(r.sigma_fn)}});
    }
    if (spec.outliers) {
        j["outliers"] = json{{"positions", spec.outliers->positions},
                             {"lo_mult", spec.outliers->lo_mult},
                             {"hi_mult", spec.outliers->hi_mult}};
    }
    return j.dump(2);
}

SlsSpec sls_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw SpecError(std::string("spec JSON parse error: ") + e.what());
    }
    SlsSpec s;
    try {
        s.label = j.value("label", "");
        for (const auto& rj : j.at("regimes")) {
            RegimeSpec r;
            r.lambda_lo = rj.at("lambda_lo").get<double>();
            r.lambda_hi = rj.at("lambda_hi").get<double>();
            r.mean_fn = curve_from_json(rj.at("mean"));
            r.ar_fn = curve_from_json(rj.at("ar"));
            r.sigma_fn = curve_from_json(rj.at("sigma"));
            s.regimes.push_back(r);
        }
        if (j.contains("outliers")) {
            OutlierRule o;
            o.positions = j["outliers"].at("positions").get<std::vector<double>>();
            o.lo_mult = j["outliers"].value("lo_mult", 1.0);
            o.hi_mult = j["outliers"].value("hi_mult", 10.0);
            s.outliers = o;
        }
    } catch (const json::exception& e) {
        throw SpecError(std::string("spec JSON field error: ") + e.what());
    }
    s.validate();
    return s;
}

std::string series_to_csv(const TimeSeries& y) {
    std::string out = "v\n";
    for (double v : y.values) {
        out += fmt_g17(v);
        out += '\n';
    }
    return out;
}

TimeSeries series_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    TimeSeries y;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line == "v") continue;  // header row optional
        }
        try {
            y.values.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw SpecError("bad CSV value: " + line);
        }
    }
    if (y.values.size() < 2) throw SpecError("series CSV has fewer than 2 rows");
    y.validate();
    return y;
}

}  // namespace harcontam
