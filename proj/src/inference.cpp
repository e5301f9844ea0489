#include "harcontam/inference.hpp"

#include <omp.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "harcontam/rng.hpp"
#include "json.hpp"

namespace harcontam {

const std::vector<std::string>& lrv_method_names() {
    static const std::vector<std::string> names = {"dk",   "dk-pw", "a91", "a91-pw",
                                                   "nw87", "kvb",   "ewc"};
    return names;
}

LrvEstimate lrv_by_method(const TimeSeries& residuals, const std::string& method) {
    if (method == "dk") return dk_hac(residuals, false);
    if (method == "dk-pw") return dk_hac(residuals, true);
    if (method == "a91") return andrews91(residuals, false);
    if (method == "a91-pw") return andrews91(residuals, true);
    if (method == "nw87") return nw87(residuals);
    if (method == "kvb") return kvb(residuals);
    if (method == "ewc") return ewc(residuals, ewc_default_B(residuals.size()));
    throw UsageError("unknown LRV method '" + method +
                     "'; valid: dk dk-pw a91 a91-pw nw87 kvb ewc");
}

FixedBSettings& fixed_b_settings() {
    static FixedBSettings s;
    return s;
}

namespace {

std::mutex& cv_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, double>& cv_cache() {
    static std::map<std::string, double> c;
    return c;
}

std::string cv_key(LagKernel kernel, double b, double level, long n_sim, long grid,
                   std::uint64_t seed) {
    std::ostringstream os;
    os << to_string(kernel) << "," << fmt_g17(b) << "," << fmt_g17(level) << "," << grid << ","
       << n_sim << "," << seed;
    return os.str();
}

std::string cv_cache_path() {
    const char* dir = std::getenv("HARCONTAM_CACHE");
    if (!dir || !*dir) return {};
    return std::string(dir) + "/fixed_b_cache.csv";
}

// t-statistic on one simulated i.i.d. N(0,1) path of length G
double fixed_b_draw(LagKernel kernel, double b, long grid, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(grid);
    double sum = 0.0;
    for (long t = 0; t < grid; ++t) {
        x[t] = rng.gaussian();
        sum += x[t];
    }
    const double xbar = sum / static_cast<double>(grid);
    TimeSeries y;
    y.values.resize(grid);
    for (long t = 0; t < grid; ++t) y.values[t] = x[t] - xbar;
    double j;
    if (kernel == LagKernel::bartlett && b >= 1.0) {
        j = kvb(y).value;
    } else {
        const double m = b * static_cast<double>(grid);
        j = hac(y, kernel, 1.0 / m, false).value;
    }
    if (!(j > 0.0)) return 0.0;
    return std::sqrt(static_cast<double>(grid)) * xbar / std::sqrt(j);
}

}  // namespace

double fixed_b_critical_value(LagKernel kernel, double b, double level, long n_sim, long grid,
                              std::uint64_t seed, int workers) {
    if (!(b > 0.0 && b <= 1.0)) throw SpecError("fixed_b_critical_value requires b in (0,1]");
    if (!(level > 0.0 && level < 1.0)) throw SpecError("level must be in (0,1)");
    if (n_sim < 10000) throw SpecError("fixed_b_critical_value requires n_sim >= 10000");
    const std::string key = cv_key(kernel, b, level, n_sim, grid, seed);
    {
        std::lock_guard<std::mutex> lock(cv_mutex());
        auto it = cv_cache().find(key);
        if (it != cv_cache().end()) return it->second;
        const std::string path = cv_cache_path();
        if (!path.empty()) {
            std::ifstream in(path);
            std::string line;
            while (std::getline(in, line)) {
                const auto pos = line.rfind(',');
                if (pos == std::string::npos) continue;
                if (line.substr(0, pos) == key) {
                    const double v = std::stod(line.substr(pos + 1));
                    cv_cache()[key] = v;
                    return v;
                }
            }
        }
    }

    std::vector<double> abs_t(n_sim);
    if (workers > 1) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
        for (long r = 0; r < n_sim; ++r)
            abs_t[r] = std::fabs(fixed_b_draw(kernel, b, grid, derive_seed(seed, r)));
    } else {
        for (long r = 0; r < n_sim; ++r)
            abs_t[r] = std::fabs(fixed_b_draw(kernel, b, grid, derive_seed(seed, r)));
    }
    std::sort(abs_t.begin(), abs_t.end());
    const double q = 1.0 - level;
    long idx = static_cast<long>(std::ceil(q * static_cast<double>(n_sim))) - 1;
    idx = std::max<long>(0, std::min<long>(n_sim - 1, idx));
    const double cv = abs_t[idx];

    std::lock_guard<std::mutex> lock(cv_mutex());
    cv_cache()[key] = cv;
    const std::string path = cv_cache_path();
    if (!path.empty()) {
        const bool fresh = !std::ifstream(path).good();
        std::ofstream out(path, std::ios::app);
        if (out) {
            if (fresh) out << "kernel,b,level,grid,n_sim,seed,value\n";
            out << key << "," << fmt_g17(cv) << "\n";
        }
    }
    return cv;
}

namespace {

TestResult make_test(double stat, const std::string& method, double level, LrvEstimate lrv_est) {
    TestResult r;
    r.statistic = stat;
    r.method = method;
    r.level = level;
    r.lrv = std::move(lrv_est);
    if (method == "kvb") {
        r.reference = Reference::fixed_b_sim;
        const auto& st = fixed_b_settings();
        r.critical_value =
            fixed_b_critical_value(LagKernel::bartlett, 1.0, level, st.n_sim, st.grid, st.seed);
    } else if (method == "ewc") {
        r.reference = Reference::student_t;
        const double B = r.lrv.diagnostics.at("B");
        boost::math::students_t_distribution<double> dist(B);
        r.critical_value = boost::math::quantile(dist, 1.0 - level / 2.0);
        r.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(stat));
    } else {
        r.reference = Reference::std_normal;
        boost::math::normal_distribution<double> dist;
        r.critical_value = boost::math::quantile(dist, 1.0 - level / 2.0);
        r.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(stat));
    }
    r.reject = std::fabs(stat) > r.critical_value;
    return r;
}

}  // namespace

TestResult t_test_location(const TimeSeries& y, double beta0, const std::string& lrv_method,
                           double level) {
    const long T = y.size();
    const double ybar = mean(y.values);
    TimeSeries resid;
    resid.values.resize(T);
    for (long t = 0; t < T; ++t) resid.values[t] = y.values[t] - ybar;
    LrvEstimate j = lrv_by_method(resid, lrv_method);
    if (!(j.value > 0.0) || !std::isfinite(j.value))
        throw NumericError("degenerate variance: LRV estimate is not positive");
    const double stat = std::sqrt(static_cast<double>(T)) * (ybar - beta0) / std::sqrt(j.value);
    return make_test(stat, lrv_method, level, std::move(j));
}

DmDesign builtin_dm_design(const std::string& name) {
    DmDesign d;
    if (name == "DM1") { d.delta_spec = 1; d.T = 200; return d; }
    if (name == "DM2") { d.delta_spec = 2; d.T = 200; return d; }
    if (name == "DM3") { d.delta_spec = 3; d.T = 200; return d; }
    if (name == "DM4") { d.delta_spec = 4; d.T = 400; return d; }
    throw LookupError("unknown DM design: " + name);
}

SlsSpec DmDesign::contamination_proxy_spec() const {
    const long Tn = out_of_sample_len();
    const long in_len = T - Tn;
    // regressor window t = 3T/4 .. 3T/4+20 affects targets t+horizon, which sit
    // at out-of-sample indices t + horizon - in_len
    long w_lo = 3 * T / 4 + horizon - in_len;
    long w_hi = w_lo + 20;
    if (delta_spec == 3) {
        w_lo = T / 2 - 30 + horizon - in_len;
        w_hi = T / 2 + 20 + horizon - in_len;
    }
    w_lo = std::max<long>(1, w_lo);
    w_hi = std::min(Tn, w_hi);
    SlsSpec s;
    s.label = "dm-proxy";
    RegimeSpec pre, win, post;
    pre.lambda_lo = 0.0;
    pre.lambda_hi = static_cast<double>(w_lo - 1) / Tn;
    win.lambda_lo = pre.lambda_hi;
    win.lambda_hi = static_cast<double>(w_hi) / Tn;
    win.mean_fn = ParamCurve::constant(delta);
    post.lambda_lo = win.lambda_hi;
    post.lambda_hi = 1.0;
    s.regimes = {pre, win, post};
    return s;
}

std::pair<std::vector<double>, std::vector<double>> dm_forecast_harness(const DmDesign& design,
                                                                        std::uint64_t seed) {
    const long T = design.T;
    const long tau = design.horizon;
    const long in_end = static_cast<long>(design.split * T);
    if (!(design.split > 0.0 && design.split < 1.0) || tau < 1 || in_end < 10 || T - in_end < 20)
        throw SpecError("invalid DM design");
    Rng rng(seed);

    // AR(1) disturbances e_t = 0.3 e_{t-1} + u_t, stationary start
    std::vector<double> e(T + 1);
    e[0] = rng.gaussian() / std::sqrt(1.0 - 0.09);
    for (long t = 1; t <= T; ++t) e[t] = 0.3 * e[t - 1] + rng.gaussian();

    std::vector<double> x0(T), x1(T), x2(T);
    for (long t = 0; t < T; ++t) x0[t] = 1.0 + rng.gaussian();

    if (design.delta_spec == 0) {
        // equal-predictive-ability design: both predictors pure noise
        for (long t = 0; t < T; ++t) x1[t] = 1.0 + rng.gaussian();
        for (long t = 0; t < T; ++t) x2[t] = 1.0 + rng.gaussian();
    } else {
        for (long t = 0; t < T; ++t) x1[t] = x0[t] + rng.gaussian();
        long w_lo = 3 * T / 4, w_hi = 3 * T / 4 + 20;
        if (design.delta_spec == 3) { w_lo = T / 2 - 30; w_hi = T / 2 + 20; }
        for (long t = 1; t <= T; ++t) {
            const double z = 1.0 + rng.gaussian();
            const double u2 = rng.gaussian();
            const bool in_win = t >= w_lo && t <= w_hi;
            double base;
            if (!in_win) {
                base = x0[t - 1];
            } else if (design.delta_spec == 1) {
                base = design.delta;
            } else if (design.delta_spec == 3) {
                base = design.delta *
                       std::sin(static_cast<double>(t) / T - 0.5 - 30.0 / static_cast<double>(T));
            } else {  // specs 2 and 4
                base = design.delta * std::sin(static_cast<double>(t) / T - 0.75);
            }
            x2[t - 1] = base + 0.2 * z + 2.0 * u2;
        }
        if (design.delta_spec == 4) {
            const double cbar = std::fabs(mad_outlier_constant() * mad(x2));
            for (long pos : {6 * T / 10, 8 * T / 10})
                x2[pos - 1] = rng.uniform(cbar, 5.0 * cbar);
        }
    }

    // y_t = 1 + x0_{t-1} + e_t, targets t = 2..T (1-based)
    std::vector<double> y(T + 1);
    for (long t = 2; t <= T; ++t) y[t] = 1.0 + x0[t - 2] + e[t];

    auto fit_and_losses = [&](const std::vector<double>& x) {
        // in-sample targets t = 2..in_end regressing y_t on x_{t-1}
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const long n = in_end - 1;
        for (long t = 2; t <= in_end; ++t) {
            const double xv = x[t - 2];
            sx += xv; sy += y[t]; sxx += xv * xv; sxy += xv * y[t];
        }
        const double det = sxx - sx * sx / n;
        if (!(std::fabs(det) > 1e-12)) throw NumericError("singular regressor matrix in DM fit");
        const double beta = (sxy - sx * sy / n) / det;
        const double alpha = sy / n - beta * sx / n;
        // out-of-sample tau-step losses, targets t = in_end+tau .. T
        std::vector<double> loss;
        loss.reserve(T - in_end);
        for (long t = in_end + tau; t <= T; ++t) {
            const double err = y[t] - alpha - beta * x[t - tau - 1];
            loss.push_back(err * err);
        }
        return loss;
    };

    return {fit_and_losses(x1), fit_and_losses(x2)};
}

TestResult dm_test(const std::vector<double>& losses_1, const std::vector<double>& losses_2,
                   const std::string& lrv_method, double level) {
    if (losses_1.size() != losses_2.size()) throw SpecError("loss series length mismatch");
    const long Tn = static_cast<long>(losses_1.size());
    if (Tn < 20) throw SpecError("dm_test requires at least 20 losses");
    TimeSeries d;
    d.values.resize(Tn);
    for (long t = 0; t < Tn; ++t) d.values[t] = losses_2[t] - losses_1[t];
    const double dbar = mean(d.values);
    TimeSeries resid;
    resid.values.resize(Tn);
    for (long t = 0; t < Tn; ++t) resid.values[t] = d.values[t] - dbar;
    LrvEstimate j = lrv_by_method(resid, lrv_method);
    if (!(j.value > 0.0) || !std::isfinite(j.value))
        throw NumericError("degenerate variance: loss differential LRV is not positive");
    const double stat = std::sqrt(static_cast<double>(Tn)) * dbar / std::sqrt(j.value);
    return make_test(stat, lrv_method, level, std::move(j));
}

std::string test_result_to_json(const TestResult& r) {
    nlohmann::json j;
    j["statistic"] = r.statistic;
    j["method"] = r.method;
    j["reference"] = r.reference == Reference::std_normal
                         ? "std-normal"
                         : (r.reference == Reference::fixed_b_sim ? "fixed-b-sim" : "student-t");
    j["critical_value"] = r.critical_value;
    j["level"] = r.level;
    j["reject"] = r.reject;
    if (r.p_value) j["p_value"] = *r.p_value;
    j["lrv"] = nlohmann::json::parse(lrv_to_json(r.lrv));
    return j.dump(2);
}

}  // namespace harcontam
