#ifndef HARCONTAM_INFERENCE_HPP
#define HARCONTAM_INFERENCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "harcontam/lrv.hpp"
#include "harcontam/sls.hpp"

namespace harcontam {

// LRV method names used across tests and the CLI:
//   dk, dk-pw, a91, a91-pw, nw87, kvb, ewc
LrvEstimate lrv_by_method(const TimeSeries& residuals, const std::string& method);
const std::vector<std::string>& lrv_method_names();

enum class Reference { std_normal, fixed_b_sim, student_t };

struct TestResult {
    double statistic = 0.0;
    std::string method;
    Reference reference = Reference::std_normal;
    double critical_value = 0.0;
    double level = 0.05;
    bool reject = false;
    std::optional<double> p_value;  // absent for simulated fixed-b reference
    LrvEstimate lrv;
};

// Simulated two-sided fixed-b critical value for t = sqrt(G) xbar / sqrt(Jhat)
// on i.i.d. standard normal data of length `grid`, kernel bandwidth fraction b.
// Deterministic in (kernel, b, level, n_sim, grid, seed); cached in memory and,
// when HARCONTAM_CACHE is set, in a CSV file under that directory.
double fixed_b_critical_value(LagKernel kernel, double b, double level, long n_sim, long grid,
                              std::uint64_t seed, int workers = 1);

// Location model y_t = beta + V_t; statistic sqrt(T)(ybar - beta0)/sqrt(Jhat).
// Reference: std-normal for dk/dk-pw/a91/a91-pw/nw87, fixed-b-sim for kvb,
// student-t(B) for ewc.
TestResult t_test_location(const TimeSeries& y, double beta0, const std::string& lrv_method,
                           double level = 0.05);

struct DmDesign {
    long T = 200;            // total sample; in-sample share `split`
    double split = 0.5;
    long horizon = 1;
    int delta_spec = 1;      // specifications (1)-(4); 0 = equal-ability null design
    double delta = 0.0;

    long out_of_sample_len() const { return T - static_cast<long>(split * T); }
    // SLS proxy for the contamination pattern of the loss differential: mean
    // delta on the shifted window fraction, zero elsewhere.
    SlsSpec contamination_proxy_spec() const;
};

// DM1..DM4 descriptors (panels of the forecast-comparison study).
DmDesign builtin_dm_design(const std::string& name);

// Fixed-scheme forecast harness: fit both models on the in-sample once,
// return out-of-sample quadratic losses (losses_1, losses_2).
std::pair<std::vector<double>, std::vector<double>> dm_forecast_harness(const DmDesign& design,
                                                                        std::uint64_t seed);

// t_DM = sqrt(T_n) dbar / sqrt(J_hat(d)), d_t = L2_t - L1_t.
TestResult dm_test(const std::vector<double>& losses_1, const std::vector<double>& losses_2,
                   const std::string& lrv_method, double level = 0.05);

std::string test_result_to_json(const TestResult& r);

// Pinned simulation settings for cached fixed-b critical values.
struct FixedBSettings {
    long n_sim = 200000;
    long grid = 2000;
    std::uint64_t seed = 20240801ULL;
};
FixedBSettings& fixed_b_settings();

}  // namespace harcontam

#endif
