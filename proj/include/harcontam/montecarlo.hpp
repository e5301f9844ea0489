#ifndef HARCONTAM_MONTECARLO_HPP
#define HARCONTAM_MONTECARLO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "harcontam/inference.hpp"

namespace harcontam {

struct Experiment {
    enum class Kind { ttest_grid, dm_grid, acf_table };
    Kind kind = Kind::ttest_grid;
    std::string name;
    SlsSpec dgp;          // ttest_grid / acf_table
    DmDesign dm;          // dm_grid
    std::vector<std::string> methods;
    std::vector<double> delta_grid;
    long T = 200;
    double level = 0.05;
    long reps = 2000;
    std::uint64_t base_seed = 1;

    void validate() const;
};

struct ExperimentTable {
    std::string name;
    std::vector<std::string> methods;
    std::vector<double> deltas;
    // cells[m][d]: rejection fraction; errors[m][d]: failed replications
    std::vector<std::vector<double>> cells;
    std::vector<std::vector<long>> errors;
    long reps = 0;
    std::uint64_t base_seed = 0;

    double mc_se(size_t m, size_t d) const;
    std::string to_csv() const;
    std::string to_json() const;
};

// ACF-comparison output (the table1 experiment kind)
struct AcfTable {
    std::vector<long> lags;
    std::vector<double> gamma_recursion;   // moment-recursion oracle
    std::vector<double> gamma_stationary;  // frozen-coefficient approximation
    std::vector<double> gamma_hat;         // MC mean of Gamma_hat(k)
    std::vector<double> gamma_hat_corr;    // MC mean of Gamma_hat(k) - d_hat*
    std::vector<double> gamma_dk;          // MC mean of Gamma_hat_DK(k)
    long reps = 0;
    std::string to_csv() const;
};

ExperimentTable run_experiment(const Experiment& exp, int workers = 1);
AcfTable run_acf_experiment(const Experiment& exp, int workers = 1);

// table1, table2..table5, table6_1..table6_4
Experiment builtin_experiment(const std::string& name);

// Published rejection rates the experiments replicate (reference study).
ExperimentTable reference_table(const std::string& name);

struct CellCheck {
    std::string method;
    double delta = 0.0;
    double got = 0.0;
    double want = 0.0;
    double allowed = 0.0;
    bool pass = true;
};

struct ComparisonReport {
    std::vector<CellCheck> cells;
    int failures = 0;
    std::string to_string() const;
};

// |got - want| <= tol + 2 sqrt(got(1-got)/R + want(1-want)/R_ref), R_ref = 2000.
ComparisonReport compare_to_reference(const ExperimentTable& table, const ExperimentTable& ref,
                                      double size_tol = 0.03, double power_tol = 0.10);

}  // namespace harcontam

#endif
