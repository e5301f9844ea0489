// Throughput comparison: serial replication loop vs the OpenMP path, for the
// Monte Carlo driver and the fixed-b critical-value simulation.
#include <chrono>
#include <cstdio>
#include <omp.h>

#include "harcontam/montecarlo.hpp"

using namespace harcontam;
using clk = std::chrono::steady_clock;

static double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

int main(int argc, char** argv) {
    long reps = argc > 1 ? std::atol(argv[1]) : 400;
    const int max_workers = omp_get_max_threads();

    Experiment exp = builtin_experiment("table2");
    exp.reps = reps;
    exp.methods = {"nw87", "kvb", "ewc", "a91", "dk"};
    exp.delta_grid = {0.0};

    // warm the critical-value cache so the timings reflect MC throughput only
    {
        const auto& st = fixed_b_settings();
        fixed_b_critical_value(LagKernel::bartlett, 1.0, exp.level, st.n_sim, st.grid, st.seed,
                               max_workers);
    }

    std::printf("%-34s %8s %10s %8s\n", "kernel", "workers", "seconds", "speedup");
    double serial = 0.0;
    for (int w = 1; w <= max_workers; w *= 2) {
        auto t0 = clk::now();
        ExperimentTable t = run_experiment(exp, w);
        const double dt = seconds_since(t0);
        if (w == 1) serial = dt;
        std::printf("%-34s %8d %10.3f %8.2f\n", "mc size cell (M1, 5 methods)", w, dt,
                    serial / dt);
        (void)t;
    }

    serial = 0.0;
    for (int w = 1; w <= max_workers; w *= 2) {
        auto t0 = clk::now();
        // distinct n_sim per worker count would hit the cache; vary the seed instead
        fixed_b_critical_value(LagKernel::bartlett, 1.0, 0.05, 50000, 1000,
                               9000000ULL + static_cast<std::uint64_t>(w), w);
        const double dt = seconds_since(t0);
        if (w == 1) serial = dt;
        std::printf("%-34s %8d %10.3f %8.2f\n", "fixed-b simulation (50k draws)", w, dt,
                    serial / dt);
    }
    return 0;
}
