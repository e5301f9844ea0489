#include <cmath>

#include "doctest.h"
#include "harcontam/montecarlo.hpp"

using namespace harcontam;

TEST_CASE("builtin_experiment grids match the study layout") {
    Experiment t2 = builtin_experiment("table2");
    CHECK(t2.delta_grid == std::vector<double>{0.0, 0.05, 0.1, 0.15, 0.25, 1.0, 1.5});
    CHECK(t2.methods.size() == 7);
    CHECK(t2.T == 200);

    Experiment t61 = builtin_experiment("table6_1");
    CHECK(t61.delta_grid == std::vector<double>{0.0, 0.2, 0.5, 2.0, 5.0, 10.0});
    CHECK(t61.kind == Experiment::Kind::dm_grid);
    CHECK(t61.dm.T == 200);
    CHECK(builtin_experiment("table6_4").dm.T == 400);

    CHECK_THROWS_AS(builtin_experiment("table9"), LookupError);
    CHECK_THROWS_AS(builtin_experiment("table6_7"), LookupError);
}

TEST_CASE("run_experiment is worker-count invariant (byte-identical CSV)") {
    Experiment e = builtin_experiment("table2");
    e.reps = 120;
    e.base_seed = 99;
    e.methods = {"nw87", "ewc", "a91"};
    e.delta_grid = {0.0, 1.0};
    ExperimentTable serial = run_experiment(e, 1);
    ExperimentTable parallel = run_experiment(e, 4);
    CHECK(serial.to_csv() == parallel.to_csv());
    CHECK(serial.to_json() == parallel.to_json());
}

TEST_CASE("calibration: i.i.d. DGP with a normal-reference test holds its level") {
    Experiment e;
    e.name = "calib";
    SlsSpec iid;
    RegimeSpec r;
    iid.regimes = {r};
    iid.label = "iid";
    e.dgp = iid;
    e.methods = {"a91"};
    e.delta_grid = {0.0};
    e.T = 500;
    e.reps = 2000;
    e.base_seed = 5;
    ExperimentTable t = run_experiment(e, 2);
    const double p = t.cells[0][0];
    CHECK(std::fabs(p - 0.05) < 3.0 * t.mc_se(0, 0) + 0.01);
    CHECK(t.mc_se(0, 0) == doctest::Approx(std::sqrt(p * (1 - p) / 2000.0)));
}

TEST_CASE("acf experiment produces the comparison columns") {
    Experiment e = builtin_experiment("table1");
    e.reps = 300;
    AcfTable t = run_acf_experiment(e, 2);
    REQUIRE(t.lags == std::vector<long>{0, 1, 2, 5, 10});
    CHECK(t.gamma_recursion[0] == doctest::Approx(1.004).epsilon(2e-3));
    CHECK(t.gamma_hat[0] > 0.5);
    const std::string csv = t.to_csv();
    CHECK(csv.find("gamma_dk") != std::string::npos);
}

TEST_CASE("compare_to_reference flags exactly the broken cell") {
    ExperimentTable ref = reference_table("table2");
    ExperimentTable same = ref;
    ComparisonReport ok = compare_to_reference(same, ref);
    CHECK(ok.failures == 0);

    same.cells[4][0] = std::min(1.0, same.cells[4][0] + 0.5);
    ComparisonReport bad = compare_to_reference(same, ref);
    CHECK(bad.failures == 1);
    for (const auto& c : bad.cells)
        if (!c.pass) {
            CHECK(c.method == "nw87");
            CHECK(c.delta == 0.0);
        }
}

TEST_CASE("mc_se matches the dispersion across independent base seeds") {
    Experiment e;
    e.name = "disp";
    SlsSpec iid;
    RegimeSpec r;
    iid.regimes = {r};
    iid.label = "iid";
    e.dgp = iid;
    e.methods = {"nw87"};
    e.delta_grid = {0.1};
    e.T = 100;
    e.reps = 200;
    std::vector<double> cells;
    double se_sum = 0.0;
    for (int i = 0; i < 20; ++i) {
        e.base_seed = 1000 + i;
        ExperimentTable t = run_experiment(e, 2);
        cells.push_back(t.cells[0][0]);
        se_sum += t.mc_se(0, 0);
    }
    double m = 0.0, ss = 0.0;
    for (double c : cells) m += c;
    m /= cells.size();
    for (double c : cells) ss += (c - m) * (c - m);
    const double sd = std::sqrt(ss / (cells.size() - 1));
    const double se_bar = se_sum / 20.0;
    CHECK(sd > 0.5 * se_bar);
    CHECK(sd < 2.0 * se_bar);
}

TEST_CASE("doubling the replications does not increase mc_se") {
    Experiment e;
    e.name = "halving";
    SlsSpec iid;
    RegimeSpec r;
    iid.regimes = {r};
    iid.label = "iid";
    e.dgp = iid;
    e.methods = {"nw87", "ewc"};
    e.delta_grid = {0.0, 0.2};
    e.T = 100;
    e.base_seed = 77;
    e.reps = 400;
    ExperimentTable a = run_experiment(e, 2);
    e.reps = 800;
    ExperimentTable b = run_experiment(e, 2);
    for (size_t m = 0; m < a.methods.size(); ++m)
        for (size_t d = 0; d < a.deltas.size(); ++d)
            CHECK(b.mc_se(m, d) <= a.mc_se(m, d) + 1e-12);
}

TEST_CASE("reference tables are complete and in range") {
    for (const std::string name :
         {"table2", "table3", "table4", "table5", "table6_1", "table6_2", "table6_3",
          "table6_4"}) {
        ExperimentTable ref = reference_table(name);
        REQUIRE(ref.methods.size() == 7);
        for (const auto& row : ref.cells)
            for (double p : row) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
    }
}
