// Command-line front end: simulate, diagnose, lrv, ttest, dmtest, mc.
// Exit codes: 0 success, 2 usage, 3 data/spec, 4 numeric.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "harcontam/edgeworth.hpp"
#include "harcontam/montecarlo.hpp"

using namespace harcontam;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError("cannot write file: " + path);
    out << text;
}

SlsSpec load_spec(const std::string& spec_arg) {
    if (spec_arg.size() > 5 && spec_arg.substr(spec_arg.size() - 5) == ".json")
        return sls_from_json(read_file(spec_arg));
    return builtin_spec(spec_arg);
}

TimeSeries load_series(const std::string& path) { return series_from_csv(read_file(path)); }

int cmd_simulate(const std::string& spec_arg, long T, std::uint64_t seed, bool zero_start,
                 const std::string& out) {
    SlsSpec spec = load_spec(spec_arg);
    TimeSeries y = simulate_path(spec, T, seed,
                                 zero_start ? ArInit::zero_start : ArInit::frozen_stationary);
    write_file(out, series_to_csv(y));
    std::vector<double> breaks = spec.break_fractions();
    std::cout << "T=" << T << " spec=" << spec.label << " d_star_true=" << d_star_true(spec)
              << "\n";
    ContaminationReport rep = d_star_hat(y, breaks, 10);
    for (size_t j = 0; j < rep.regime_means.size(); ++j)
        std::cout << "regime " << j + 1 << " mean " << rep.regime_means[j] << "\n";
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_diagnose(const std::string& in, const std::string& prefix, long max_lag,
                 const std::vector<double>& breaks, const std::vector<double>& local_u) {
    TimeSeries y = load_series(in);
    const long T = y.size();
    max_lag = std::min(max_lag, T - 1);
    write_file(prefix + "_acf.csv", acf_to_csv(sample_autocov(y, max_lag, true)));
    long nT = static_cast<long>(std::pow(static_cast<double>(T), 0.6)) / 2 * 2;
    write_file(prefix + "_acf_dk.csv", acf_to_csv(dk_autocov(y, max_lag, nT, nT)));
    write_file(prefix + "_periodogram.csv", periodogram_to_csv(periodogram(y)));
    if (!breaks.empty()) {
        ContaminationReport rep = d_star_hat(y, breaks, max_lag);
        write_file(prefix + "_acf_corrected.csv", acf_to_csv(rep.corrected_acf));
        write_file(prefix + "_contamination.json", contamination_to_json(rep, breaks));
        std::cout << "d_hat_star=" << rep.d_hat << "\n";
    }
    for (double u : local_u) {
        std::ostringstream name;
        name << prefix << "_local_periodogram_u" << u << ".csv";
        write_file(name.str(), periodogram_to_csv(local_periodogram(y, u, nT)));
    }
    std::cout << "wrote diagnostics with prefix " << prefix << "\n";
    return 0;
}

int cmd_lrv(const std::string& in, const std::string& method, const std::string& out) {
    TimeSeries y = load_series(in);
    const double ybar = mean(y.values);
    for (double& v : y.values) v -= ybar;
    LrvEstimate e = lrv_by_method(y, method);
    const std::string text = lrv_to_json(e);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_file(out, text + "\n");
    return 0;
}

int cmd_ttest(const std::string& in, const std::string& method, double beta0, double level,
              const std::string& out) {
    TimeSeries y = load_series(in);
    TestResult r = t_test_location(y, beta0, method, level);
    const std::string text = test_result_to_json(r);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_file(out, text + "\n");
    return 0;
}

int cmd_dmtest(const std::string& loss1_path, const std::string& loss2_path,
               const std::string& method, double level, const std::string& out) {
    TimeSeries l1 = load_series(loss1_path);
    TimeSeries l2 = load_series(loss2_path);
    TestResult r = dm_test(l1.values, l2.values, method, level);
    const std::string text = test_result_to_json(r);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_file(out, text + "\n");
    return 0;
}

int cmd_mc(const std::string& table, long reps, std::uint64_t seed, int workers,
           const std::string& out, bool compare, double size_tol, double power_tol) {
    Experiment exp = builtin_experiment(table);
    if (reps > 0) exp.reps = reps;
    exp.base_seed = seed;
    if (exp.kind == Experiment::Kind::acf_table) {
        AcfTable t = run_acf_experiment(exp, workers);
        write_file(out, t.to_csv());
        std::cout << "wrote " << out << "\n";
        return 0;
    }
    ExperimentTable t = run_experiment(exp, workers);
    write_file(out, t.to_csv());
    write_file(out + ".json", t.to_json());
    std::cout << "wrote " << out << "\n";
    if (compare) {
        ComparisonReport rep =
            compare_to_reference(t, reference_table(table), size_tol, power_tol);
        write_file(out + ".compare.txt", rep.to_string());
        std::cout << rep.to_string();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-run variance estimation and HAR inference under nonstationarity"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "simulate a segmented locally stationary path");
    std::string spec_arg = "M1", out = "series.csv";
    long T = 200;
    std::uint64_t seed = 1;
    bool zero_start = false;
    sim->add_option("--spec", spec_arg, "builtin name (M1..M4) or spec JSON file");
    sim->add_option("--T", T, "sample size")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_flag("--zero-start", zero_start, "start the AR recursion at zero");
    sim->add_option("-o,--out", out, "output CSV");

    auto* diag = app.add_subcommand("diagnose", "ACF, DK-ACF, periodogram, contamination");
    std::string din, dprefix = "diag";
    long dmax = 40;
    std::vector<double> dbreaks, dlocal;
    diag->add_option("-i,--input", din, "series CSV")->required();
    diag->add_option("--prefix", dprefix, "output file prefix");
    diag->add_option("--max-lag", dmax, "max ACF lag");
    diag->add_option("--breaks", dbreaks, "break fractions in (0,1)");
    diag->add_option("--local-u", dlocal, "local periodogram midpoints");

    auto* lrvc = app.add_subcommand("lrv", "long-run variance estimate");
    std::string lin, lmethod = "dk", lout;
    lrvc->add_option("-i,--input", lin, "series CSV")->required();
    lrvc->add_option("--method", lmethod, "dk dk-pw a91 a91-pw nw87 kvb ewc");
    lrvc->add_option("-o,--out", lout, "output JSON (stdout when omitted)");

    auto* tt = app.add_subcommand("ttest", "location t-test");
    std::string tin, tmethod = "dk", tout;
    double beta0 = 0.0, tlevel = 0.05;
    tt->add_option("-i,--input", tin, "series CSV")->required();
    tt->add_option("--method", tmethod, "LRV method");
    tt->add_option("--beta0", beta0, "null value");
    tt->add_option("--level", tlevel, "test level");
    tt->add_option("-o,--out", tout, "output JSON");

    auto* dm = app.add_subcommand("dmtest", "equal-predictive-ability test on two loss series");
    std::string dm1, dm2, dmmethod = "dk", dmout;
    double dmlevel = 0.05;
    dm->add_option("--losses1", dm1, "loss CSV, model 1")->required();
    dm->add_option("--losses2", dm2, "loss CSV, model 2")->required();
    dm->add_option("--method", dmmethod, "LRV method");
    dm->add_option("--level", dmlevel, "test level");
    dm->add_option("-o,--out", dmout, "output JSON");

    auto* mc = app.add_subcommand("mc", "replication experiments (size/power tables)");
    std::string table = "table2", mcout = "mc.csv";
    long reps = 0;
    std::uint64_t mcseed = 1;
    int workers = 1;
    bool compare = false;
    double size_tol = 0.03, power_tol = 0.10;
    mc->add_option("--table", table, "table1 table2..table5 table6_1..table6_4");
    mc->add_option("--reps", reps, "replications (0 = builtin default)");
    mc->add_option("--seed", mcseed, "base seed");
    mc->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    mc->add_option("-o,--out", mcout, "output CSV");
    mc->add_flag("--compare", compare, "compare against the reference table");
    mc->add_option("--size-tol", size_tol, "size tolerance for --compare");
    mc->add_option("--power-tol", power_tol, "power tolerance for --compare");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(spec_arg, T, seed, zero_start, out);
        if (diag->parsed()) return cmd_diagnose(din, dprefix, dmax, dbreaks, dlocal);
        if (lrvc->parsed()) return cmd_lrv(lin, lmethod, lout);
        if (tt->parsed()) return cmd_ttest(tin, tmethod, beta0, tlevel, tout);
        if (dm->parsed()) return cmd_dmtest(dm1, dm2, dmmethod, dmlevel, dmout);
        if (mc->parsed())
            return cmd_mc(table, reps, mcseed, workers, mcout, compare, size_tol, power_tol);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const BoundaryError& e) {
        std::cerr << "boundary error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
