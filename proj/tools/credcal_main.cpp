#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credcal/commands.hpp"

namespace {

using namespace credcal;

struct MeasureFlags {
    std::string name = "ece_conf";
    int bins = 0;
    std::string binning;
    double bandwidth = 2.0;
    long long pair_shuffle_seed = -1;

    void add_to(CLI::App* app) {
        app->add_option("--measure", name, "ece_conf | ece_cwise | hl_cwise | skce_ul | skce_uq")->capture_default_str();
        app->add_option("--bins", bins, "bin count (default 10 for ECE, 5 for HL)");
        app->add_option("--binning", binning, "equal_width | equal_frequency (default depends on measure)");
        app->add_option("--bandwidth", bandwidth, "kernel bandwidth inside exp(-TV/bandwidth)")->capture_default_str();
        app->add_option("--pair-shuffle-seed", pair_shuffle_seed, "shuffle instances before SKCE_ul pairing");
    }

    MeasureSpec build() const { return parse(name, bins); }

    MeasureSpec parse(const std::string& token, int default_bins) const {
        MeasureSpec spec;
        auto colon = token.find(':');
        spec.kind = parse_measure_kind(token.substr(0, colon));
        if (colon != std::string::npos) {
            spec.bins = std::stoi(token.substr(colon + 1));
        } else if (default_bins > 0) {
            spec.bins = default_bins;
        } else {
            spec.bins = spec.kind == MeasureKind::HlCwise ? 5 : 10;
        }
        if (!binning.empty()) spec.binning = parse_binning(binning);
        spec.bandwidth = bandwidth;
        if (pair_shuffle_seed >= 0) spec.pair_shuffle_seed = static_cast<std::uint64_t>(pair_shuffle_seed);
        spec.validate();
        return spec;
    }
};

const auto kOpenUnit = CLI::Validator(
    [](std::string& v) -> std::string {
        try {
            const double x = std::stod(v);
            if (x > 0.0 && x < 1.0) return {};
        } catch (...) {
        }
        return "value " + v + " must lie strictly between 0 and 1";
    },
    "(0,1)");

std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
    return w;
}

void configure_workers(int workers) {
    if (workers <= 0) {
        if (const char* env = std::getenv("CREDCAL_WORKERS")) workers = std::atoi(env);
    }
    if (workers > 0) omp_set_num_threads(workers);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calibration tests for probabilistic classifier sets"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "worker threads (fallback: CREDCAL_WORKERS)");

    // test
    auto* test = app.add_subcommand("test", "run the set calibration test on a dataset file");
    TestCommand test_cmd;
    MeasureFlags test_measure;
    std::string test_dataset, test_output;
    long long test_seed = 0;
    test->add_option("dataset", test_dataset, "dataset file")->required();
    test_measure.add_to(test);
    test->add_option("--alpha", test_cmd.alpha, "significance level")->check(kOpenUnit)->capture_default_str();
    test->add_option("--D", test_cmd.bootstrap_d, "bootstrap iterations")->check(CLI::Range(20, 1000000))->capture_default_str();
    test->add_option("--seed", test_seed, "master seed")->capture_default_str();
    test->add_option("--max-evals", test_cmd.optimizer.max_evals, "optimizer evaluations per restart")->capture_default_str();
    test->add_option("--random-starts", test_cmd.optimizer.random_starts, "random optimizer restarts")->capture_default_str();
    test->add_option("-o,--output", test_output, "report JSON path (default: stdout)");
    test->add_option("--workers", workers, "worker threads");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo Type I / Type II error study");
    SimulateCommand sim_cmd;
    MeasureFlags sim_measure;
    std::vector<std::string> sim_scenarios{"S1", "S2", "S3"};
    std::vector<std::string> sim_measures;
    std::vector<double> sim_alphas;
    std::string sim_csv = "study.csv", sim_manifest = "study_manifest.json", profile = "desk";
    long long sim_seed = 0;
    bool no_timing = false;
    auto& study = sim_cmd.study;
    simulate->add_option("--scenario", sim_scenarios, "S1 S2 S3")->capture_default_str();
    simulate->add_option("--measure", sim_measures, "measures, optionally name:bins (default: all but skce_uq)");
    simulate->add_option("--bandwidth", sim_measure.bandwidth, "kernel bandwidth")->capture_default_str();
    simulate->add_option("--alpha", sim_alphas, "significance levels")->check(kOpenUnit);
    simulate->add_option("--profile", profile, "desk (R=200) or full (R=1000)")
        ->check(CLI::IsMember({"desk", "full"}))
        ->capture_default_str();
    auto* r_opt = simulate->add_option("--R", study.replications, "replications")->check(CLI::PositiveNumber);
    simulate->add_option("--N", study.n, "instances per dataset")->capture_default_str();
    simulate->add_option("--M", study.m, "ensemble size")->capture_default_str();
    simulate->add_option("--K", study.k, "classes")->capture_default_str();
    simulate->add_option("--u", study.u, "ensemble spread")->capture_default_str();
    simulate->add_option("--D", study.bootstrap_d, "bootstrap iterations")->capture_default_str();
    simulate->add_option("--margin", study.margin, "outside-sampling margin (0 = closed segment)")->capture_default_str();
    simulate->add_option("--max-evals", study.optimizer.max_evals, "optimizer evaluations per restart")->capture_default_str();
    simulate->add_option("--random-starts", study.optimizer.random_starts, "random optimizer restarts")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "master seed")->capture_default_str();
    simulate->add_option("--csv", sim_csv, "error-curve CSV path")->capture_default_str();
    simulate->add_option("--manifest", sim_manifest, "manifest JSON path")->capture_default_str();
    simulate->add_flag("--no-timing", no_timing, "omit wall time from the manifest");
    simulate->add_option("--workers", workers, "worker threads");

    // measure
    auto* measure = app.add_subcommand("measure", "evaluate one calibration measure of a mixture");
    MeasureCommand measure_cmd;
    MeasureFlags measure_flags;
    std::string measure_dataset, lambda_text;
    measure->add_option("dataset", measure_dataset, "dataset file")->required();
    measure_flags.add_to(measure);
    measure->add_option("--lambda", lambda_text, "comma-separated mixing weights (default uniform)");

    // generate
    auto* generate = app.add_subcommand("generate", "write a synthetic scenario dataset");
    GenerateCommand gen_cmd;
    std::string gen_scenario = "S1", gen_output;
    long long gen_seed = 0;
    generate->add_option("--scenario", gen_scenario, "S1 | S2 | S3")->capture_default_str();
    generate->add_option("--N", gen_cmd.scenario.n, "instances")->capture_default_str();
    generate->add_option("--M", gen_cmd.scenario.m, "ensemble size")->capture_default_str();
    generate->add_option("--K", gen_cmd.scenario.k, "classes")->capture_default_str();
    generate->add_option("--u", gen_cmd.scenario.u, "ensemble spread")->capture_default_str();
    generate->add_option("--margin", gen_cmd.scenario.margin, "outside-sampling margin")->capture_default_str();
    generate->add_option("--seed", gen_seed, "seed")->capture_default_str();
    generate->add_option("-o,--output", gen_output, "output dataset path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << '\n';
        return kExitUsage;
    }
    configure_workers(workers);

    try {
        if (*test) {
            test_cmd.dataset = test_dataset;
            test_cmd.measure = test_measure.build();
            test_cmd.seed = static_cast<std::uint64_t>(test_seed);
            test_cmd.output = test_output;
            return run_test_command(test_cmd, std::cout, std::cerr);
        }
        if (*simulate) {
            if (profile == "full" && r_opt->count() == 0) study.replications = 1000;
            study.scenarios.clear();
            for (const auto& s : sim_scenarios) study.scenarios.push_back(parse_scenario(s));
            if (sim_measures.empty()) {
                study.measures = default_study_measures();
                for (auto& m : study.measures) m.bandwidth = sim_measure.bandwidth;
            } else {
                study.measures.clear();
                for (const auto& token : sim_measures) study.measures.push_back(sim_measure.parse(token, 0));
            }
            if (!sim_alphas.empty()) study.alphas = sim_alphas;
            study.master_seed = static_cast<std::uint64_t>(sim_seed);
            sim_cmd.csv = sim_csv;
            sim_cmd.manifest = sim_manifest;
            sim_cmd.record_timing = !no_timing;
            study.validate();
            return run_simulate_command(sim_cmd, std::cout, std::cerr);
        }
        if (*measure) {
            measure_cmd.dataset = measure_dataset;
            measure_cmd.measure = measure_flags.build();
            if (!lambda_text.empty()) measure_cmd.weights = parse_weights(lambda_text);
            return run_measure_command(measure_cmd, std::cout, std::cerr);
        }
        if (*generate) {
            gen_cmd.scenario.scenario = parse_scenario(gen_scenario);
            gen_cmd.scenario.seed = static_cast<std::uint64_t>(gen_seed);
            gen_cmd.output = gen_output;
            return run_generate_command(gen_cmd, std::cout, std::cerr);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
