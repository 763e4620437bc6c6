#include "credcal/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "credcal/io.hpp"
#include "credcal/settest.hpp"

namespace credcal {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
            return kExitUsage;
        case ErrorKind::NonSimplexRow:
        case ErrorKind::ShapeMismatch:
        case ErrorKind::LabelOutOfRange:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ValueOutOfUnit:
        case ErrorKind::TooFewInstances:
        case ErrorKind::NonPositiveDof:
        case ErrorKind::NonPositiveParameter:
        case ErrorKind::EmptyStats:
        case ErrorKind::EmptyTable:
        case ErrorKind::FileNotFound:
        case ErrorKind::ParseError:
            return kExitInput;
        case ErrorKind::StartOutsideHull:
        case ErrorKind::DegenerateSegment:
        case ErrorKind::BoundaryDegenerate:
        case ErrorKind::NumericalFailure:
        case ErrorKind::ObjectiveFailure:
            return kExitNumerical;
    }
    return kExitNumerical;
}

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
    out << text;
}

nlohmann::ordered_json study_to_json(const StudySpec& spec) {
    nlohmann::ordered_json j;
    std::vector<std::string> scenarios;
    for (auto s : spec.scenarios) scenarios.emplace_back(to_string(s));
    j["scenarios"] = scenarios;
    auto measures = nlohmann::ordered_json::array();
    for (const auto& m : spec.measures) {
        auto mj = measure_to_json(m);
        mj["label"] = m.label();
        measures.push_back(std::move(mj));
    }
    j["measures"] = std::move(measures);
    j["alphas"] = spec.alphas;
    j["R"] = spec.replications;
    j["N"] = spec.n;
    j["M"] = spec.m;
    j["K"] = spec.k;
    j["u"] = spec.u;
    j["D"] = spec.bootstrap_d;
    j["master_seed"] = spec.master_seed;
    j["margin"] = spec.margin;
    j["optimizer"] = optimizer_to_json(spec.optimizer);
    return j;
}

}  // namespace

int run_test_command(const TestCommand& cmd, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto data = read_dataset(cmd.dataset);
        TestConfig config{cmd.measure, cmd.alpha, cmd.bootstrap_d, cmd.seed, cmd.optimizer, true};
        const auto report = set_calibration_test(data, config);
        const std::string text = report_to_json(report).dump(2) + "\n";
        if (cmd.output.empty()) {
            out << text;
        } else {
            write_text(cmd.output, text);
            out << (report.reject ? "reject" : "not rejected") << ": observed " << format_double(report.observed)
                << ", threshold " << format_double(report.threshold) << ", mc p-value " << format_double(report.mc_pvalue)
                << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

int run_simulate_command(const SimulateCommand& cmd, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto started = std::chrono::steady_clock::now();
        const auto result = run_study(cmd.study);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const auto summary = summarize(result.rows);

        std::ostringstream csv;
        write_study_csv(csv, summary);
        write_text(cmd.csv, csv.str());

        nlohmann::ordered_json manifest;
        manifest["command"] = "simulate";
        manifest["study"] = study_to_json(cmd.study);
        manifest["seed_scheme"] =
            "splitmix64 path derivation: dataset derive(master,[DATA,r,scenario]); test derive(master,[TEST,r,scenario,measure]); "
            "bootstrap draw d derive(test,[NULL,d]); optimizer derive(test,[OPT])";
        manifest["replications"] = {{"attempted", result.attempted},
                                    {"completed", result.attempted - result.failed},
                                    {"failed", result.failed},
                                    {"failures", result.failure_messages}};
        manifest["outputs"] = {{"csv", cmd.csv.string()}};
        if (cmd.record_timing) manifest["wall_time_seconds"] = seconds;
        write_text(cmd.manifest, manifest.dump(2) + "\n");

        const std::size_t na = cmd.study.alphas.size();
        for (std::size_t i = 0; i < summary.size(); i += na) {
            const auto& first = summary[i].curve;
            out << to_string(first.scenario) << ' ' << first.measure << " rejection rate:";
            for (std::size_t a = 0; a < na; ++a) {
                const auto& c = summary[i + a].curve;
                out << " a=" << format_double(c.alpha) << ':' << std::fixed << std::setprecision(3) << c.rate;
                out.unsetf(std::ios::floatfield);
            }
            out << (first.scenario == Scenario::S1 ? " (Type I error)" : " (1 - Type II error)") << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

int run_measure_command(const MeasureCommand& cmd, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cmd.measure.validate();
        const auto data = read_dataset(cmd.dataset);
        const std::size_t m = data.set().m();
        SimplexVector weights = SimplexVector::uniform(m);
        if (cmd.weights) {
            if (cmd.weights->size() != m) {
                throw Error(ErrorKind::DimensionMismatch, "--lambda has " + std::to_string(cmd.weights->size()) +
                                                              " weights but the dataset has M=" + std::to_string(m));
            }
            weights = SimplexVector(*cmd.weights);
        }
        const auto mixed = mix(data.set(), weights);
        const double value = evaluate(cmd.measure, mixed, data.labels());
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", value);
        out << buf << '\n';
        return static_cast<int>(kExitOk);
    });
}

int run_generate_command(const GenerateCommand& cmd, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto data = gen_scenario(cmd.scenario);
        write_dataset(cmd.output, data.data);
        out << "wrote " << cmd.output.string() << " (" << to_string(cmd.scenario.scenario) << ", N=" << cmd.scenario.n
            << ", M=" << cmd.scenario.m << ", K=" << cmd.scenario.k << ")\n";
        return static_cast<int>(kExitOk);
    });
}

}  // namespace credcal
