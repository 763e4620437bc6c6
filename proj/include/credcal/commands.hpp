#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "credcal/harness.hpp"
#include "credcal/measures.hpp"
#include "credcal/optimizer.hpp"
#include "credcal/synth.hpp"

namespace credcal {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitInput = 3,
    kExitNumerical = 4,
};

int exit_code_for(ErrorKind kind);

struct TestCommand {
    std::filesystem::path dataset;
    MeasureSpec measure;
    double alpha = 0.05;
    int bootstrap_d = 100;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    /// Empty writes the report to `out`.
    std::filesystem::path output;
};

struct SimulateCommand {
    StudySpec study;
    std::filesystem::path csv = "study.csv";
    std::filesystem::path manifest = "study_manifest.json";
    bool record_timing = true;
};

struct MeasureCommand {
    std::filesystem::path dataset;
    MeasureSpec measure;
    /// Defaults to uniform weights.
    std::optional<std::vector<double>> weights;
};

struct GenerateCommand {
    ScenarioSpec scenario;
    std::filesystem::path output;
};

/// Each command reports errors on `err` and returns an ExitCode.
int run_test_command(const TestCommand& cmd, std::ostream& out, std::ostream& err);
int run_simulate_command(const SimulateCommand& cmd, std::ostream& out, std::ostream& err);
int run_measure_command(const MeasureCommand& cmd, std::ostream& out, std::ostream& err);
int run_generate_command(const GenerateCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace credcal
