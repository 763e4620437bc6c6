#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "credcal/domain.hpp"
#include "credcal/measures.hpp"
#include "credcal/optimizer.hpp"

namespace credcal {

struct TestConfig {
    MeasureSpec measure;
    double alpha = 0.05;
    int bootstrap_d = 100;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    /// Spread bootstrap iterations over the OpenMP team.
    bool parallel = true;

    void validate() const;
};

struct TestReport {
    std::vector<double> null_stats;
    double threshold = 0.0;
    double observed = 0.0;
    SimplexVector lambda_star;
    bool reject = false;
    double mc_pvalue = 1.0;
    MeasureSpec measure;
    double alpha = 0.05;
    int bootstrap_d = 0;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    bool optimizer_budget_exhausted = false;
    long optimizer_evaluations = 0;
};

/// Bootstrap distribution of the measure under the null. Iteration d, on
/// its own stream derive_seed(seed, {tag, d}):
///   1. resample N instances with replacement,
///   2. draw mixing weights uniformly on the simplex,
///   3. draw one label per resampled instance from the mixed prediction,
///   4. evaluate the measure on the mixed predictions and drawn labels.
/// Only predictions are consumed; observed labels never enter.
std::vector<double> null_distribution(const ClassifierSet& set, const MeasureSpec& measure, int iterations,
                                      std::uint64_t seed);
/// Same stream layout run in a plain loop. Bit-identical to null_distribution.
std::vector<double> null_distribution_serial(const ClassifierSet& set, const MeasureSpec& measure, int iterations,
                                             std::uint64_t seed);

/// ceil(level * D)-th smallest value (1-based).
double empirical_quantile(std::span<const double> stats, double level);

/// (1 + #{t0 >= observed}) / (D + 1).
double mc_pvalue(std::span<const double> null_stats, double observed);

/// Minimum of the measure over all mixtures of the set on the observed labels.
OptimizeResult min_calibration(const LabeledDataset& data, const MeasureSpec& measure,
                               const OptimizerConfig& optimizer = {});

TestReport set_calibration_test(const LabeledDataset& data, const TestConfig& config);

}  // namespace credcal
