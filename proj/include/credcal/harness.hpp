#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credcal/measures.hpp"
#include "credcal/optimizer.hpp"
#include "credcal/synth.hpp"

namespace credcal {

struct StudySpec {
    std::vector<Scenario> scenarios{Scenario::S1, Scenario::S2, Scenario::S3};
    std::vector<MeasureSpec> measures;
    std::vector<double> alphas{0.01, 0.05, 0.1, 0.15, 0.2};
    int replications = 200;
    std::size_t n = 100;
    std::size_t m = 10;
    std::size_t k = 10;
    double u = 0.01;
    int bootstrap_d = 100;
    std::uint64_t master_seed = 0;
    double margin = 0.02;
    OptimizerConfig optimizer;

    void validate() const;
};

/// ECE_conf (B=10), ECE_cwise (B=10), HL_cwise (B=5) and SKCE_ul.
std::vector<MeasureSpec> default_study_measures();

struct ErrorCurveRow {
    Scenario scenario = Scenario::S1;
    std::string measure;
    double alpha = 0.0;
    /// Replications that completed.
    int replications = 0;
    int rejections = 0;
    /// rejections / replications. Type I error under S1; one minus the
    /// Type II error under S2 and S3.
    double rate = 0.0;
    double se = 0.0;
};

struct StudyResult {
    std::vector<ErrorCurveRow> rows;
    int attempted = 0;
    int failed = 0;
    std::vector<std::string> failure_messages;
};

/// One synthetic dataset per (replication, scenario); one null distribution
/// and one minimization per (replication, scenario, measure), compared
/// against the quantile of every alpha. Replications run on the OpenMP
/// team with streams keyed by replication index. Throws NumericalFailure
/// when more than 1% of replications fail.
StudyResult run_study(const StudySpec& spec);

struct SummaryRow {
    ErrorCurveRow curve;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
};

/// Wilson score interval at the given two-sided z.
std::pair<double, double> wilson_interval(int successes, int trials, double z = 1.959963984540054);

std::vector<SummaryRow> summarize(const std::vector<ErrorCurveRow>& rows);

}  // namespace credcal
