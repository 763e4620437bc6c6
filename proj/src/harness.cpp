#include "credcal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <tuple>

#include "credcal/settest.hpp"

namespace credcal {

namespace {

constexpr std::uint64_t kDataTag = 0x44415441ULL;
constexpr std::uint64_t kTestTag = 0x54455354ULL;

struct ReplicationOutcome {
    bool ok = true;
    std::string message;
    // [scenario][measure][alpha]
    std::vector<char> reject;
};

}  // namespace

void StudySpec::validate() const {
    if (replications < 1) throw Error(ErrorKind::InvalidArgument, "R must be at least 1");
    if (scenarios.empty()) throw Error(ErrorKind::InvalidArgument, "no scenarios selected");
    if (measures.empty()) throw Error(ErrorKind::InvalidArgument, "no measures selected");
    if (alphas.empty()) throw Error(ErrorKind::InvalidArgument, "no significance levels");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0 && alphas[i] < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
        if (i > 0 && !(alphas[i] > alphas[i - 1])) throw Error(ErrorKind::InvalidArgument, "alphas must be strictly increasing");
    }
    if (bootstrap_d < 20) throw Error(ErrorKind::InvalidArgument, "at least 20 bootstrap iterations are required");
    for (const auto& m : measures) m.validate();
    ScenarioSpec probe{Scenario::S1, n, m, k, u, master_seed, margin, {}};
    probe.validate();
}

std::vector<MeasureSpec> default_study_measures() {
    std::vector<MeasureSpec> out(4);
    out[0].kind = MeasureKind::EceConf;
    out[1].kind = MeasureKind::EceCwise;
    out[2].kind = MeasureKind::HlCwise;
    out[2].bins = 5;
    out[3].kind = MeasureKind::SkceUl;
    return out;
}

StudyResult run_study(const StudySpec& spec) {
    spec.validate();
    const std::size_t ns = spec.scenarios.size();
    const std::size_t nm = spec.measures.size();
    const std::size_t na = spec.alphas.size();
    std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(spec.replications));

#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < spec.replications; ++r) {
        auto& out = outcomes[static_cast<std::size_t>(r)];
        out.reject.assign(ns * nm * na, 0);
        try {
            for (std::size_t s = 0; s < ns; ++s) {
                ScenarioSpec scenario{spec.scenarios[s], spec.n, spec.m, spec.k, spec.u,
                                      derive_seed(spec.master_seed, {kDataTag, static_cast<std::uint64_t>(r),
                                                                     static_cast<std::uint64_t>(spec.scenarios[s])}),
                                      spec.margin, {}};
                const auto data = gen_scenario(scenario);
                for (std::size_t j = 0; j < nm; ++j) {
                    const auto seed = derive_seed(spec.master_seed, {kTestTag, static_cast<std::uint64_t>(r),
                                                                     static_cast<std::uint64_t>(spec.scenarios[s]),
                                                                     static_cast<std::uint64_t>(j)});
                    const auto null_stats = null_distribution_serial(data.data.set(), spec.measures[j], spec.bootstrap_d, seed);
                    OptimizerConfig optimizer = spec.optimizer;
                    optimizer.seed = derive_seed(seed, {0x4F5054ULL});
                    optimizer.parallel_restarts = false;
                    const double observed = min_calibration(data.data, spec.measures[j], optimizer).value;
                    for (std::size_t a = 0; a < na; ++a) {
                        const double threshold = empirical_quantile(null_stats, 1.0 - spec.alphas[a]);
                        out.reject[(s * nm + j) * na + a] = observed > threshold ? 1 : 0;
                    }
                }
            }
        } catch (const std::exception& e) {
            out.ok = false;
            out.message = "replication " + std::to_string(r) + ": " + e.what();
        }
    }

    StudyResult result;
    result.attempted = spec.replications;
    std::vector<int> counts(ns * nm * na, 0);
    int completed = 0;
    for (const auto& out : outcomes) {
        if (!out.ok) {
            ++result.failed;
            result.failure_messages.push_back(out.message);
            continue;
        }
        ++completed;
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += out.reject[i];
    }
    if (static_cast<double>(result.failed) > 0.01 * spec.replications) {
        throw Error(ErrorKind::NumericalFailure, std::to_string(result.failed) + " of " + std::to_string(spec.replications) +
                                                     " replications failed; first: " + result.failure_messages.front());
    }

    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t j = 0; j < nm; ++j) {
            for (std::size_t a = 0; a < na; ++a) {
                ErrorCurveRow row;
                row.scenario = spec.scenarios[s];
                row.measure = spec.measures[j].label();
                row.alpha = spec.alphas[a];
                row.replications = completed;
                row.rejections = counts[(s * nm + j) * na + a];
                row.rate = completed > 0 ? static_cast<double>(row.rejections) / completed : 0.0;
                row.se = completed > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / completed) : 0.0;
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "Wilson interval needs at least one trial");
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // The bounds are exact at the extremes; avoid rounding residue there.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

std::vector<SummaryRow> summarize(const std::vector<ErrorCurveRow>& rows) {
    if (rows.empty()) throw Error(ErrorKind::EmptyTable, "no error-curve rows to summarize");
    std::vector<SummaryRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        SummaryRow s{row, 0.0, 0.0};
        if (row.replications > 0) std::tie(s.wilson_lo, s.wilson_hi) = wilson_interval(row.rejections, row.replications);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace credcal
