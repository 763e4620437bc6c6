#include "credcal/settest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "credcal/rng.hpp"

namespace credcal {

namespace {

constexpr std::uint64_t kNullStreamTag = 0x4E554C4CULL;

double null_draw(const ClassifierSet& set, const MeasureSpec& measure, std::uint64_t seed, int d,
                 std::vector<std::size_t>& rows, std::vector<double>& mixed, std::vector<int>& labels) {
    const std::size_t n = set.n();
    const std::size_t k = set.k();
    Rng rng(derive_seed(seed, {kNullStreamTag, static_cast<std::uint64_t>(d)}));
    rows.resize(n);
    for (auto& r : rows) r = rng.index(n);
    const auto weights = set.m() == 1 ? std::vector<double>{1.0} : rng.flat_dirichlet(set.m());
    mixed.resize(n * k);
    mix_rows_into(set, weights, rows, mixed);
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = rng.categorical({mixed.data() + i * k, k});
    return evaluate(measure, ProbView{mixed, n, k}, labels);
}

}  // namespace

void TestConfig::validate() const {
    measure.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
    if (bootstrap_d < 20) throw Error(ErrorKind::InvalidArgument, "at least 20 bootstrap iterations are required");
}

std::vector<double> null_distribution(const ClassifierSet& set, const MeasureSpec& measure, int iterations,
                                      std::uint64_t seed) {
    if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "bootstrap iteration count must be positive");
    std::vector<double> stats(static_cast<std::size_t>(iterations));
    std::vector<std::exception_ptr> failures(stats.size());
#pragma omp parallel
    {
        std::vector<std::size_t> rows;
        std::vector<double> mixed;
        std::vector<int> labels;
#pragma omp for schedule(static)
        for (int d = 0; d < iterations; ++d) {
            const auto i = static_cast<std::size_t>(d);
            try {
                stats[i] = null_draw(set, measure, seed, d, rows, mixed, labels);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return stats;
}

std::vector<double> null_distribution_serial(const ClassifierSet& set, const MeasureSpec& measure, int iterations,
                                             std::uint64_t seed) {
    if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "bootstrap iteration count must be positive");
    std::vector<double> stats(static_cast<std::size_t>(iterations));
    std::vector<std::size_t> rows;
    std::vector<double> mixed;
    std::vector<int> labels;
    for (int d = 0; d < iterations; ++d) stats[static_cast<std::size_t>(d)] = null_draw(set, measure, seed, d, rows, mixed, labels);
    return stats;
}

double empirical_quantile(std::span<const double> stats, double level) {
    if (stats.empty()) throw Error(ErrorKind::EmptyStats, "no null statistics");
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile level must lie in (0,1)");
    std::vector<double> sorted(stats.begin(), stats.end());
    std::sort(sorted.begin(), sorted.end());
    const double d = static_cast<double>(sorted.size());
    // 0.95 * 100 evaluates to 95.00000000000001; keep it at 95.
    auto rank = static_cast<std::size_t>(std::ceil(level * d - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double mc_pvalue(std::span<const double> null_stats, double observed) {
    if (null_stats.empty()) throw Error(ErrorKind::EmptyStats, "no null statistics");
    const auto exceed = std::count_if(null_stats.begin(), null_stats.end(), [&](double t) { return t >= observed; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(null_stats.size()) + 1.0);
}

OptimizeResult min_calibration(const LabeledDataset& data, const MeasureSpec& measure, const OptimizerConfig& optimizer) {
    measure.validate();
    const auto& set = data.set();
    const auto labels = data.labels();
    const std::size_t nk = set.n() * set.k();
    SimplexObjective objective = [&](std::span<const double> weights) {
        std::vector<double> mixed(nk);
        mix_into(set, weights, mixed);
        return evaluate(measure, ProbView{mixed, set.n(), set.k()}, labels);
    };
    return minimize_over_simplex(objective, set.m(), optimizer);
}

TestReport set_calibration_test(const LabeledDataset& data, const TestConfig& config) {
    config.validate();
    TestReport report;
    report.measure = config.measure;
    report.alpha = config.alpha;
    report.bootstrap_d = config.bootstrap_d;
    report.seed = config.seed;
    report.optimizer = config.optimizer;
    report.null_stats = config.parallel ? null_distribution(data.set(), config.measure, config.bootstrap_d, config.seed)
                                        : null_distribution_serial(data.set(), config.measure, config.bootstrap_d, config.seed);
    report.threshold = empirical_quantile(report.null_stats, 1.0 - config.alpha);

    OptimizerConfig optimizer = config.optimizer;
    optimizer.seed = derive_seed(config.seed, {0x4F5054ULL});
    optimizer.parallel_restarts = config.parallel;
    const auto best = min_calibration(data, config.measure, optimizer);
    report.observed = best.value;
    report.lambda_star = best.argmin;
    report.optimizer_budget_exhausted = best.budget_exhausted;
    report.optimizer_evaluations = best.evaluations;
    report.reject = report.observed > report.threshold;
    report.mc_pvalue = mc_pvalue(report.null_stats, report.observed);
    return report;
}

}  // namespace credcal
