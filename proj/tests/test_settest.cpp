#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "credcal/settest.hpp"
#include "credcal/synth.hpp"

using namespace credcal;

namespace {

MeasureSpec measure(MeasureKind kind, int bins = 10) {
    MeasureSpec s;
    s.kind = kind;
    s.bins = bins;
    return s;
}

PredictionSet constant(std::size_t n, std::vector<double> row) {
    std::vector<double> probs;
    for (std::size_t i = 0; i < n; ++i) probs.insert(probs.end(), row.begin(), row.end());
    return PredictionSet(n, row.size(), probs);
}

LabeledDataset random_dataset(Rng& rng, std::size_t m, std::size_t n, std::size_t k) {
    std::vector<PredictionSet> members;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> probs;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = rng.flat_dirichlet(k);
            probs.insert(probs.end(), r.begin(), r.end());
        }
        members.emplace_back(n, k, probs);
    }
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.index(k));
    return LabeledDataset(ClassifierSet(members), labels);
}

}  // namespace

TEST(EmpiricalQuantile, OrderStatistic) {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::reverse(v.begin(), v.end());
    EXPECT_EQ(empirical_quantile(v, 0.95), 95.0);
    EXPECT_EQ(empirical_quantile(v, 0.99), 99.0);
    EXPECT_EQ(empirical_quantile(v, 0.951), 96.0);
    EXPECT_EQ(empirical_quantile(v, 0.001), 1.0);
    EXPECT_THROW(empirical_quantile(std::vector<double>{}, 0.5), Error);
}

TEST(McPvalue, Bounds) {
    std::vector<double> v(99);
    std::iota(v.begin(), v.end(), 1.0);
    EXPECT_EQ(mc_pvalue(v, 1000.0), 1.0 / 100.0);
    EXPECT_EQ(mc_pvalue(v, -1.0), 1.0);
    EXPECT_EQ(mc_pvalue(v, 50.0), 51.0 / 100.0);
}

TEST(NullDistribution, OneHotMembersGiveZero) {
    // Every mixture of one-hot predictions on the same class is one-hot; drawn labels match it.
    Rng rng(41);
    const std::size_t n = 30, k = 4;
    std::vector<double> probs(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) probs[i * k + rng.index(k)] = 1.0;
    const ClassifierSet set({PredictionSet(n, k, probs), PredictionSet(n, k, probs)});
    for (auto kind : {MeasureKind::EceConf, MeasureKind::EceCwise, MeasureKind::SkceUl, MeasureKind::SkceUq}) {
        for (double t : null_distribution(set, measure(kind), 25, 3)) EXPECT_EQ(t, 0.0);
    }
}

TEST(NullDistribution, IgnoresObservedLabels) {
    Rng rng(42);
    auto a = random_dataset(rng, 3, 40, 3);
    std::vector<int> other(a.labels().begin(), a.labels().end());
    for (auto& y : other) y = (y + 1) % 3;
    LabeledDataset b(a.set(), other);
    EXPECT_EQ(null_distribution(a.set(), measure(MeasureKind::EceConf), 30, 9),
              null_distribution(b.set(), measure(MeasureKind::EceConf), 30, 9));
}

TEST(SetTest, MiscalibratedConstantPredictorRejects) {
    const std::size_t n = 100;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 2);
    const LabeledDataset data(ClassifierSet({constant(n, {0.9, 0.1}), constant(n, {0.9, 0.1})}), labels);
    TestConfig cfg;
    cfg.measure = measure(MeasureKind::EceConf);
    cfg.seed = 1;
    const auto report = set_calibration_test(data, cfg);
    EXPECT_NEAR(report.observed, 0.4, 1e-9);
    EXPECT_TRUE(report.reject);
    EXPECT_EQ(report.mc_pvalue, 1.0 / 101.0);
}

TEST(SetTest, ReportInvariants) {
    Rng rng(43);
    for (int trial = 0; trial < 6; ++trial) {
        const auto data = random_dataset(rng, 2 + rng.index(3), 40, 3);
        TestConfig cfg;
        cfg.measure = measure(trial % 2 ? MeasureKind::SkceUl : MeasureKind::EceCwise, 5);
        cfg.alpha = 0.1;
        cfg.bootstrap_d = 40;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto r = set_calibration_test(data, cfg);
        EXPECT_EQ(r.null_stats.size(), 40u);
        EXPECT_EQ(r.reject, r.observed > r.threshold);
        EXPECT_GE(r.mc_pvalue, 1.0 / 41.0);
        EXPECT_LE(r.mc_pvalue, 1.0);
        EXPECT_TRUE(is_simplex(r.lambda_star.coords()));
        EXPECT_EQ(r.threshold, empirical_quantile(r.null_stats, 0.9));
        EXPECT_NEAR(r.observed, evaluate(cfg.measure, mix(data.set(), r.lambda_star).view(), data.labels()), 1e-12);
    }
}

TEST(SetTest, Deterministic) {
    Rng rng(44);
    const auto data = random_dataset(rng, 3, 50, 4);
    TestConfig cfg;
    cfg.measure = measure(MeasureKind::HlCwise, 5);
    cfg.seed = 17;
    const auto a = set_calibration_test(data, cfg);
    cfg.parallel = false;
    const auto b = set_calibration_test(data, cfg);
    EXPECT_EQ(a.null_stats, b.null_stats);
    EXPECT_EQ(a.observed, b.observed);
    EXPECT_EQ(a.lambda_star.vec(), b.lambda_star.vec());
}

TEST(SetTest, ConfigValidation) {
    TestConfig cfg;
    cfg.alpha = 1.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.alpha = 0.05;
    cfg.bootstrap_d = 10;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(MinCalibration, MatchesGridForTwoMembers) {
    Rng rng(45);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = random_dataset(rng, 2, 30, 3);
        const auto spec = measure(MeasureKind::EceConf, 1);
        double grid = 1e9;
        for (int i = 0; i <= 10000; ++i) {
            const double l = i / 10000.0;
            grid = std::min(grid, evaluate(spec, mix(data.set(), SimplexVector({l, 1 - l})).view(), data.labels()));
        }
        const auto r = min_calibration(data, spec);
        EXPECT_LE(r.value, grid + 1e-3);
    }
}

TEST(MinCalibration, InstanceOrderInvariance) {
    Rng rng(46);
    const auto data = random_dataset(rng, 3, 40, 3);
    std::vector<std::size_t> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<PredictionSet> members;
    for (const auto& p : data.set().members()) {
        std::vector<double> probs;
        for (auto i : perm) probs.insert(probs.end(), p.row(i).begin(), p.row(i).end());
        members.emplace_back(40, 3, probs);
    }
    std::vector<int> labels;
    for (auto i : perm) labels.push_back(data.labels()[i]);
    const LabeledDataset permuted(ClassifierSet(members), labels);
    const auto spec = measure(MeasureKind::EceCwise, 5);
    EXPECT_NEAR(min_calibration(data, spec).value, min_calibration(permuted, spec).value, 1e-4);
}

TEST(SetTest, CalibratedScenarioRarelyRejects) {
    int rejections = 0;
    const int reps = 30;
    for (int r = 0; r < reps; ++r) {
        ScenarioSpec s;
        s.scenario = Scenario::S1;
        s.n = 60;
        s.m = 3;
        s.k = 3;
        s.seed = static_cast<std::uint64_t>(1000 + r);
        const auto data = gen_scenario(s);
        TestConfig cfg;
        cfg.measure = measure(MeasureKind::EceConf, 5);
        cfg.bootstrap_d = 40;
        cfg.seed = static_cast<std::uint64_t>(r);
        cfg.optimizer.random_starts = 2;
        rejections += set_calibration_test(data.data, cfg).reject ? 1 : 0;
    }
    // alpha = 0.05; generous bound for 30 replications.
    EXPECT_LE(rejections, 6);
}
