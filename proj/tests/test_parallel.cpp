#include <gtest/gtest.h>

#include <omp.h>

#include "credcal/measures.hpp"
#include "credcal/settest.hpp"
#include "credcal/synth.hpp"

using namespace credcal;

namespace {

SyntheticDataset dataset(std::size_t n, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.scenario = Scenario::S3;
    spec.n = n;
    spec.m = 4;
    spec.k = 5;
    spec.seed = seed;
    return gen_scenario(spec);
}

class ThreadCount {
public:
    explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved_); }

private:
    int saved_;
};

}  // namespace

TEST(Parallel, SkceUqMatchesSerialBitwise) {
    for (int threads : {1, 3, 8}) {
        ThreadCount guard(threads);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto d = dataset(150, seed);
            const auto view = d.data.set().member(0).view();
            EXPECT_EQ(skce_uq(view, d.data.labels(), {2.0}), skce_uq_serial(view, d.data.labels(), {2.0}));
        }
    }
}

TEST(Parallel, NullDistributionMatchesSerialBitwise) {
    const auto d = dataset(60, 1);
    std::vector<MeasureSpec> specs(3);
    specs[0].kind = MeasureKind::EceConf;
    specs[1].kind = MeasureKind::HlCwise;
    specs[1].bins = 5;
    specs[2].kind = MeasureKind::SkceUq;
    for (int threads : {1, 2, 7}) {
        ThreadCount guard(threads);
        for (const auto& spec : specs) {
            EXPECT_EQ(null_distribution(d.data.set(), spec, 50, 77), null_distribution_serial(d.data.set(), spec, 50, 77))
                << spec.label() << " threads=" << threads;
        }
    }
}

TEST(Parallel, SetTestIndependentOfWorkerCount) {
    const auto d = dataset(50, 2);
    TestConfig cfg;
    cfg.measure.kind = MeasureKind::SkceUl;
    cfg.seed = 4;
    TestReport base;
    {
        ThreadCount guard(1);
        base = set_calibration_test(d.data, cfg);
    }
    ThreadCount guard(6);
    const auto other = set_calibration_test(d.data, cfg);
    EXPECT_EQ(base.null_stats, other.null_stats);
    EXPECT_EQ(base.observed, other.observed);
    EXPECT_EQ(base.lambda_star.vec(), other.lambda_star.vec());
    EXPECT_EQ(base.reject, other.reject);
}
