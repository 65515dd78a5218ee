#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "synthgen/bench.hpp"
#include "synthgen/data.hpp"

using namespace synthgen;

namespace {

const EncodedDataset& blobs() {
    static const EncodedDataset d = fit_encode(oracle::two_gaussians(80, 3, 4));
    return d;
}

const TrainedModel& model(bool vae) {
    auto make = [](ModelKind k) {
        auto c = ArchitectureConfig::defaults(blobs().width(), 4, k, true);
        c.training.epochs = 2;
        return train(blobs().matrix, c);
    };
    static const TrainedModel v = make(ModelKind::VAE);
    static const TrainedModel a = make(ModelKind::AE);
    return vae ? v : a;
}

} // namespace

TEST(Bench, SingleRunHasZeroSd) {
    const auto r = time_generation(model(false), GeneratorKind::MCD_AE, blobs().matrix, 3, 1, 1, "blobs");
    ASSERT_EQ(r.per_run_seconds.size(), 1u);
    EXPECT_EQ(r.sd_seconds, 0.0);
    EXPECT_EQ(r.mean_seconds, r.per_run_seconds[0]);
    EXPECT_GT(r.mean_seconds, 0.0);
    EXPECT_EQ(r.repetitions, 1u);
    EXPECT_EQ(r.t, 3u);
    EXPECT_EQ(r.dataset, "blobs");
}

TEST(Bench, ReportIsSelfConsistent) {
    const auto reports = time_generators({{&model(true), GeneratorKind::VAE},
                                          {&model(true), GeneratorKind::MCD_VAE},
                                          {&model(false), GeneratorKind::MCD_AE}},
                                         blobs().matrix, 2, 5, 9, "blobs");
    ASSERT_EQ(reports.size(), 3u);
    EXPECT_EQ(reports[1].generator_kind, GeneratorKind::MCD_VAE);
    for (const auto& r : reports) {
        ASSERT_EQ(r.per_run_seconds.size(), 5u);
        double sum = 0;
        for (double s : r.per_run_seconds) {
            EXPECT_GT(s, 0.0);
            sum += s;
        }
        const double mean = sum / 5;
        double sq = 0;
        for (double s : r.per_run_seconds) sq += (s - mean) * (s - mean);
        EXPECT_NEAR(r.mean_seconds, mean, 1e-15);
        EXPECT_NEAR(r.sd_seconds, std::sqrt(sq / 4), 1e-15);
    }
}

TEST(Bench, SummarizeUsesSampleSd) {
    TimingReport r;
    r.per_run_seconds = {1.0, 2.0, 3.0, 4.0};
    summarize_timings(r);
    EXPECT_DOUBLE_EQ(r.mean_seconds, 2.5);
    EXPECT_DOUBLE_EQ(r.sd_seconds, std::sqrt(5.0 / 3.0));
    EXPECT_EQ(r.repetitions, 4u);
}

TEST(Bench, TableAndRunsFormat) {
    TimingReport a{GeneratorKind::VAE, "D1", 2, 10, 0.5, 0.25, {0.25, 0.75}};
    TimingReport b{GeneratorKind::MCD_AE, "D1", 2, 10, 0.125, 0.0, {0.125, 0.125}};
    TimingReport c{GeneratorKind::MCD_VAE, "D2", 1, 10, 1.0, 0.0, {1.0}};
    std::ostringstream table, runs;
    write_timing_table(table, {a, b, c});
    EXPECT_EQ(table.str(), "Dataset,VAE [s.d.],MCD-VAE [s.d.],MCD-AE [s.d.]\n"
                           "D1,0.5000 [0.2500],-,0.1250 [0.0000]\n"
                           "D2,-,1.0000 [0.0000],-\n");
    write_timing_runs(runs, {c});
    EXPECT_EQ(runs.str(), "dataset,generator,run,seconds\nD2,MCD-VAE,0,1.000000000\n");
}
