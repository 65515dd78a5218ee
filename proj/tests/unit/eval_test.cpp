#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "synthgen/data.hpp"
#include "synthgen/error.hpp"
#include "synthgen/eval.hpp"
#include "synthgen/rng.hpp"

using namespace synthgen;

namespace {

EncodedDataset blobs(std::size_t n, std::uint64_t seed, double sd = 0.08) {
    return fit_encode(oracle::two_gaussians(n, 3, seed, sd));
}

/// Re-encodes `t` with the schema fitted on `reference`.
EncodedDataset encode_like(const RawTable& t, const EncodedDataset& reference) {
    return encode(t, reference.schema);
}

ForestOptions with_trees(std::size_t trees, unsigned threads = 1) {
    ForestOptions o;
    o.trees = trees;
    o.threads = threads;
    return o;
}

CompareOptions compare_options(std::size_t trees, std::uint64_t seed) {
    CompareOptions o;
    o.forest = with_trees(trees);
    o.rng_seed = seed;
    return o;
}

Matrix uniform_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    CounterRng rng(seed);
    Matrix m(n, d);
    for (double& v : m.values()) v = rng.uniform();
    return m;
}

} // namespace

TEST(Stats, IdentityGivesZero) {
    const auto d = blobs(100, 1);
    const auto r = stats_compare(d, d);
    ASSERT_EQ(r.per_attribute.size(), 3u);
    EXPECT_EQ(*r.summary_delta_mean(), 0.0);
    EXPECT_EQ(*r.summary_delta_std(), 0.0);
    EXPECT_EQ(*r.mean_delta_mean, 0.0);
}

TEST(Stats, KnownShiftAndPopulationStd) {
    const auto t = oracle::two_gaussians(10, 1, 2);
    auto d1 = fit_encode(t);
    auto d2 = d1;
    for (std::size_t r = 0; r < d2.size(); ++r) d2.matrix(r, 0) = d1.matrix(r, 0) * 0.5 + 0.1;
    double mean = 0, sq = 0;
    for (std::size_t r = 0; r < 10; ++r) mean += d1.matrix(r, 0);
    mean /= 10;
    for (std::size_t r = 0; r < 10; ++r) sq += (d1.matrix(r, 0) - mean) * (d1.matrix(r, 0) - mean);
    const double sd = std::sqrt(sq / 10);
    const auto rep = stats_compare(d1, d2);
    EXPECT_NEAR(rep.per_attribute[0].delta_mean, (mean * 0.5 + 0.1) - mean, 1e-12);
    EXPECT_NEAR(rep.per_attribute[0].delta_std, -0.5 * sd, 1e-12);
}

TEST(Stats, MedianSummary) {
    auto d1 = blobs(40, 3);
    auto d2 = d1;
    const double shift[] = {0.3, -0.1, 0.05};
    for (std::size_t r = 0; r < d2.size(); ++r)
        for (std::size_t c = 0; c < 3; ++c) d2.matrix(r, c) += shift[c];
    const auto rep = stats_compare(d1, d2);
    EXPECT_NEAR(*rep.median_delta_mean, 0.05, 1e-12);
    EXPECT_NEAR(*rep.mean_delta_mean, 0.25 / 3, 1e-12);
    EXPECT_EQ(rep.summary_delta_mean(), rep.median_delta_mean);
}

TEST(Stats, AllCategoricalHasNoSummary) {
    std::istringstream in("c,class\nx,a\ny,b\nx,b\n");
    const auto d = fit_encode(ingest_csv(in, std::string("class")));
    const auto r = stats_compare(d, d);
    EXPECT_TRUE(r.per_attribute.empty());
    EXPECT_FALSE(r.summary_delta_mean());
}

TEST(Stats, SchemaMismatch) {
    EXPECT_THROW(stats_compare(blobs(20, 1), fit_encode(oracle::two_gaussians(20, 2, 1))), Error);
}

TEST(Ari, MatchesPairOracleOnRandomLabelings) {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + gen() % 60;
        const std::size_t ka = 1 + gen() % 5, kb = 1 + gen() % 5;
        std::vector<std::size_t> a(n), b(n);
        for (auto& v : a) v = gen() % ka;
        for (auto& v : b) v = gen() % kb;
        EXPECT_NEAR(adjusted_rand_index(a, b), oracle::ari_by_pairs(a, b), 1e-12);
    }
}

TEST(Ari, KnownValues) {
    const std::vector<std::size_t> a{0, 0, 1, 1}, relabeled{5, 5, 2, 2}, swapped{0, 1, 0, 1};
    EXPECT_DOUBLE_EQ(adjusted_rand_index(a, relabeled), 1.0);
    EXPECT_DOUBLE_EQ(adjusted_rand_index(a, swapped), -0.5);
    // sklearn reference value
    const std::vector<std::size_t> x{0, 0, 1, 1, 2, 2}, y{0, 0, 1, 2, 2, 2};
    EXPECT_NEAR(adjusted_rand_index(x, y), 0.44444444444444442, 1e-15);
    EXPECT_THROW(adjusted_rand_index(a, std::vector<std::size_t>{0}), DimensionError);
}

TEST(KMedoids, RecoversBlobs) {
    const auto d = blobs(400, 7);
    const auto r = kmedoids(d.matrix, 2, 3);
    ASSERT_EQ(r.medoids.size(), 2u);
    EXPECT_TRUE(std::is_sorted(r.medoids.begin(), r.medoids.end()));
    const auto truth = class_labels(d);
    EXPECT_GE(adjusted_rand_index(r.labels, truth), 0.95);
}

TEST(KMedoids, KEqualsNHasZeroCost) {
    const auto m = uniform_points(12, 2, 5);
    const auto r = kmedoids(m, 12, 1);
    EXPECT_EQ(r.cost, 0.0);
    for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(r.medoids[r.labels[i]], i);
}

TEST(KMedoids, MedoidsAreLocallyOptimal) {
    const auto m = uniform_points(80, 3, 9);
    const auto r = kmedoids(m, 3, 4);
    auto dist = [&](std::size_t i, std::size_t j) {
        double s = 0;
        for (std::size_t c = 0; c < 3; ++c) s += (m(i, c) - m(j, c)) * (m(i, c) - m(j, c));
        return std::sqrt(s);
    };
    double cost = 0;
    for (std::size_t i = 0; i < 80; ++i) {
        for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(dist(i, r.medoids[r.labels[i]]), dist(i, r.medoids[k]) + 1e-15);
        cost += dist(i, r.medoids[r.labels[i]]);
    }
    EXPECT_NEAR(r.cost, cost, 1e-9);
    EXPECT_EQ(kmedoids(m, 3, 4).medoids, r.medoids);
}

TEST(KMedoids, BadK) {
    const auto m = uniform_points(5, 2, 1);
    EXPECT_THROW(kmedoids(m, 1, 1), Error);
    EXPECT_THROW(kmedoids(m, 6, 1), Error);
}

TEST(Cluster, IdentityGivesOne) {
    const auto d = blobs(100, 5);
    const auto r = cluster_compare(d.matrix, d.matrix, 2, 1);
    EXPECT_EQ(r.ari, 1.0);
    EXPECT_EQ(r.labels_a.size(), 200u);
}

TEST(Cluster, UniformNoiseAgainstBlobsIsNearZero) {
    // Independent labelings: compare blob clusters with an unrelated random labeling.
    const auto d = blobs(300, 6);
    const auto noise = uniform_points(300, d.width(), 8);
    const auto r = cluster_compare(d.matrix, noise, 2, 1);
    EXPECT_GT(r.ari, -0.2);
    EXPECT_LT(r.ari, 1.0);
    std::mt19937_64 gen(3);
    std::vector<std::size_t> a(2000), b(2000);
    for (auto& v : a) v = gen() % 3;
    for (auto& v : b) v = gen() % 3;
    EXPECT_NEAR(adjusted_rand_index(a, b), 0.0, 0.01);
}

TEST(Forest, SeparableDataIsLearned) {
    const auto d = blobs(400, 11);
    const auto x = feature_matrix(d);
    const auto y = class_labels(d);
    const auto split = stratified_halves(y, 2, 1);
    auto take = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> labels;
        for (auto i : idx) labels.push_back(y[i]);
        return std::make_pair(select_rows(x, idx), labels);
    };
    const auto [xt, yt] = take(split.train);
    const auto [xe, ye] = take(split.test);
    const auto forest = random_forest_train(xt, yt, 1, with_trees(50));
    EXPECT_EQ(forest.tree_count(), 50u);
    EXPECT_EQ(forest.class_count(), 2u);
    EXPECT_GT(forest.accuracy(xe, ye), 0.95);
    const auto threaded = random_forest_train(xt, yt, 1, with_trees(50, 3));
    EXPECT_EQ(threaded.predict(xe), forest.predict(xe));
}

TEST(Forest, ShuffledLabelsGiveChanceAccuracy) {
    const auto d = blobs(600, 12);
    const auto x = feature_matrix(d);
    auto y = class_labels(d);
    std::mt19937_64 gen(5);
    std::shuffle(y.begin(), y.end(), gen);
    const auto split = stratified_halves(y, 2, 2);
    std::vector<std::size_t> yt, ye;
    for (auto i : split.train) yt.push_back(y[i]);
    for (auto i : split.test) ye.push_back(y[i]);
    const auto forest = random_forest_train(select_rows(x, split.train), yt, 3, with_trees(50));
    EXPECT_NEAR(forest.accuracy(select_rows(x, split.test), ye), 0.5, 0.08);
}

TEST(Forest, Errors) {
    const Matrix x(10, 2);
    std::vector<std::size_t> y(10, 0);
    EXPECT_THROW(random_forest_train(x, y, 1), Error);
    y[3] = 1;
    EXPECT_THROW(random_forest_train(x, std::span(y).first(9), 1), DimensionError);
    EXPECT_THROW(random_forest_train(x, y, 1, with_trees(0)), Error);
}

TEST(Split, StratifiedHalves) {
    std::vector<std::size_t> y;
    for (int i = 0; i < 7; ++i) y.push_back(0);
    for (int i = 0; i < 4; ++i) y.push_back(1);
    const auto s = stratified_halves(y, 2, 9);
    std::size_t train0 = 0, train1 = 0;
    for (auto i : s.train) (y[i] ? train1 : train0)++;
    EXPECT_EQ(train0, 4u);
    EXPECT_EQ(train1, 2u);
    EXPECT_EQ(s.train.size() + s.test.size(), y.size());
}

TEST(Predictive, IdentityGivesZeroDelta) {
    const auto d = blobs(200, 13);
    const auto r = predictive_compare(d, d, 4, with_trees(30));
    EXPECT_EQ(r.delta_acc, 0.0);
    EXPECT_EQ(r.m1d1, r.m2d1);
    EXPECT_EQ(r.m1d2, r.m2d2);
}

TEST(Predictive, SingleClassIsAnError) {
    const auto d = blobs(40, 1);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 40; i += 2) rows.push_back(i);
    EXPECT_THROW(predictive_compare(d, select_rows(d, rows), 1), Error);
}

TEST(Compare, IdentitiesAndReport) {
    const auto d = blobs(200, 14);
    const auto r = compare_datasets(d, d, compare_options(20, 1));
    EXPECT_EQ(r.cluster.k, 2u);
    EXPECT_EQ(r.cluster.ari, 1.0);
    EXPECT_EQ(r.predictive.delta_acc, 0.0);
    EXPECT_EQ(*r.stats.summary_delta_mean(), 0.0);
    const auto json = report_json(r, "blobs", "VAE");
    for (const char* key : {"\"delta_mean\"", "\"delta_std\"", "\"ari\"", "\"delta_acc\"", "\"m1d1\"", "\"m2d2\"",
                            "\"per_attribute\"", "\"blobs\"", "\"VAE\""})
        EXPECT_NE(json.find(key), std::string::npos) << key;
    std::ostringstream text;
    write_report_text(text, r, "blobs / VAE");
    EXPECT_NE(text.str().find("blobs / VAE"), std::string::npos);
}

TEST(Compare, ShiftedCopyIsDetected) {
    const auto base = oracle::two_gaussians(200, 3, 15);
    const auto d1 = fit_encode(base);
    auto moved = base;
    for (auto& row : moved.rows) std::get<double>(row[0]) += 0.05;
    const auto d2 = encode_like(moved, d1);
    const auto r = compare_datasets(d1, d2, compare_options(20, 2));
    EXPECT_GT(r.stats.per_attribute[0].delta_mean, 0.0);
    EXPECT_EQ(r.stats.per_attribute[1].delta_mean, 0.0);
}
