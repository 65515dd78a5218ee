#pragma once

// Dataset comparison: attribute statistics, clustering structure (k-medoids +
// adjusted Rand index) and predictive similarity (random forest accuracies).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthgen/data.hpp"
#include "synthgen/matrix.hpp"

namespace synthgen {

// -- statistics ------------------------------------------------------------------

enum class SummaryRule { median, mean };

struct AttributeDelta {
    std::string name;
    double delta_mean = 0.0; ///< mean(d2) - mean(d1)
    double delta_std = 0.0;  ///< std(d2) - std(d1), population form
};

struct StatReport {
    std::vector<AttributeDelta> per_attribute; ///< numeric attributes only
    SummaryRule summary_rule = SummaryRule::median;
    std::optional<double> median_delta_mean;
    std::optional<double> median_delta_std;
    std::optional<double> mean_delta_mean;
    std::optional<double> mean_delta_std;

    /// Headline numbers under summary_rule; absent for all-categorical schemas.
    std::optional<double> summary_delta_mean() const;
    std::optional<double> summary_delta_std() const;
};

StatReport stats_compare(const EncodedDataset& d1, const EncodedDataset& d2);

// -- clustering ----------------------------------------------------------------

struct KMedoidsResult {
    std::vector<std::size_t> medoids; ///< row indices, ascending
    std::vector<std::size_t> labels;  ///< position in `medoids` per row
    double cost = 0.0;                ///< sum of distances to the assigned medoid
    std::size_t iterations = 0;
};

/// Alternating assignment/medoid-update on Euclidean distance. Initial medoids are
/// drawn k-medoids++ style from `rng_seed`. Distance ties go to the medoid with the
/// lowest row index, and medoid-update ties to the lowest member index.
KMedoidsResult kmedoids(const Matrix& points, std::size_t k, std::uint64_t rng_seed,
                        std::size_t max_iterations = 100);

/// Index into `medoids` of the medoid nearest to x (ties: lowest position).
std::size_t nearest_medoid(const Matrix& source, std::span<const std::size_t> medoids, std::span<const double> x);

struct ClusterReport {
    std::size_t k = 0;
    double ari = 0.0;
    std::vector<std::size_t> medoids_1;
    std::vector<std::size_t> medoids_2;
    std::vector<std::size_t> labels_a; ///< over d1 then d2: d1 own clusters, d2 by nearest d1 medoid
    std::vector<std::size_t> labels_b; ///< over d1 then d2: d1 by nearest d2 medoid, d2 own clusters
};

ClusterReport cluster_compare(const Matrix& d1, const Matrix& d2, std::size_t k, std::uint64_t rng_seed);

/// Pair-counting ARI from the contingency table. Can be negative.
double adjusted_rand_index(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b);

// -- classification --------------------------------------------------------------

struct ForestOptions {
    std::size_t trees = 100;
    bool bootstrap = true;
    std::optional<std::size_t> max_features; ///< default: round(sqrt(features)), at least 1
    unsigned threads = 1;
};

class RandomForest {
public:
    std::size_t predict(std::span<const double> x) const;
    std::vector<std::size_t> predict(const Matrix& x) const;
    double accuracy(const Matrix& x, std::span<const std::size_t> y) const;
    std::size_t class_count() const noexcept { return classes_; }
    std::size_t tree_count() const noexcept { return trees_.size(); }
    std::size_t feature_count() const noexcept { return features_; }

    struct Node {
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;  ///< child index; 0 marks a leaf
        std::size_t right = 0;
        std::size_t label = 0; ///< majority class at this node
    };
    using Tree = std::vector<Node>;

private:
    friend RandomForest random_forest_train(const Matrix&, std::span<const std::size_t>, std::uint64_t,
                                            const ForestOptions&);
    static std::size_t predict_tree(const Tree& tree, std::span<const double> x);

    std::vector<Tree> trees_;
    std::size_t classes_ = 0;
    std::size_t features_ = 0;
};

/// CART trees with Gini splits on bootstrap samples; tree i draws from stream (rng_seed, i).
/// Majority vote; ties go to the lowest class index.
RandomForest random_forest_train(const Matrix& x, std::span<const std::size_t> y, std::uint64_t rng_seed,
                                 const ForestOptions& options = {});

struct PredictiveReport {
    double m1d1 = 0.0;
    double m1d2 = 0.0;
    double m2d1 = 0.0;
    double m2d2 = 0.0;
    double delta_acc = 0.0; ///< m2d1 - m1d1
};

/// Class-stratified 50/50 split of each dataset (ceil(n_c/2) of class c to training).
struct StratifiedSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
StratifiedSplit stratified_halves(std::span<const std::size_t> labels, std::size_t class_count, std::uint64_t rng_seed);

/// Feature matrix of an encoded dataset: every column except the class group.
Matrix feature_matrix(const EncodedDataset& d);

PredictiveReport predictive_compare(const EncodedDataset& d1, const EncodedDataset& d2, std::uint64_t rng_seed,
                                    const ForestOptions& options = {});

// -- combined ------------------------------------------------------------------

struct ComparisonReport {
    StatReport stats;
    ClusterReport cluster;
    PredictiveReport predictive;
};

struct CompareOptions {
    std::size_t k = 0; ///< 0: number of class values
    ForestOptions forest;
    std::uint64_t rng_seed = 0;
};

/// d1 is the original, d2 the generated (or second) dataset over the same schema.
ComparisonReport compare_datasets(const EncodedDataset& d1, const EncodedDataset& d2, const CompareOptions& options);

/// Human-readable multi-line summary.
void write_report_text(std::ostream& out, const ComparisonReport& report, const std::string& title);

/// JSON object with keys delta_mean, delta_std, ari, delta_acc, m1d1, m1d2, m2d1, m2d2
/// (delta_mean/delta_std are null when no numeric attributes exist) and per_attribute.
std::string report_json(const ComparisonReport& report, const std::string& dataset, const std::string& generator);

} // namespace synthgen
