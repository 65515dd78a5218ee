#include "synthgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "synthgen/error.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

// -- statistics ------------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Moments {
    double mean;
    double std;
};

Moments column_moments(const Matrix& m, std::size_t col) {
    const double n = static_cast<double>(m.rows());
    double sum = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, col);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double d = m(r, col) - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / n)};
}

void check_same_schema(const EncodedDataset& d1, const EncodedDataset& d2) {
    if (d1.schema.attributes.size() != d2.schema.attributes.size() || d1.schema.class_index != d2.schema.class_index)
        throw Error("datasets do not share a schema");
    for (std::size_t a = 0; a < d1.schema.attributes.size(); ++a) {
        const auto& x = d1.schema.attributes[a];
        const auto& y = d2.schema.attributes[a];
        if (x.name != y.name || x.kind != y.kind || x.categories != y.categories)
            throw Error("datasets do not share a schema (attribute '" + x.name + "')");
    }
    if (d1.width() != d2.width()) throw DimensionError("datasets differ in encoded width");
}

} // namespace

std::optional<double> StatReport::summary_delta_mean() const {
    return summary_rule == SummaryRule::median ? median_delta_mean : mean_delta_mean;
}

std::optional<double> StatReport::summary_delta_std() const {
    return summary_rule == SummaryRule::median ? median_delta_std : mean_delta_std;
}

StatReport stats_compare(const EncodedDataset& d1, const EncodedDataset& d2) {
    check_same_schema(d1, d2);
    if (d1.size() == 0 || d2.size() == 0) throw Error("stats_compare: empty dataset");
    StatReport report;
    std::vector<double> dm;
    std::vector<double> ds;
    for (std::size_t c = 0; c < d1.column_map.size(); ++c) {
        const auto& ref = d1.column_map[c];
        if (ref.category) continue;
        const auto m1 = column_moments(d1.matrix, c);
        const auto m2 = column_moments(d2.matrix, c);
        report.per_attribute.push_back({d1.schema.attributes[ref.attribute].name, m2.mean - m1.mean, m2.std - m1.std});
        dm.push_back(m2.mean - m1.mean);
        ds.push_back(m2.std - m1.std);
    }
    if (!dm.empty()) {
        report.median_delta_mean = median_of(dm);
        report.median_delta_std = median_of(ds);
        report.mean_delta_mean = mean_of(dm);
        report.mean_delta_std = mean_of(ds);
    }
    return report;
}

// -- clustering ----------------------------------------------------------------

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Labels and cost for sorted medoids.
double assign(const Matrix& points, const std::vector<std::size_t>& medoids, std::vector<std::size_t>& labels) {
    double cost = 0.0;
    labels.resize(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        std::size_t best = 0;
        double best_d = distance(points.row(i), points.row(medoids[0]));
        for (std::size_t m = 1; m < medoids.size(); ++m) {
            const double d = distance(points.row(i), points.row(medoids[m]));
            if (d < best_d) {
                best_d = d;
                best = m;
            }
        }
        labels[i] = best;
        cost += best_d;
    }
    return cost;
}

std::vector<std::size_t> seed_medoids(const Matrix& points, std::size_t k, std::uint64_t rng_seed) {
    const std::size_t n = points.rows();
    CounterRng rng(rng_seed);
    std::vector<std::size_t> medoids{static_cast<std::size_t>(rng.below(n))};
    std::vector<double> nearest(n);
    std::vector<char> chosen(n, 0);
    chosen[medoids[0]] = 1;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = distance(points.row(i), points.row(medoids[0]));
    while (medoids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!chosen[i]) total += nearest[i] * nearest[i];
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) continue;
                target -= nearest[i] * nearest[i];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == n) { // all remaining points coincide with medoids, or rounding ran off the end
            for (std::size_t i = n; i-- > 0;)
                if (!chosen[i] && (total == 0.0 || nearest[i] > 0.0)) pick = i;
        }
        chosen[pick] = 1;
        medoids.push_back(pick);
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], distance(points.row(i), points.row(pick)));
    }
    std::sort(medoids.begin(), medoids.end());
    return medoids;
}

} // namespace

KMedoidsResult kmedoids(const Matrix& points, std::size_t k, std::uint64_t rng_seed, std::size_t max_iterations) {
    const std::size_t n = points.rows();
    if (k < 2 || k > n)
        throw Error("kmedoids: k must lie in [2, n], got k=" + std::to_string(k) + " n=" + std::to_string(n));

    KMedoidsResult res;
    res.medoids = seed_medoids(points, k, rng_seed);
    res.cost = assign(points, res.medoids, res.labels);

    std::vector<std::vector<std::size_t>> members(k);
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        for (auto& m : members) m.clear();
        for (std::size_t i = 0; i < n; ++i) members[res.labels[i]].push_back(i);

        std::vector<std::size_t> next(k);
        for (std::size_t c = 0; c < k; ++c) {
            const auto& group = members[c];
            if (group.empty()) {
                next[c] = res.medoids[c];
                continue;
            }
            std::size_t best = group.front();
            double best_sum = std::numeric_limits<double>::infinity();
            for (const std::size_t cand : group) { // ascending, so ties keep the lowest index
                double s = 0.0;
                for (const std::size_t o : group) s += distance(points.row(cand), points.row(o));
                if (s < best_sum) {
                    best_sum = s;
                    best = cand;
                }
            }
            next[c] = best;
        }
        std::sort(next.begin(), next.end());
        if (std::adjacent_find(next.begin(), next.end()) != next.end()) break; // degenerate collapse; keep current
        std::vector<std::size_t> labels;
        const double cost = assign(points, next, labels);
        if (!(cost < res.cost)) break;
        res.medoids = std::move(next);
        res.labels = std::move(labels);
        res.cost = cost;
    }
    return res;
}

std::size_t nearest_medoid(const Matrix& source, std::span<const std::size_t> medoids, std::span<const double> x) {
    if (medoids.empty()) throw Error("nearest_medoid: no medoids");
    if (x.size() != source.cols()) throw DimensionError("nearest_medoid: width mismatch");
    std::size_t best = 0;
    double best_d = distance(x, source.row(medoids[0]));
    for (std::size_t m = 1; m < medoids.size(); ++m) {
        const double d = distance(x, source.row(medoids[m]));
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

ClusterReport cluster_compare(const Matrix& d1, const Matrix& d2, std::size_t k, std::uint64_t rng_seed) {
    if (d1.cols() != d2.cols()) throw DimensionError("cluster_compare: datasets differ in width");
    const auto c1 = kmedoids(d1, k, rng_seed);
    const auto c2 = kmedoids(d2, k, rng_seed);

    ClusterReport r;
    r.k = k;
    r.medoids_1 = c1.medoids;
    r.medoids_2 = c2.medoids;
    const std::size_t n1 = d1.rows();
    const std::size_t n2 = d2.rows();
    r.labels_a.resize(n1 + n2);
    r.labels_b.resize(n1 + n2);
    for (std::size_t i = 0; i < n1; ++i) {
        r.labels_a[i] = c1.labels[i];
        r.labels_b[i] = nearest_medoid(d2, c2.medoids, d1.row(i));
    }
    for (std::size_t i = 0; i < n2; ++i) {
        r.labels_a[n1 + i] = nearest_medoid(d1, c1.medoids, d2.row(i));
        r.labels_b[n1 + i] = c2.labels[i];
    }
    r.ari = adjusted_rand_index(r.labels_a, r.labels_b);
    return r;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw DimensionError("adjusted_rand_index: length mismatch");
    if (a.size() < 2) throw Error("adjusted_rand_index: need at least 2 labels");
    std::map<std::pair<std::size_t, std::size_t>, double> cells;
    std::map<std::size_t, double> rows;
    std::map<std::size_t, double> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cells[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0;
    for (const auto& [key, n] : cells) index += pairs(n);
    double sum_a = 0.0;
    for (const auto& [key, n] : rows) sum_a += pairs(n);
    double sum_b = 0.0;
    for (const auto& [key, n] : cols) sum_b += pairs(n);
    const double total = pairs(static_cast<double>(a.size()));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0; // both partitions trivial and identical
    return (index - expected) / (max_index - expected);
}

// -- random forest -----------------------------------------------------------------

namespace {

double gini(const std::vector<std::size_t>& counts, double n) {
    if (n <= 0.0) return 0.0;
    double s = 1.0;
    for (const std::size_t c : counts) {
        const double p = static_cast<double>(c) / n;
        s -= p * p;
    }
    return s;
}

std::size_t majority(const std::vector<std::size_t>& counts) {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const std::size_t> y, std::size_t classes, std::size_t max_features,
                CounterRng rng)
        : x_(x), y_(y), classes_(classes), max_features_(max_features), rng_(rng) {}

    RandomForest::Tree build(std::vector<std::size_t> rows) {
        tree_.clear();
        tree_.emplace_back();
        grow(0, std::move(rows));
        return std::move(tree_);
    }

private:
    struct Split {
        std::size_t feature = 0;
        double threshold = 0.0;
        double impurity = std::numeric_limits<double>::infinity();
    };

    void grow(std::size_t node, std::vector<std::size_t> rows) {
        std::vector<std::size_t> counts(classes_, 0);
        for (const std::size_t r : rows) ++counts[y_[r]];
        tree_[node].label = majority(counts);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        if (pure || rows.size() < 2) return;

        const auto split = find_split(rows);
        if (!std::isfinite(split.impurity)) return;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (const std::size_t r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const std::size_t l = tree_.size();
        tree_.emplace_back();
        const std::size_t rt = tree_.size();
        tree_.emplace_back();
        tree_[node].feature = split.feature;
        tree_[node].threshold = split.threshold;
        tree_[node].left = l;
        tree_[node].right = rt;
        grow(l, std::move(left));
        grow(rt, std::move(right));
    }

    Split find_split(const std::vector<std::size_t>& rows) {
        const std::size_t f = x_.cols();
        std::vector<std::size_t> features(f);
        std::iota(features.begin(), features.end(), std::size_t{0});
        // Random order; the first max_features are the candidates. Later ones are
        // consulted only when none of the candidates can split the node.
        for (std::size_t i = 0; i + 1 < f; ++i) std::swap(features[i], features[i + rng_.below(f - i)]);

        Split best;
        std::vector<std::pair<double, std::size_t>> sorted(rows.size());
        std::vector<std::size_t> left_counts(classes_);
        std::vector<std::size_t> total_counts(classes_, 0);
        for (const std::size_t r : rows) ++total_counts[y_[r]];
        const double n = static_cast<double>(rows.size());

        for (std::size_t fi = 0; fi < f; ++fi) {
            if (fi >= max_features_ && std::isfinite(best.impurity)) break;
            const std::size_t feat = features[fi];
            for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {x_(rows[i], feat), y_[rows[i]]};
            std::sort(sorted.begin(), sorted.end());
            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::vector<std::size_t> right_counts = total_counts;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                ++left_counts[sorted[i].second];
                --right_counts[sorted[i].second];
                if (sorted[i].first == sorted[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                const double impurity = (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / n;
                if (impurity < best.impurity) {
                    best.impurity = impurity;
                    best.feature = feat;
                    best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
                    // Midpoint can round onto the upper value for adjacent doubles.
                    if (!(best.threshold < sorted[i + 1].first)) best.threshold = sorted[i].first;
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const std::size_t> y_;
    std::size_t classes_;
    std::size_t max_features_;
    CounterRng rng_;
    RandomForest::Tree tree_;
};

} // namespace

std::size_t RandomForest::predict_tree(const Tree& tree, std::span<const double> x) {
    std::size_t node = 0;
    while (tree[node].left != 0) node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left : tree[node].right;
    return tree[node].label;
}

std::size_t RandomForest::predict(std::span<const double> x) const {
    if (x.size() != features_) throw DimensionError("forest: feature width mismatch");
    std::vector<std::size_t> votes(classes_, 0);
    for (const auto& t : trees_) ++votes[predict_tree(t, x)];
    return majority(votes);
}

std::vector<std::size_t> RandomForest::predict(const Matrix& x) const {
    std::vector<std::size_t> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
    return out;
}

double RandomForest::accuracy(const Matrix& x, std::span<const std::size_t> y) const {
    if (x.rows() != y.size()) throw DimensionError("forest: label count mismatch");
    if (y.empty()) throw Error("forest: accuracy on an empty set");
    std::size_t hit = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) hit += predict(x.row(r)) == y[r];
    return static_cast<double>(hit) / static_cast<double>(y.size());
}

RandomForest random_forest_train(const Matrix& x, std::span<const std::size_t> y, std::uint64_t rng_seed,
                                 const ForestOptions& options) {
    if (x.rows() != y.size()) throw DimensionError("forest: label count mismatch");
    if (x.rows() < 5) throw Error("forest: need at least 5 training rows");
    if (x.cols() == 0) throw Error("forest: no features");
    if (options.trees == 0) throw Error("forest: need at least one tree");
    const std::size_t classes = *std::max_element(y.begin(), y.end()) + 1;
    {
        std::vector<char> seen(classes, 0);
        for (const std::size_t c : y) seen[c] = 1;
        if (std::count(seen.begin(), seen.end(), 1) < 2) throw Error("forest: training data contain a single class");
    }
    const std::size_t f = x.cols();
    const std::size_t max_features =
        options.max_features
            ? std::clamp<std::size_t>(*options.max_features, 1, f)
            : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(f)))));

    RandomForest forest;
    forest.classes_ = classes;
    forest.features_ = f;
    forest.trees_.resize(options.trees);

    auto build = [&](std::size_t first, std::size_t last) {
        for (std::size_t t = first; t < last; ++t) {
            CounterRng rng(derive_seed(rng_seed, t));
            std::vector<std::size_t> rows(x.rows());
            if (options.bootstrap)
                for (auto& r : rows) r = rng.below(x.rows());
            else
                std::iota(rows.begin(), rows.end(), std::size_t{0});
            forest.trees_[t] = TreeBuilder(x, y, classes, max_features, rng).build(std::move(rows));
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, options.trees);
    if (workers == 1) {
        build(0, options.trees);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (options.trees + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(options.trees, lo + chunk);
            if (lo < hi) pool.emplace_back([&build, lo, hi] { build(lo, hi); });
        }
    }
    return forest;
}

StratifiedSplit stratified_halves(std::span<const std::size_t> labels, std::size_t class_count,
                                  std::uint64_t rng_seed) {
    std::vector<std::vector<std::size_t>> by_class(class_count);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= class_count) throw Error("stratified split: label out of range");
        by_class[labels[i]].push_back(i);
    }
    StratifiedSplit s;
    for (std::size_t c = 0; c < class_count; ++c) {
        auto& idx = by_class[c];
        CounterRng rng(derive_seed(rng_seed, c));
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
        const std::size_t half = (idx.size() + 1) / 2;
        s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(half));
        s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(half), idx.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

Matrix feature_matrix(const EncodedDataset& d) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < d.column_map.size(); ++c)
        if (d.column_map[c].attribute != d.schema.class_index) cols.push_back(c);
    Matrix out(d.size(), cols.size());
    for (std::size_t r = 0; r < d.size(); ++r)
        for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = d.matrix(r, cols[j]);
    return out;
}

PredictiveReport predictive_compare(const EncodedDataset& d1, const EncodedDataset& d2, std::uint64_t rng_seed,
                                    const ForestOptions& options) {
    check_same_schema(d1, d2);
    const std::size_t classes = d1.schema.class_attribute().categories.size();
    const auto y1 = class_labels(d1);
    const auto y2 = class_labels(d2);
    auto distinct = [classes](const std::vector<std::size_t>& y) {
        std::vector<char> seen(classes, 0);
        for (const std::size_t c : y) seen[c] = 1;
        return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
    };
    if (distinct(y1) < 2) throw Error("predictive_compare: first dataset has fewer than 2 classes");
    if (distinct(y2) < 2) throw Error("predictive_compare: second dataset has fewer than 2 classes");

    const std::uint64_t split_seed = derive_seed(rng_seed, "predictive/split");
    const std::uint64_t forest_seed = derive_seed(rng_seed, "predictive/forest");
    const auto s1 = stratified_halves(y1, classes, split_seed);
    const auto s2 = stratified_halves(y2, classes, split_seed);
    for (const auto* s : {&s1, &s2}) {
        const auto& y = s == &s1 ? y1 : y2;
        std::vector<char> in_data(classes, 0);
        std::vector<char> in_train(classes, 0);
        for (const std::size_t c : y) in_data[c] = 1;
        for (const std::size_t i : s->train) in_train[y[i]] = 1;
        for (std::size_t c = 0; c < classes; ++c)
            if (in_data[c] && !in_train[c])
                throw Error("predictive_compare: class '" + d1.schema.class_attribute().categories[c] +
                            "' is absent from a training half");
        if (s->test.empty()) throw Error("predictive_compare: empty test half");
    }

    const auto x1 = feature_matrix(d1);
    const auto x2 = feature_matrix(d2);
    auto take = [](const Matrix& x, const std::vector<std::size_t>& y, const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> labels(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = y[idx[i]];
        return std::make_pair(select_rows(x, idx), labels);
    };
    const auto [x1_train, y1_train] = take(x1, y1, s1.train);
    const auto [x1_test, y1_test] = take(x1, y1, s1.test);
    const auto [x2_train, y2_train] = take(x2, y2, s2.train);
    const auto [x2_test, y2_test] = take(x2, y2, s2.test);

    const auto m1 = random_forest_train(x1_train, y1_train, forest_seed, options);
    const auto m2 = random_forest_train(x2_train, y2_train, forest_seed, options);

    PredictiveReport r;
    r.m1d1 = m1.accuracy(x1_test, y1_test);
    r.m1d2 = m1.accuracy(x2_test, y2_test);
    r.m2d1 = m2.accuracy(x1_test, y1_test);
    r.m2d2 = m2.accuracy(x2_test, y2_test);
    r.delta_acc = r.m2d1 - r.m1d1;
    return r;
}

// -- combined ------------------------------------------------------------------

ComparisonReport compare_datasets(const EncodedDataset& d1, const EncodedDataset& d2, const CompareOptions& options) {
    ComparisonReport report;
    report.stats = stats_compare(d1, d2);
    const std::size_t k = options.k ? options.k : d1.schema.class_attribute().categories.size();
    report.cluster = cluster_compare(d1.matrix, d2.matrix, k, derive_seed(options.rng_seed, "cluster"));
    report.predictive = predictive_compare(d1, d2, derive_seed(options.rng_seed, "predictive"), options.forest);
    return report;
}

namespace {
std::string fixed(std::optional<double> v, int precision = 3) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << *v;
    return os.str();
}
} // namespace

void write_report_text(std::ostream& out, const ComparisonReport& r, const std::string& title) {
    out << title << '\n';
    out << "  delta_mean " << fixed(r.stats.summary_delta_mean()) << "  (mean rule " << fixed(r.stats.mean_delta_mean)
        << ")\n";
    out << "  delta_std  " << fixed(r.stats.summary_delta_std()) << "  (mean rule " << fixed(r.stats.mean_delta_std)
        << ")\n";
    out << "  ari        " << fixed(r.cluster.ari) << "  (k=" << r.cluster.k << ")\n";
    out << "  delta_acc  " << fixed(r.predictive.delta_acc) << "  (m1d1 " << fixed(r.predictive.m1d1) << ", m1d2 "
        << fixed(r.predictive.m1d2) << ", m2d1 " << fixed(r.predictive.m2d1) << ", m2d2 " << fixed(r.predictive.m2d2)
        << ")\n";
}

std::string report_json(const ComparisonReport& r, const std::string& dataset, const std::string& generator) {
    using nlohmann::json;
    auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["dataset"] = dataset;
    j["generator"] = generator;
    j["delta_mean"] = opt(r.stats.summary_delta_mean());
    j["delta_std"] = opt(r.stats.summary_delta_std());
    j["delta_mean_avg"] = opt(r.stats.mean_delta_mean);
    j["delta_std_avg"] = opt(r.stats.mean_delta_std);
    j["ari"] = r.cluster.ari;
    j["k"] = r.cluster.k;
    j["delta_acc"] = r.predictive.delta_acc;
    j["m1d1"] = r.predictive.m1d1;
    j["m1d2"] = r.predictive.m1d2;
    j["m2d1"] = r.predictive.m2d1;
    j["m2d2"] = r.predictive.m2d2;
    json attrs = json::array();
    for (const auto& a : r.stats.per_attribute)
        attrs.push_back({{"name", a.name}, {"delta_mean", a.delta_mean}, {"delta_std", a.delta_std}});
    j["per_attribute"] = std::move(attrs);
    return j.dump(2) + "\n";
}

} // namespace synthgen
