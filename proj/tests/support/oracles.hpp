#pragma once

// Independent reference computations and fixtures shared by the unit and
// acceptance tests. Nothing here calls the library code it is used to check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "synthgen/data.hpp"
#include "synthgen/nn.hpp"

namespace oracle {

inline double activate(synthgen::nn::Activation a, double v) {
    switch (a) {
    case synthgen::nn::Activation::relu: return v > 0.0 ? v : 0.0;
    case synthgen::nn::Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case synthgen::nn::Activation::identity: break;
    }
    return v;
}

/// Neuron-by-neuron forward pass; `masks[l]` (when non-empty) multiplies layer l's output.
inline std::vector<double> forward(const synthgen::nn::NetworkParams& net, std::vector<double> x,
                                   const std::vector<std::vector<double>>& masks = {}) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        std::vector<double> y(layer.weights.rows());
        for (std::size_t o = 0; o < y.size(); ++o) {
            long double s = layer.bias[o];
            for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(layer.weights(o, i)) * x[i];
            y[o] = activate(layer.activation, static_cast<double>(s));
            if (l < masks.size() && !masks[l].empty()) y[o] *= masks[l][o];
        }
        x = std::move(y);
    }
    return x;
}

/// Central difference of f at every coordinate of `params`.
inline std::vector<double> finite_difference(const std::function<double()>& f, std::span<double> params,
                                             double h = 1e-4) {
    std::vector<double> g(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = f();
        params[i] = keep - h;
        const double down = f();
        params[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// ARI by enumerating every pair of points.
inline double ari_by_pairs(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    const std::size_t n = a.size();
    double both = 0, only_a = 0, only_b = 0, neither = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            if (sa && sb) ++both;
            else if (sa) ++only_a;
            else if (sb) ++only_b;
            else ++neither;
        }
    const double pairs = both + only_a + only_b + neither;
    const double pa = both + only_a;
    const double pb = both + only_b;
    const double expected = pa * pb / pairs;
    const double max_index = 0.5 * (pa + pb);
    if (max_index == expected) return 1.0;
    return (both - expected) / (max_index - expected);
}

/// Two Gaussian classes in `dims` numeric attributes, well inside [0,1].
/// Class 0 centred at 0.3, class 1 at 0.7, sd 0.08, rows alternate classes.
inline synthgen::RawTable two_gaussians(std::size_t n, std::size_t dims, std::uint64_t seed, double sd = 0.08) {
    using namespace synthgen;
    RawTable t;
    for (std::size_t d = 0; d < dims; ++d) t.schema.attributes.push_back({"x" + std::to_string(d + 1), AttributeKind::numeric, {}, {}});
    t.schema.attributes.push_back({"class", AttributeKind::categorical, {"a", "b"}, {}});
    t.schema.class_index = dims;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, sd);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = r % 2;
        std::vector<Cell> row;
        for (std::size_t d = 0; d < dims; ++d) row.emplace_back((c ? 0.7 : 0.3) + noise(gen));
        row.emplace_back(std::string(c ? "b" : "a"));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace oracle
