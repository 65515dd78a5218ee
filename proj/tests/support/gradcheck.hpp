#pragma once

// Finite-difference check of forward/backward on randomly shaped networks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "synthgen/nn.hpp"
#include "synthgen/rng.hpp"

namespace gradcheck {

struct Outcome {
    double worst_relative_error = 0.0;
    std::size_t checked = 0;
};

inline double relative_error(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-7});
    return std::abs(a - b) / scale;
}

/// Random depth 1..4, widths 1..9, random activations, random mask on hidden layers,
/// MSE or BCE on the output. Compares every parameter gradient with central differences.
inline Outcome check_random_network(std::uint64_t seed, double h = 1e-4) {
    using namespace synthgen;
    CounterRng rng(seed);
    const std::size_t depth = 1 + rng.below(4);
    std::vector<std::size_t> widths{1 + rng.below(9)};
    std::vector<nn::Activation> acts;
    for (std::size_t l = 0; l < depth; ++l) {
        widths.push_back(1 + rng.below(9));
        acts.push_back(static_cast<nn::Activation>(rng.below(3)));
    }
    const bool bce = rng.below(2) == 1;
    if (bce) acts.back() = nn::Activation::sigmoid;
    auto net = nn::make_network(widths, acts, derive_seed(seed, "init"));
    for (auto& layer : net.layers)
        for (double& b : layer.bias) b = rng.uniform() - 0.5;

    std::vector<double> x(widths.front()), target(widths.back());
    for (double& v : x) v = rng.uniform() * 2.0 - 1.0;
    for (double& v : target) v = rng.uniform();

    nn::MaskShape shape(depth, 0);
    for (std::size_t l = 0; l + 1 < depth; ++l)
        if (rng.below(2)) shape[l] = widths[l + 1];
    const auto mask = nn::sample_mask(shape, 0.7, derive_seed(seed, "mask"));

    auto loss_of = [&](const std::vector<double>& out) {
        return bce ? nn::bce_loss(out, target) : nn::mse_loss(out, target);
    };
    const auto cache = nn::forward(net, x, &mask);
    const auto grads = nn::backward(net, cache, loss_of(cache.output).gradient);

    auto objective = [&] {
        std::vector<std::vector<double>> masks(mask.keep.begin(), mask.keep.end());
        return loss_of(oracle::forward(net, x, masks)).value;
    };

    Outcome result;
    for (std::size_t l = 0; l < depth; ++l) {
        auto& layer = net.layers[l];
        const auto fd_w = oracle::finite_difference(objective, layer.weights.values(), h);
        const auto fd_b = oracle::finite_difference(objective, layer.bias, h);
        for (std::size_t i = 0; i < fd_w.size(); ++i)
            result.worst_relative_error =
                std::max(result.worst_relative_error, relative_error(grads.layers[l].weights.values()[i], fd_w[i]));
        for (std::size_t i = 0; i < fd_b.size(); ++i)
            result.worst_relative_error =
                std::max(result.worst_relative_error, relative_error(grads.layers[l].bias[i], fd_b[i]));
        result.checked += fd_w.size() + fd_b.size();
    }
    return result;
}

/// KL gradient against central differences for a random L-dimensional Gaussian.
inline double check_kl_gradient(std::uint64_t seed, std::size_t dims, double h = 1e-4) {
    using namespace synthgen;
    CounterRng rng(seed);
    std::vector<double> mu(dims), log_var(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        mu[i] = rng.normal();
        log_var[i] = rng.uniform() * 4.0 - 2.0;
    }
    const auto kl = nn::gaussian_kl(mu, log_var);
    auto f = [&] { return nn::gaussian_kl(mu, log_var).value; };
    const auto fd_mu = oracle::finite_difference(f, mu, h);
    const auto fd_lv = oracle::finite_difference(f, log_var, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
        worst = std::max(worst, relative_error(kl.grad_mu[i], fd_mu[i]));
        worst = std::max(worst, relative_error(kl.grad_log_var[i], fd_lv[i]));
    }
    return worst;
}

/// KL(N(mu, s^2) || N(0,1)) by composite Simpson quadrature of q log(q/p).
inline double kl_by_quadrature(double mu, double log_var) {
    const double s = std::exp(0.5 * log_var);
    const double lo = mu - 12.0 * s, hi = mu + 12.0 * s;
    const std::size_t n = 20000;
    const double step = (hi - lo) / n;
    auto integrand = [&](double z) {
        const double u = (z - mu) / s;
        const double log_q = -0.5 * u * u - std::log(s) - 0.5 * std::log(2.0 * M_PI);
        const double log_p = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
        return std::exp(log_q) * (log_q - log_p);
    };
    long double sum = integrand(lo) + integrand(hi);
    for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0L : 2.0L) * integrand(lo + i * step);
    return static_cast<double>(sum * step / 3.0L);
}

} // namespace gradcheck
