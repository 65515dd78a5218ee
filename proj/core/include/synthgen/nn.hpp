#pragma once

// Minimal dense-network core: forward/backward passes with optional inverted
// dropout, the two reconstruction losses, the Gaussian KL term and Adam.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "synthgen/matrix.hpp"
#include "synthgen/rng.hpp"

namespace synthgen::nn {

enum class Activation { identity, relu, sigmoid };

const char* to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view s);

struct DenseLayer {
    Matrix weights; ///< out x in
    std::vector<double> bias;
    Activation activation = Activation::identity;

    std::size_t in_width() const noexcept { return weights.cols(); }
    std::size_t out_width() const noexcept { return weights.rows(); }
    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct NetworkParams {
    std::vector<DenseLayer> layers;

    std::size_t input_width() const noexcept { return layers.empty() ? 0 : layers.front().in_width(); }
    std::size_t output_width() const noexcept { return layers.empty() ? 0 : layers.back().out_width(); }
    std::size_t parameter_count() const noexcept;
    /// Chained dimensions and finite parameters; throws DimensionError / Error.
    void validate() const;
    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

/// widths = {in, h1, ..., out}; one activation per layer. He-style uniform
/// initialisation U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
NetworkParams make_network(std::span<const std::size_t> widths, std::span<const Activation> activations,
                           std::uint64_t seed);

/// Per-layer keep multipliers in {0, 1/keep_rate}. An empty vector leaves that layer unmasked.
struct DropoutMask {
    std::vector<std::vector<double>> keep;
    double keep_rate = 1.0;
    std::uint64_t rng_seed = 0;
};

/// Per-layer width to mask; 0 means the layer is never masked.
using MaskShape = std::vector<std::size_t>;

DropoutMask sample_mask(const MaskShape& shape, double keep_rate, std::uint64_t rng_seed);

/// Redraws every masked entry of `mask` in place from `rng` (no allocation).
void resample_mask(DropoutMask& mask, CounterRng& rng);

struct ForwardCache {
    std::vector<std::vector<double>> inputs;    ///< input to each layer
    std::vector<std::vector<double>> activated; ///< activation output before masking
    std::vector<std::vector<double>> masks;     ///< copy of the applied mask per layer (empty = none)
    std::vector<double> output;
};

/// Full forward pass recording everything backward() needs.
ForwardCache forward(const NetworkParams& net, std::span<const double> x, const DropoutMask* mask = nullptr);

/// Weights laid out input-major for inference, so a layer is a sum of weight rows
/// scaled by its non-zero inputs. Zero inputs (relu zeros, dropped units) cost nothing.
struct InferencePlan {
    struct Layer {
        Matrix weights_t; ///< in x out
        std::vector<double> bias;
        Activation activation = Activation::identity;
    };
    std::vector<Layer> layers;
    std::size_t widest = 0;

    std::size_t input_width() const noexcept { return layers.front().weights_t.rows(); }
    std::size_t output_width() const noexcept { return layers.back().weights_t.cols(); }
};

InferencePlan compile(const NetworkParams& net);

struct InferenceScratch {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> values;
    std::vector<std::size_t> index;
};

/// Inference-only pass from layer `first` on. With first > 0, x is the unmasked
/// output of layer first-1 and that layer's mask (if any) is applied to it here.
void infer(const InferencePlan& plan, std::span<const double> x, const DropoutMask* mask, std::span<double> out,
           InferenceScratch& scratch, std::size_t first = 0);

/// MC-dropout pass with masks drawn on the fly: layer l's output units are kept with
/// probability keep_rate and scaled by 1/keep_rate whenever shape[l] > 0. Draws are made
/// only for non-zero units, which gives the same output distribution as sampling a full
/// mask. `first` has the meaning it has for infer().
void infer_dropout(const InferencePlan& plan, std::span<const double> x, const MaskShape& shape, double keep_rate,
                   CounterRng& rng, std::span<double> out, InferenceScratch& scratch, std::size_t first = 0);

/// Layer `first` evaluated with every non-zero unit of x kept, for reuse across many
/// masks of one input: a pass from it only subtracts the contributions of dropped units.
struct DropoutBase {
    std::size_t first = 0;
    double keep_rate = 1.0;
    bool masked = false;             ///< whether x itself is subject to dropout
    std::vector<double> pre;         ///< pre-activation of layer `first`
    std::vector<double> values;      ///< non-zero inputs, scaled by 1/keep_rate
    std::vector<std::size_t> index;  ///< their positions in x
};

DropoutBase dropout_base(const InferencePlan& plan, std::span<const double> x, const MaskShape& shape,
                         double keep_rate, std::size_t first);

/// Same output distribution and the same draws as infer_dropout() on the x the base was
/// built from; results agree up to floating-point summation order.
void infer_dropout(const InferencePlan& plan, const DropoutBase& base, const MaskShape& shape, CounterRng& rng,
                   std::span<double> out, InferenceScratch& scratch);

/// Output of layers [0, last) without any mask.
void infer_prefix(const InferencePlan& plan, std::span<const double> x, std::size_t last, std::span<double> out,
                  InferenceScratch& scratch);

/// Convenience form that compiles `net` on every call.
void infer(const NetworkParams& net, std::span<const double> x, const DropoutMask* mask, std::span<double> out);

struct LayerGradient {
    Matrix weights;
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerGradient> layers;

    static Gradients zeros_like(const NetworkParams& net);
    void set_zero();
    void scale(double s);
};

/// Accumulates d loss / d params into `grads` and returns d loss / d input.
std::vector<double> backward_accumulate(const NetworkParams& net, const ForwardCache& cache,
                                        std::span<const double> output_gradient, Gradients& grads);

/// Parameter gradients for one cached pass.
Gradients backward(const NetworkParams& net, const ForwardCache& cache, std::span<const double> output_gradient);

struct LossResult {
    double value = 0.0;
    std::vector<double> gradient;
};

/// Mean squared error over the vector; gradient 2(p - t)/w.
LossResult mse_loss(std::span<const double> prediction, std::span<const double> target);

/// Mean binary cross-entropy; predictions are clamped away from {0,1}.
LossResult bce_loss(std::span<const double> prediction, std::span<const double> target);

struct KlResult {
    double value = 0.0;
    std::vector<double> grad_mu;
    std::vector<double> grad_log_var;
};

/// KL(N(mu, diag(exp(log_var))) || N(0, I)).
KlResult gaussian_kl(std::span<const double> mu, std::span<const double> log_var);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    Gradients first_moment;
    Gradients second_moment;
    std::uint64_t step = 0;

    static AdamState init(const NetworkParams& net, const AdamConfig& config = {});
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, NetworkParams& params, const Gradients& grads);

} // namespace synthgen::nn
