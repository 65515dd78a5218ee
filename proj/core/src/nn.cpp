#include "synthgen/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "synthgen/error.hpp"

namespace synthgen::nn {

namespace {

// Four running sums let the compiler keep independent FMA chains in flight.
double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    for (; k < n; ++k) s0 += a[k] * b[k];
    return (s0 + s1) + (s2 + s3);
}

double activate(Activation a, double v) noexcept {
    switch (a) {
    case Activation::relu: return v > 0.0 ? v : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case Activation::identity: break;
    }
    return v;
}

// Derivative written in terms of the activated value (relu: y > 0 iff x > 0).
double activation_slope(Activation a, double activated) noexcept {
    switch (a) {
    case Activation::relu: return activated > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return activated * (1.0 - activated);
    case Activation::identity: break;
    }
    return 1.0;
}

const std::vector<double>* layer_mask(const DropoutMask* mask, std::size_t layer) {
    if (!mask || layer >= mask->keep.size() || mask->keep[layer].empty()) return nullptr;
    return &mask->keep[layer];
}

void check_mask(const NetworkParams& net, const DropoutMask* mask) {
    if (!mask) return;
    if (mask->keep.size() > net.layers.size()) throw DimensionError("dropout mask has more layers than the network");
    for (std::size_t l = 0; l < mask->keep.size(); ++l)
        if (!mask->keep[l].empty() && mask->keep[l].size() != net.layers[l].out_width())
            throw DimensionError("dropout mask width mismatch at layer " + std::to_string(l));
}

std::uint64_t keep_threshold(double keep_rate) {
    // P(u32 < threshold) == keep_rate up to 2^-32.
    return static_cast<std::uint64_t>(std::ldexp(keep_rate, 32));
}

} // namespace

const char* to_string(Activation a) noexcept {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: break;
    }
    return "identity";
}

Activation activation_from_string(std::string_view s) {
    if (s == "identity") return Activation::identity;
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    throw Error("unknown activation '" + std::string(s) + "'");
}

std::size_t NetworkParams::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.values().size() + l.bias.size();
    return n;
}

void NetworkParams::validate() const {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.bias.size() != layer.out_width())
            throw DimensionError("layer " + std::to_string(l) + ": bias length does not match output width");
        if (l > 0 && layers[l - 1].out_width() != layer.in_width())
            throw DimensionError("layer " + std::to_string(l) + ": input width does not chain");
        const auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(layer.weights.values().begin(), layer.weights.values().end(), finite) ||
            !std::all_of(layer.bias.begin(), layer.bias.end(), finite))
            throw Error("layer " + std::to_string(l) + " has non-finite parameters");
    }
}

NetworkParams make_network(std::span<const std::size_t> widths, std::span<const Activation> activations,
                           std::uint64_t seed) {
    if (widths.size() < 2 || activations.size() != widths.size() - 1)
        throw DimensionError("make_network: need one activation per layer");
    NetworkParams net;
    CounterRng rng(seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (widths[l] == 0 || widths[l + 1] == 0) throw DimensionError("make_network: zero-width layer");
        DenseLayer layer;
        layer.weights = Matrix(widths[l + 1], widths[l]);
        layer.bias.assign(widths[l + 1], 0.0);
        layer.activation = activations[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(widths[l]));
        for (double& w : layer.weights.values()) w = (2.0 * rng.uniform() - 1.0) * limit;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

DropoutMask sample_mask(const MaskShape& shape, double keep_rate, std::uint64_t rng_seed) {
    if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw Error("keep_rate must lie in (0, 1]");
    DropoutMask mask;
    mask.keep_rate = keep_rate;
    mask.rng_seed = rng_seed;
    mask.keep.reserve(shape.size());
    for (const std::size_t w : shape) mask.keep.emplace_back(w, 1.0 / keep_rate);
    CounterRng rng(rng_seed);
    resample_mask(mask, rng);
    return mask;
}

void resample_mask(DropoutMask& mask, CounterRng& rng) {
    const double scale = 1.0 / mask.keep_rate;
    const std::uint64_t threshold = keep_threshold(mask.keep_rate);
    for (auto& layer : mask.keep) {
        std::size_t i = 0;
        const std::size_t n = layer.size();
        for (; i + 1 < n; i += 2) {
            const std::uint64_t bits = rng.next_u64();
            layer[i] = (bits & 0xffffffffULL) < threshold ? scale : 0.0;
            layer[i + 1] = (bits >> 32) < threshold ? scale : 0.0;
        }
        if (i < n) layer[i] = (rng.next_u64() & 0xffffffffULL) < threshold ? scale : 0.0;
    }
}

ForwardCache forward(const NetworkParams& net, std::span<const double> x, const DropoutMask* mask) {
    if (x.size() != net.input_width())
        throw DimensionError("forward: input has " + std::to_string(x.size()) + " values, network expects " +
                             std::to_string(net.input_width()));
    check_mask(net, mask);
    ForwardCache cache;
    const std::size_t depth = net.layers.size();
    cache.inputs.resize(depth);
    cache.activated.resize(depth);
    cache.masks.resize(depth);
    std::vector<double> current(x.begin(), x.end());
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& layer = net.layers[l];
        cache.inputs[l] = current;
        std::vector<double> act(layer.out_width());
        for (std::size_t j = 0; j < act.size(); ++j) {
            const auto w = layer.weights.row(j);
            const double s = layer.bias[j] + dot(w.data(), current.data(), w.size());
            act[j] = activate(layer.activation, s);
        }
        current = act;
        if (const auto* m = layer_mask(mask, l)) {
            cache.masks[l] = *m;
            for (std::size_t j = 0; j < current.size(); ++j) current[j] *= (*m)[j];
        }
        cache.activated[l] = std::move(act);
    }
    cache.output = std::move(current);
    return cache;
}

InferencePlan compile(const NetworkParams& net) {
    net.validate();
    InferencePlan plan;
    for (const auto& l : net.layers) {
        InferencePlan::Layer pl;
        pl.weights_t = Matrix(l.in_width(), l.out_width());
        for (std::size_t o = 0; o < l.out_width(); ++o)
            for (std::size_t i = 0; i < l.in_width(); ++i) pl.weights_t(i, o) = l.weights(o, i);
        pl.bias = l.bias;
        pl.activation = l.activation;
        plan.widest = std::max({plan.widest, l.in_width(), l.out_width()});
        plan.layers.push_back(std::move(pl));
    }
    return plan;
}

namespace {

// out = act(bias + sum_k in[k] * W_t[k, :]) over the non-zero entries of in (times mask).
void plan_layer(const InferencePlan::Layer& layer, const double* in, const double* in_mask, double* out,
                InferenceScratch& s) {
    const std::size_t n_in = layer.weights_t.rows();
    const std::size_t n_out = layer.weights_t.cols();
    double* vals = s.values.data();
    std::size_t* idx = s.index.data();
    std::size_t n = 0;
    for (std::size_t k = 0; k < n_in; ++k) {
        const double v = in_mask ? in[k] * in_mask[k] : in[k];
        vals[n] = v;
        idx[n] = k;
        n += v != 0.0;
    }
    std::copy_n(layer.bias.data(), n_out, out);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = vals[i];
        const double* w = layer.weights_t.row(idx[i]).data();
        for (std::size_t j = 0; j < n_out; ++j) out[j] += v * w[j];
    }
    for (std::size_t j = 0; j < n_out; ++j) out[j] = activate(layer.activation, out[j]);
}

void reserve(const InferencePlan& plan, InferenceScratch& s) {
    if (s.a.size() < plan.widest) {
        s.a.resize(plan.widest);
        s.b.resize(plan.widest);
        s.values.resize(plan.widest);
        s.index.resize(plan.widest);
    }
}

void check_plan_mask(const InferencePlan& plan, const DropoutMask* mask) {
    if (!mask) return;
    if (mask->keep.size() > plan.layers.size()) throw DimensionError("dropout mask has more layers than the network");
    for (std::size_t l = 0; l < mask->keep.size(); ++l)
        if (!mask->keep[l].empty() && mask->keep[l].size() != plan.layers[l].weights_t.cols())
            throw DimensionError("dropout mask width mismatch at layer " + std::to_string(l));
}

} // namespace

void infer(const InferencePlan& plan, std::span<const double> x, const DropoutMask* mask, std::span<double> out,
           InferenceScratch& scratch, std::size_t first) {
    const std::size_t depth = plan.layers.size();
    if (first >= depth) throw Error("infer: first layer out of range");
    if (x.size() != plan.layers[first].weights_t.rows() || out.size() != plan.output_width())
        throw DimensionError("infer: input/output width mismatch");
    check_plan_mask(plan, mask);
    reserve(plan, scratch);

    const double* in = x.data();
    const double* in_mask = nullptr;
    if (first > 0)
        if (const auto* m = layer_mask(mask, first - 1)) in_mask = m->data();
    for (std::size_t l = first; l < depth; ++l) {
        double* dst = l + 1 == depth ? out.data() : ((l - first) % 2 ? scratch.b.data() : scratch.a.data());
        plan_layer(plan.layers[l], in, in_mask, dst, scratch);
        const auto* m = layer_mask(mask, l);
        in_mask = m ? m->data() : nullptr;
        in = dst;
    }
}

namespace {

// Keeps each compacted entry with probability threshold / 2^32, two draws per 64-bit word.
class KeepDraws {
public:
    KeepDraws(CounterRng& rng, std::uint64_t threshold) : rng_(rng), threshold_(threshold) {}
    bool next() {
        if (left_ == 0) {
            bits_ = rng_.next_u64();
            left_ = 2;
        }
        const std::uint64_t v = bits_ & 0xffffffffULL;
        bits_ >>= 32;
        --left_;
        return v < threshold_;
    }

private:
    CounterRng& rng_;
    std::uint64_t threshold_;
    std::uint64_t bits_ = 0;
    int left_ = 0;
};

void dropout_layer(const InferencePlan::Layer& layer, const double* in, KeepDraws* draws, double scale, double* out,
                   InferenceScratch& s) {
    const std::size_t n_in = layer.weights_t.rows();
    const std::size_t n_out = layer.weights_t.cols();
    double* vals = s.values.data();
    std::size_t* idx = s.index.data();
    std::size_t n = 0;
    for (std::size_t k = 0; k < n_in; ++k) {
        vals[n] = in[k];
        idx[n] = k;
        n += in[k] != 0.0;
    }
    if (draws) {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < n; ++i) {
            vals[kept] = vals[i] * scale;
            idx[kept] = idx[i];
            kept += draws->next();
        }
        n = kept;
    }
    std::copy_n(layer.bias.data(), n_out, out);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = vals[i];
        const double* w = layer.weights_t.row(idx[i]).data();
        for (std::size_t j = 0; j < n_out; ++j) out[j] += v * w[j];
    }
    for (std::size_t j = 0; j < n_out; ++j) out[j] = activate(layer.activation, out[j]);
}

void check_dropout_args(const InferencePlan& plan, const MaskShape& shape, double keep_rate, std::size_t first) {
    const std::size_t depth = plan.layers.size();
    if (first >= depth) throw Error("infer_dropout: first layer out of range");
    if (shape.size() > depth) throw DimensionError("dropout shape has more layers than the network");
    for (std::size_t l = 0; l < shape.size(); ++l)
        if (shape[l] != 0 && shape[l] != plan.layers[l].weights_t.cols())
            throw DimensionError("dropout shape width mismatch at layer " + std::to_string(l));
    if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw Error("keep_rate must lie in (0, 1]");
}

bool dropped_after(const MaskShape& shape, std::size_t l) { return l < shape.size() && shape[l] != 0; }

// Layers [from, depth) starting from `in`, alternating between the two scratch buffers.
void dropout_tail(const InferencePlan& plan, const double* in, std::size_t from, const MaskShape& shape,
                  KeepDraws& draws, double scale, std::span<double> out, InferenceScratch& scratch) {
    const std::size_t depth = plan.layers.size();
    for (std::size_t l = from; l < depth; ++l) {
        double* dst = l + 1 == depth ? out.data() : (in == scratch.a.data() ? scratch.b.data() : scratch.a.data());
        const bool drop_in = l > 0 && dropped_after(shape, l - 1);
        dropout_layer(plan.layers[l], in, drop_in ? &draws : nullptr, scale, dst, scratch);
        in = dst;
    }
    // A mask on the output layer itself has nothing downstream to skip.
    if (dropped_after(shape, depth - 1))
        for (auto& v : out)
            if (v != 0.0) v = draws.next() ? v * scale : 0.0;
}

} // namespace

void infer_dropout(const InferencePlan& plan, std::span<const double> x, const MaskShape& shape, double keep_rate,
                   CounterRng& rng, std::span<double> out, InferenceScratch& scratch, std::size_t first) {
    check_dropout_args(plan, shape, keep_rate, first);
    if (x.size() != plan.layers[first].weights_t.rows() || out.size() != plan.output_width())
        throw DimensionError("infer_dropout: input/output width mismatch");
    reserve(plan, scratch);
    KeepDraws draws(rng, keep_threshold(keep_rate));
    dropout_tail(plan, x.data(), first, shape, draws, 1.0 / keep_rate, out, scratch);
}

DropoutBase dropout_base(const InferencePlan& plan, std::span<const double> x, const MaskShape& shape,
                         double keep_rate, std::size_t first) {
    check_dropout_args(plan, shape, keep_rate, first);
    const auto& layer = plan.layers[first];
    if (x.size() != layer.weights_t.rows()) throw DimensionError("dropout_base: input width mismatch");
    DropoutBase base;
    base.first = first;
    base.keep_rate = keep_rate;
    base.masked = first > 0 && dropped_after(shape, first - 1);
    const double scale = base.masked ? 1.0 / keep_rate : 1.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] != 0.0) {
            base.values.push_back(x[k] * scale);
            base.index.push_back(k);
        }
    const std::size_t n_out = layer.weights_t.cols();
    base.pre.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t i = 0; i < base.values.size(); ++i) {
        const double v = base.values[i];
        const double* w = layer.weights_t.row(base.index[i]).data();
        for (std::size_t j = 0; j < n_out; ++j) base.pre[j] += v * w[j];
    }
    return base;
}

void infer_dropout(const InferencePlan& plan, const DropoutBase& base, const MaskShape& shape, CounterRng& rng,
                   std::span<double> out, InferenceScratch& scratch) {
    check_dropout_args(plan, shape, base.keep_rate, base.first);
    const auto& layer = plan.layers[base.first];
    if (base.pre.size() != layer.weights_t.cols() || out.size() != plan.output_width())
        throw DimensionError("infer_dropout: base/output width mismatch");
    if (base.masked != (base.first > 0 && dropped_after(shape, base.first - 1)))
        throw Error("infer_dropout: base was built for a different mask shape");
    reserve(plan, scratch);

    KeepDraws draws(rng, keep_threshold(base.keep_rate));
    const std::size_t n_out = base.pre.size();
    const bool last = base.first + 1 == plan.layers.size();
    double* dst = last ? out.data() : scratch.a.data();
    std::copy_n(base.pre.data(), n_out, dst);
    if (base.masked)
        for (std::size_t i = 0; i < base.values.size(); ++i) {
            if (draws.next()) continue;
            const double v = base.values[i];
            const double* w = layer.weights_t.row(base.index[i]).data();
            for (std::size_t j = 0; j < n_out; ++j) dst[j] -= v * w[j];
        }
    for (std::size_t j = 0; j < n_out; ++j) dst[j] = activate(layer.activation, dst[j]);
    const double scale = 1.0 / base.keep_rate;
    if (!last) {
        dropout_tail(plan, dst, base.first + 1, shape, draws, scale, out, scratch);
    } else if (dropped_after(shape, base.first)) {
        for (auto& v : out)
            if (v != 0.0) v = draws.next() ? v * scale : 0.0;
    }
}

void infer_prefix(const InferencePlan& plan, std::span<const double> x, std::size_t last, std::span<double> out,
                  InferenceScratch& scratch) {
    if (last == 0 || last > plan.layers.size()) throw Error("infer_prefix: layer count out of range");
    if (x.size() != plan.input_width() || out.size() != plan.layers[last - 1].weights_t.cols())
        throw DimensionError("infer_prefix: input/output width mismatch");
    reserve(plan, scratch);
    const double* in = x.data();
    for (std::size_t l = 0; l < last; ++l) {
        double* dst = l + 1 == last ? out.data() : (l % 2 ? scratch.b.data() : scratch.a.data());
        plan_layer(plan.layers[l], in, nullptr, dst, scratch);
        in = dst;
    }
}

void infer(const NetworkParams& net, std::span<const double> x, const DropoutMask* mask, std::span<double> out) {
    check_mask(net, mask);
    InferenceScratch scratch;
    infer(compile(net), x, mask, out, scratch);
}

Gradients Gradients::zeros_like(const NetworkParams& net) {
    Gradients g;
    for (const auto& l : net.layers)
        g.layers.push_back({Matrix(l.out_width(), l.in_width()), std::vector<double>(l.out_width(), 0.0)});
    return g;
}

void Gradients::set_zero() {
    for (auto& l : layers) {
        l.weights.fill(0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
}

void Gradients::scale(double s) {
    for (auto& l : layers) {
        for (double& v : l.weights.values()) v *= s;
        for (double& v : l.bias) v *= s;
    }
}

std::vector<double> backward_accumulate(const NetworkParams& net, const ForwardCache& cache,
                                        std::span<const double> output_gradient, Gradients& grads) {
    const std::size_t depth = net.layers.size();
    if (cache.inputs.size() != depth || cache.activated.size() != depth || cache.masks.size() != depth)
        throw DimensionError("backward: cache depth does not match network");
    if (grads.layers.size() != depth) throw DimensionError("backward: gradient depth does not match network");
    if (output_gradient.size() != net.output_width())
        throw DimensionError("backward: output gradient width mismatch");

    std::vector<double> upstream(output_gradient.begin(), output_gradient.end());
    for (std::size_t l = depth; l-- > 0;) {
        const auto& layer = net.layers[l];
        const auto& input = cache.inputs[l];
        const auto& act = cache.activated[l];
        if (input.size() != layer.in_width() || act.size() != layer.out_width())
            throw DimensionError("backward: stale cache at layer " + std::to_string(l));
        const auto& mask = cache.masks[l];

        std::vector<double> delta(layer.out_width());
        for (std::size_t j = 0; j < delta.size(); ++j) {
            double g = upstream[j];
            if (!mask.empty()) g *= mask[j];
            delta[j] = g * activation_slope(layer.activation, act[j]);
        }

        auto& lg = grads.layers[l];
        std::vector<double> down(layer.in_width(), 0.0);
        for (std::size_t j = 0; j < delta.size(); ++j) {
            const double d = delta[j];
            if (d == 0.0) continue;
            lg.bias[j] += d;
            auto gw = lg.weights.row(j);
            const auto w = layer.weights.row(j);
            for (std::size_t k = 0; k < input.size(); ++k) {
                gw[k] += d * input[k];
                down[k] += d * w[k];
            }
        }
        upstream = std::move(down);
    }
    return upstream;
}

Gradients backward(const NetworkParams& net, const ForwardCache& cache, std::span<const double> output_gradient) {
    auto grads = Gradients::zeros_like(net);
    backward_accumulate(net, cache, output_gradient, grads);
    return grads;
}

LossResult mse_loss(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size() || prediction.empty())
        throw DimensionError("mse_loss: length mismatch");
    const double n = static_cast<double>(prediction.size());
    LossResult r;
    r.gradient.resize(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction[i] - target[i];
        r.value += d * d;
        r.gradient[i] = 2.0 * d / n;
    }
    r.value /= n;
    return r;
}

LossResult bce_loss(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size() || prediction.empty())
        throw DimensionError("bce_loss: length mismatch");
    constexpr double eps = 1e-7;
    const double n = static_cast<double>(prediction.size());
    LossResult r;
    r.gradient.resize(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double p = std::clamp(prediction[i], eps, 1.0 - eps);
        const double t = target[i];
        r.value -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        r.gradient[i] = (p - t) / (p * (1.0 - p)) / n;
    }
    r.value /= n;
    return r;
}

KlResult gaussian_kl(std::span<const double> mu, std::span<const double> log_var) {
    if (mu.size() != log_var.size()) throw DimensionError("gaussian_kl: length mismatch");
    KlResult r;
    r.grad_mu.resize(mu.size());
    r.grad_log_var.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!std::isfinite(mu[i]) || !std::isfinite(log_var[i])) throw Error("gaussian_kl: non-finite input");
        const double var = std::exp(log_var[i]);
        r.value += 0.5 * (var + mu[i] * mu[i] - 1.0 - log_var[i]);
        r.grad_mu[i] = mu[i];
        r.grad_log_var[i] = 0.5 * (var - 1.0);
    }
    return r;
}

AdamState AdamState::init(const NetworkParams& net, const AdamConfig& config) {
    return AdamState{config, Gradients::zeros_like(net), Gradients::zeros_like(net), 0};
}

void adam_step(AdamState& state, NetworkParams& params, const Gradients& grads) {
    const std::size_t depth = params.layers.size();
    if (grads.layers.size() != depth || state.first_moment.layers.size() != depth ||
        state.second_moment.layers.size() != depth)
        throw DimensionError("adam_step: depth mismatch");
    ++state.step;
    const auto& c = state.config;
    const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

    auto update = [&](std::span<double> p, std::span<const double> g, std::span<double> m, std::span<double> v) {
        if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size())
            throw DimensionError("adam_step: shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    };
    for (std::size_t l = 0; l < depth; ++l) {
        auto& layer = params.layers[l];
        update(layer.weights.values(), grads.layers[l].weights.values(), state.first_moment.layers[l].weights.values(),
               state.second_moment.layers[l].weights.values());
        update(layer.bias, grads.layers[l].bias, state.first_moment.layers[l].bias, state.second_moment.layers[l].bias);
    }
}

} // namespace synthgen::nn
