#include "synthgen/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "synthgen/csv.hpp"
#include "synthgen/error.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

const char* to_string(ModelKind k) noexcept { return k == ModelKind::AE ? "AE" : "VAE"; }

const char* to_string(ReconstructionLoss l) noexcept { return l == ReconstructionLoss::mse ? "mse" : "bce"; }

ReconstructionLoss reconstruction_loss_from_string(std::string_view s) {
    if (s == "mse") return ReconstructionLoss::mse;
    if (s == "bce") return ReconstructionLoss::bce;
    throw Error("unknown reconstruction loss '" + std::string(s) + "'");
}

void ArchitectureConfig::validate() const {
    if (input_width < 1) throw Error("architecture: input width must be >= 1");
    if (latent < 1) throw Error("architecture: latent size must be >= 1");
    if (!(hidden1 >= hidden2 && hidden2 >= latent))
        throw Error("architecture: need M >= N >= L, got M=" + std::to_string(hidden1) +
                    " N=" + std::to_string(hidden2) + " L=" + std::to_string(latent));
    if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw Error("architecture: keep_rate must lie in (0, 1]");
    if (training.epochs < 1) throw Error("architecture: epochs must be >= 1");
    if (training.batch_size < 1) throw Error("architecture: batch size must be >= 1");
    if (!(training.learning_rate > 0.0)) throw Error("architecture: learning rate must be positive");
}

ArchitectureConfig ArchitectureConfig::defaults(std::size_t input_width, std::size_t attribute_count, ModelKind kind,
                                                bool mcd_decoder, bool wide_layers) {
    ArchitectureConfig c;
    c.input_width = input_width;
    c.latent = std::max<std::size_t>(1, attribute_count / 2);
    c.hidden1 = wide_layers ? 512 : std::min<std::size_t>(512, 8 * input_width);
    c.hidden2 = wide_layers ? 256 : std::min<std::size_t>(256, 4 * input_width);
    c.hidden2 = std::max(c.hidden2, c.latent);
    c.hidden1 = std::max(c.hidden1, c.hidden2);
    c.kind = kind;
    c.mcd_decoder = mcd_decoder;
    return c;
}

nn::MaskShape TrainedModel::decoder_mask_shape() const {
    if (!config.mcd_decoder) return {};
    return {config.hidden2, config.hidden1, 0};
}

void TrainedModel::validate() const {
    config.validate();
    encoder.validate();
    decoder.validate();
    const std::size_t heads = config.kind == ModelKind::VAE ? 2 * config.latent : config.latent;
    if (encoder.layers.size() != 3 || decoder.layers.size() != 3) throw DimensionError("model: expected 3+3 layers");
    if (encoder.input_width() != config.input_width || encoder.output_width() != heads ||
        encoder.layers[0].out_width() != config.hidden1 || encoder.layers[1].out_width() != config.hidden2)
        throw DimensionError("model: encoder dimensions disagree with config");
    if (decoder.input_width() != config.latent || decoder.output_width() != config.input_width ||
        decoder.layers[0].out_width() != config.hidden2 || decoder.layers[1].out_width() != config.hidden1)
        throw DimensionError("model: decoder dimensions disagree with config");
}

namespace {

using nn::Activation;

struct TrainStreams {
    std::uint64_t shuffle;
    std::uint64_t epsilon;
    std::uint64_t mask;
};

nn::LossResult reconstruction(ReconstructionLoss kind, std::span<const double> pred, std::span<const double> target) {
    auto r = kind == ReconstructionLoss::mse ? nn::mse_loss(pred, target) : nn::bce_loss(pred, target);
    // Summed over columns rather than averaged, so the KL term does not swamp it.
    const double w = static_cast<double>(pred.size());
    r.value *= w;
    for (double& g : r.gradient) g *= w;
    return r;
}

} // namespace

TrainedModel train(const Matrix& rows, const ArchitectureConfig& config, std::uint64_t schema_fingerprint,
                   const TrainHooks& hooks) {
    config.validate();
    if (rows.cols() != config.input_width)
        throw DimensionError("train: data width " + std::to_string(rows.cols()) + " != model input width " +
                             std::to_string(config.input_width));
    if (rows.rows() < 2) throw Error("train: need at least 2 training rows");

    const bool vae = config.kind == ModelKind::VAE;
    const std::size_t L = config.latent;
    const auto& tc = config.training;

    TrainedModel model;
    model.config = config;
    model.schema_fingerprint = schema_fingerprint;
    {
        const std::size_t enc_w[] = {config.input_width, config.hidden1, config.hidden2, vae ? 2 * L : L};
        const Activation enc_a[] = {Activation::relu, Activation::relu, Activation::identity};
        const std::size_t dec_w[] = {L, config.hidden2, config.hidden1, config.input_width};
        const Activation dec_a[] = {Activation::relu, Activation::relu, Activation::sigmoid};
        model.encoder = nn::make_network(enc_w, enc_a, derive_seed(tc.seed, "init/encoder"));
        model.decoder = nn::make_network(dec_w, dec_a, derive_seed(tc.seed, "init/decoder"));
    }

    const TrainStreams streams{derive_seed(tc.seed, "train/shuffle"), derive_seed(tc.seed, "train/epsilon"),
                               derive_seed(tc.seed, "train/mask")};
    const nn::AdamConfig adam{tc.learning_rate, 0.9, 0.999, 1e-8};
    auto enc_state = nn::AdamState::init(model.encoder, adam);
    auto dec_state = nn::AdamState::init(model.decoder, adam);
    auto enc_grads = nn::Gradients::zeros_like(model.encoder);
    auto dec_grads = nn::Gradients::zeros_like(model.decoder);

    const auto mask_shape = model.decoder_mask_shape();
    nn::DropoutMask mask;
    if (!mask_shape.empty()) mask = nn::sample_mask(mask_shape, config.keep_rate, streams.mask);

    const std::size_t n = rows.rows();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    CounterRng shuffle_rng(streams.shuffle);

    std::uint64_t example_counter = 0;
    std::vector<double> enc_out_grad(vae ? 2 * L : L);
    std::vector<double> eps(L, 0.0);
    model.loss_trace.reserve(tc.epochs);

    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += tc.batch_size) {
            const std::size_t stop = std::min(n, start + tc.batch_size);
            enc_grads.set_zero();
            dec_grads.set_zero();
            for (std::size_t b = start; b < stop; ++b) {
                const auto x = rows.row(order[b]);
                const std::uint64_t example = example_counter++;
                const auto enc = nn::forward(model.encoder, x);

                std::vector<double> z;
                std::vector<double> sigma;
                nn::KlResult kl;
                std::vector<double> log_var;
                if (vae) {
                    std::span<const double> heads(enc.output);
                    const auto mu = heads.first(L);
                    log_var.assign(heads.begin() + static_cast<std::ptrdiff_t>(L), heads.end());
                    for (double& v : log_var) v = std::clamp(v, -kLogVarBound, kLogVarBound);
                    if (hooks.zero_epsilon) {
                        std::fill(eps.begin(), eps.end(), 0.0);
                    } else {
                        CounterRng eps_rng(derive_seed(streams.epsilon, example));
                        for (double& e : eps) e = eps_rng.normal();
                    }
                    z.resize(L);
                    sigma.resize(L);
                    for (std::size_t i = 0; i < L; ++i) {
                        sigma[i] = std::exp(0.5 * log_var[i]);
                        z[i] = mu[i] + sigma[i] * eps[i];
                    }
                    kl = nn::gaussian_kl(mu, log_var);
                } else {
                    z = enc.output;
                }

                if (!mask_shape.empty()) {
                    CounterRng mask_rng(derive_seed(streams.mask, example));
                    nn::resample_mask(mask, mask_rng);
                }
                const auto dec = nn::forward(model.decoder, z, mask_shape.empty() ? nullptr : &mask);
                const auto rec = reconstruction(tc.loss, dec.output, x);
                epoch_loss += rec.value + kl.value;

                const auto dz = nn::backward_accumulate(model.decoder, dec, rec.gradient, dec_grads);
                if (vae) {
                    for (std::size_t i = 0; i < L; ++i) {
                        enc_out_grad[i] = dz[i] + kl.grad_mu[i];
                        const double raw = enc.output[L + i];
                        const bool clamped = raw < -kLogVarBound || raw > kLogVarBound;
                        enc_out_grad[L + i] =
                            clamped ? 0.0 : dz[i] * eps[i] * 0.5 * sigma[i] + kl.grad_log_var[i];
                    }
                } else {
                    std::copy(dz.begin(), dz.end(), enc_out_grad.begin());
                }
                nn::backward_accumulate(model.encoder, enc, enc_out_grad, enc_grads);
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            enc_grads.scale(inv);
            dec_grads.scale(inv);
            nn::adam_step(enc_state, model.encoder, enc_grads);
            nn::adam_step(dec_state, model.decoder, dec_grads);
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) throw Error("train: non-finite loss at epoch " + std::to_string(epoch + 1));
        model.loss_trace.push_back(epoch_loss);
    }
    return model;
}

LatentGaussian encode_gaussian(const TrainedModel& model, std::span<const double> x) {
    if (model.config.kind != ModelKind::VAE) throw Error("encode_gaussian: model is not a VAE");
    if (x.size() != model.config.input_width) throw DimensionError("encode: input width mismatch");
    std::vector<double> out(model.encoder.output_width());
    nn::infer(model.encoder, x, nullptr, out);
    const std::size_t L = model.config.latent;
    LatentGaussian g;
    g.mu.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(L));
    g.log_var.assign(out.begin() + static_cast<std::ptrdiff_t>(L), out.end());
    for (double& v : g.log_var) v = std::clamp(v, -kLogVarBound, kLogVarBound);
    return g;
}

std::vector<double> encode_point(const TrainedModel& model, std::span<const double> x) {
    if (x.size() != model.config.input_width) throw DimensionError("encode: input width mismatch");
    std::vector<double> out(model.encoder.output_width());
    nn::infer(model.encoder, x, nullptr, out);
    out.resize(model.config.latent); // VAE: keep the mean head
    return out;
}

std::vector<double> reparameterize(const LatentGaussian& latent, std::span<const double> eps) {
    if (eps.size() != latent.mu.size() || latent.log_var.size() != latent.mu.size())
        throw DimensionError("reparameterize: length mismatch");
    std::vector<double> z(eps.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = latent.mu[i] + std::exp(0.5 * latent.log_var[i]) * eps[i];
    return z;
}

std::vector<double> decode_latent(const TrainedModel& model, std::span<const double> z, const nn::DropoutMask* mask) {
    if (z.size() != model.config.latent)
        throw DimensionError("decode: latent has " + std::to_string(z.size()) + " values, model expects " +
                             std::to_string(model.config.latent));
    std::vector<double> out(model.config.input_width);
    nn::infer(model.decoder, z, mask, out);
    return out;
}

nn::DropoutMask sample_decoder_mask(const TrainedModel& model, std::uint64_t rng_seed) {
    auto shape = model.decoder_mask_shape();
    if (shape.empty()) shape = {model.config.hidden2, model.config.hidden1, 0};
    return nn::sample_mask(shape, model.config.keep_rate, rng_seed);
}

// -- persistence ---------------------------------------------------------------

namespace {

void write_values(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << csv::format_double(values[i]);
    }
    out << '\n';
}

void write_network(std::ostream& out, std::string_view name, const nn::NetworkParams& net) {
    out << "network " << name << ' ' << net.layers.size() << '\n';
    for (const auto& layer : net.layers) {
        out << "layer " << layer.out_width() << ' ' << layer.in_width() << ' ' << nn::to_string(layer.activation)
            << '\n';
        for (std::size_t r = 0; r < layer.out_width(); ++r) write_values(out, layer.weights.row(r));
        write_values(out, layer.bias);
    }
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::string raw_line() {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError("model: unexpected end of file", line_no_ + 1);
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    std::vector<std::string> tokens() {
        std::istringstream ss(raw_line());
        std::vector<std::string> out;
        for (std::string t; ss >> t;) out.push_back(std::move(t));
        return out;
    }

    std::vector<std::string> keyed(std::string_view key, std::size_t values) {
        auto t = tokens();
        if (t.empty() || t[0] != key) throw ParseError("model: expected '" + std::string(key) + "'", line_no_, 1);
        if (values != kAny && t.size() != values + 1)
            throw ParseError("model: '" + std::string(key) + "' expects " + std::to_string(values) + " values",
                             line_no_);
        return t;
    }

    std::size_t size_at(const std::vector<std::string>& t, std::size_t i) const {
        std::size_t v = 0;
        const auto& s = t.at(i);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw ParseError("model: '" + s + "' is not a non-negative integer", line_no_, i + 1);
        return v;
    }

    std::uint64_t u64_at(const std::vector<std::string>& t, std::size_t i) const { return size_at(t, i); }

    double real_at(const std::vector<std::string>& t, std::size_t i) const {
        const auto v = csv::parse_double(t.at(i));
        if (!v) throw ParseError("model: '" + t.at(i) + "' is not a finite number", line_no_, i + 1);
        return *v;
    }

    std::vector<double> reals(std::size_t count) {
        auto t = tokens();
        if (t.size() != count)
            throw ParseError("model: expected " + std::to_string(count) + " values, found " + std::to_string(t.size()),
                             line_no_);
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = real_at(t, i);
        return out;
    }

    std::size_t line() const noexcept { return line_no_; }

    static constexpr std::size_t kAny = static_cast<std::size_t>(-1);

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

nn::NetworkParams read_network(LineReader& r, std::string_view name) {
    const auto head = r.keyed("network", 2);
    if (head[1] != name) throw ParseError("model: expected network '" + std::string(name) + "'", r.line(), 2);
    const std::size_t depth = r.size_at(head, 2);
    if (depth == 0 || depth > 64) throw ParseError("model: implausible layer count", r.line(), 3);
    nn::NetworkParams net;
    for (std::size_t l = 0; l < depth; ++l) {
        const auto t = r.keyed("layer", 3);
        const std::size_t out_w = r.size_at(t, 1);
        const std::size_t in_w = r.size_at(t, 2);
        if (out_w == 0 || in_w == 0 || out_w > (1u << 20) || in_w > (1u << 20))
            throw ParseError("model: corrupted layer dimensions", r.line());
        nn::DenseLayer layer;
        try {
            layer.activation = nn::activation_from_string(t[3]);
        } catch (const Error& e) {
            throw ParseError(std::string("model: ") + e.what(), r.line(), 4);
        }
        layer.weights = Matrix(out_w, in_w);
        for (std::size_t row = 0; row < out_w; ++row) {
            const auto values = r.reals(in_w);
            std::copy(values.begin(), values.end(), layer.weights.row(row).begin());
        }
        layer.bias = r.reals(out_w);
        net.layers.push_back(std::move(layer));
    }
    try {
        net.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("model: ") + e.what(), r.line());
    }
    return net;
}

} // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
    const auto& c = model.config;
    out << kModelFormatTag << '\n';
    out << "kind " << to_string(c.kind) << '\n';
    out << "mcd_decoder " << (c.mcd_decoder ? 1 : 0) << '\n';
    out << "input_width " << c.input_width << '\n';
    out << "hidden " << c.hidden1 << ' ' << c.hidden2 << '\n';
    out << "latent " << c.latent << '\n';
    out << "keep_rate " << csv::format_double(c.keep_rate) << '\n';
    out << "epochs " << c.training.epochs << '\n';
    out << "learning_rate " << csv::format_double(c.training.learning_rate) << '\n';
    out << "batch_size " << c.training.batch_size << '\n';
    out << "seed " << c.training.seed << '\n';
    out << "loss " << to_string(c.training.loss) << '\n';
    out << "schema_fingerprint " << model.schema_fingerprint << '\n';
    out << "loss_trace " << model.loss_trace.size() << '\n';
    write_values(out, model.loss_trace);
    write_network(out, "encoder", model.encoder);
    write_network(out, "decoder", model.decoder);
    out << "end\n";
}

TrainedModel load_model(std::istream& in) {
    LineReader body(in);
    const std::string tag = body.raw_line();
    if (tag != kModelFormatTag)
        throw Error("model: unsupported format tag '" + tag + "' (expected '" + std::string(kModelFormatTag) + "')");
    TrainedModel m;
    auto& c = m.config;
    {
        const auto t = body.keyed("kind", 1);
        if (t[1] == "AE")
            c.kind = ModelKind::AE;
        else if (t[1] == "VAE")
            c.kind = ModelKind::VAE;
        else
            throw ParseError("model: unknown kind '" + t[1] + "'", body.line(), 2);
    }
    c.mcd_decoder = body.size_at(body.keyed("mcd_decoder", 1), 1) != 0;
    c.input_width = body.size_at(body.keyed("input_width", 1), 1);
    {
        const auto t = body.keyed("hidden", 2);
        c.hidden1 = body.size_at(t, 1);
        c.hidden2 = body.size_at(t, 2);
    }
    c.latent = body.size_at(body.keyed("latent", 1), 1);
    c.keep_rate = body.real_at(body.keyed("keep_rate", 1), 1);
    c.training.epochs = body.size_at(body.keyed("epochs", 1), 1);
    c.training.learning_rate = body.real_at(body.keyed("learning_rate", 1), 1);
    c.training.batch_size = body.size_at(body.keyed("batch_size", 1), 1);
    c.training.seed = body.u64_at(body.keyed("seed", 1), 1);
    {
        const auto t = body.keyed("loss", 1);
        try {
            c.training.loss = reconstruction_loss_from_string(t[1]);
        } catch (const Error& e) {
            throw ParseError(std::string("model: ") + e.what(), body.line(), 2);
        }
    }
    m.schema_fingerprint = body.u64_at(body.keyed("schema_fingerprint", 1), 1);
    const std::size_t trace_len = body.size_at(body.keyed("loss_trace", 1), 1);
    m.loss_trace = body.reals(trace_len);
    m.encoder = read_network(body, "encoder");
    m.decoder = read_network(body, "decoder");
    body.keyed("end", 0);
    try {
        m.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("model: corrupted dimensions: ") + e.what(), body.line());
    }
    return m;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    save_model(f, model);
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "'");
    return load_model(f);
}

} // namespace synthgen
