#include "synthgen/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "synthgen/error.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

const char* to_string(GeneratorKind k) noexcept {
    switch (k) {
    case GeneratorKind::MCD_VAE: return "MCD-VAE";
    case GeneratorKind::MCD_AE: return "MCD-AE";
    case GeneratorKind::VAE: break;
    }
    return "VAE";
}

GeneratorKind generator_from_string(std::string_view s) {
    if (s == "VAE") return GeneratorKind::VAE;
    if (s == "MCD-VAE") return GeneratorKind::MCD_VAE;
    if (s == "MCD-AE") return GeneratorKind::MCD_AE;
    throw Error("unknown generator '" + std::string(s) + "' (expected VAE, MCD-VAE or MCD-AE)");
}

ModelKind model_kind_for(GeneratorKind k) noexcept { return k == GeneratorKind::MCD_AE ? ModelKind::AE : ModelKind::VAE; }

bool uses_mcd_decoder(GeneratorKind k) noexcept { return k != GeneratorKind::VAE; }

namespace {

void check_request(const GenerationRequest& req) {
    if (req.t < 1) throw Error("generate: t must be >= 1");
    if (req.seeds.rows() == 0) throw Error("generate: seeding set is empty");
    if (req.seeds.cols() != req.model.config.input_width)
        throw DimensionError("generate: seed width " + std::to_string(req.seeds.cols()) + " != model input width " +
                             std::to_string(req.model.config.input_width));
}

GeneratedSet allocate(const GenerationRequest& req, GeneratorKind kind) {
    GeneratedSet out;
    out.kind = kind;
    out.rows = Matrix(req.seeds.rows() * req.t, req.model.config.input_width);
    out.provenance.resize(out.rows.rows());
    for (std::size_t s = 0; s < req.seeds.rows(); ++s)
        for (std::size_t r = 0; r < req.t; ++r) out.provenance[s * req.t + r] = {s, r};
    return out;
}

// Runs body(first_seed, last_seed) over contiguous chunks of the seeding set.
template <typename Body>
void for_seed_chunks(std::size_t seeds, unsigned threads, Body&& body) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, seeds);
    if (workers == 1) {
        body(std::size_t{0}, seeds);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (seeds + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(seeds, lo + chunk);
        if (lo < hi) pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
}

GeneratedSet mcd_generate(const GenerationRequest& req, const GenerationOptions& options, GeneratorKind kind) {
    check_request(req);
    const auto& model = req.model;
    if (model.config.kind != model_kind_for(kind))
        throw Error(std::string("generate: ") + to_string(kind) + " needs a " + to_string(model_kind_for(kind)) +
                    " model");
    if (!model.config.mcd_decoder)
        throw Error(std::string("generate: ") + to_string(kind) + " needs a model trained with an MCD decoder");

    auto out = allocate(req, kind);
    if (model.config.keep_rate >= 1.0)
        out.warnings.emplace_back("keep_rate = 1 disables dropout: all replicates of a seed are identical");

    // The latent is fixed across a seed's replicates, so the first decoder layer is
    // evaluated once per seed and the second layer's pre-activation with nothing
    // dropped is kept; each replicate then subtracts only the units its mask drops.
    const auto encoder = nn::compile(model.encoder);
    const auto decoder = nn::compile(model.decoder);
    std::vector<double> sigma_sums(req.seeds.rows(), 0.0);
    for_seed_chunks(req.seeds.rows(), options.threads, [&](std::size_t lo, std::size_t hi) {
        const auto shape = model.decoder_mask_shape();
        nn::InferenceScratch scratch;
        std::vector<double> heads(model.encoder.output_width());
        std::vector<double> hidden(model.config.hidden2);
        const std::size_t L = model.config.latent;
        for (std::size_t s = lo; s < hi; ++s) {
            nn::infer(encoder, req.seeds.row(s), nullptr, heads, scratch);
            if (kind == GeneratorKind::MCD_VAE)
                for (std::size_t i = 0; i < L; ++i)
                    sigma_sums[s] += std::exp(0.5 * std::clamp(heads[L + i], -kLogVarBound, kLogVarBound));
            nn::infer_prefix(decoder, std::span<const double>(heads).first(L), 1, hidden, scratch);
            const auto base = nn::dropout_base(decoder, hidden, shape, model.config.keep_rate, 1);
            CounterRng rng(derive_seed(req.rng_seed, s));
            for (std::size_t r = 0; r < req.t; ++r)
                nn::infer_dropout(decoder, base, shape, rng, out.rows.row(s * req.t + r), scratch);
        }
    });
    if (kind == GeneratorKind::MCD_VAE) {
        double total = 0.0;
        for (double v : sigma_sums) total += v;
        out.mean_discarded_sigma = total / static_cast<double>(req.seeds.rows() * model.config.latent);
    }
    return out;
}

} // namespace

GeneratedSet vae_generate(const GenerationRequest& req, const GenerationOptions& options) {
    check_request(req);
    const auto& model = req.model;
    if (model.config.kind != ModelKind::VAE) throw Error("generate: VAE generation needs a VAE model");

    auto out = allocate(req, GeneratorKind::VAE);
    const std::size_t L = model.config.latent;
    const auto encoder = nn::compile(model.encoder);
    const auto decoder = nn::compile(model.decoder);
    for_seed_chunks(req.seeds.rows(), options.threads, [&](std::size_t lo, std::size_t hi) {
        nn::InferenceScratch scratch;
        std::vector<double> heads(model.encoder.output_width());
        std::vector<double> sigma(L);
        std::vector<double> z(L);
        for (std::size_t s = lo; s < hi; ++s) {
            nn::infer(encoder, req.seeds.row(s), nullptr, heads, scratch);
            for (std::size_t i = 0; i < L; ++i)
                sigma[i] = std::exp(0.5 * std::clamp(heads[L + i], -kLogVarBound, kLogVarBound));
            CounterRng rng(derive_seed(req.rng_seed, s));
            for (std::size_t r = 0; r < req.t; ++r) {
                for (std::size_t i = 0; i < L; ++i) {
                    const double eps = options.zero_epsilon ? 0.0 : rng.normal();
                    z[i] = heads[i] + sigma[i] * eps;
                }
                nn::infer(decoder, z, nullptr, out.rows.row(s * req.t + r), scratch);
            }
        }
    });
    return out;
}

GeneratedSet mcd_vae_generate(const GenerationRequest& req, const GenerationOptions& options) {
    return mcd_generate(req, options, GeneratorKind::MCD_VAE);
}

GeneratedSet mcd_ae_generate(const GenerationRequest& req, const GenerationOptions& options) {
    return mcd_generate(req, options, GeneratorKind::MCD_AE);
}

GeneratedSet generate(GeneratorKind kind, const GenerationRequest& req, const GenerationOptions& options) {
    switch (kind) {
    case GeneratorKind::MCD_VAE: return mcd_vae_generate(req, options);
    case GeneratorKind::MCD_AE: return mcd_ae_generate(req, options);
    case GeneratorKind::VAE: break;
    }
    return vae_generate(req, options);
}

RawTable materialize(const GeneratedSet& generated, const Schema& schema) {
    return decode(generated.rows, schema);
}

void write_provenance(std::ostream& out, const GeneratedSet& generated) {
    out << "seed_index,replicate_index\n";
    for (const auto& p : generated.provenance) out << p.seed_index << ',' << p.replicate << '\n';
}

unsigned thread_count_from_env() {
    const char* v = std::getenv("SYNTHGEN_THREADS");
    if (!v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1) return 1;
    return static_cast<unsigned>(std::min<long>(n, 256));
}

} // namespace synthgen
