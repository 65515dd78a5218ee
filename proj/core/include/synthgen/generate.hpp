#pragma once

// Seeded generation: each seeding row yields t synthetic rows.
//
//   VAE      encode (mu, log_var); z = mu + sigma * eps, eps ~ N(0, I); plain decode
//   MCD-VAE  encode mu only; t decoder passes, fresh dropout mask each
//   MCD-AE   encode latent;  t decoder passes, fresh dropout mask each
//
// Row s*t + r of the output is replicate r of seed s. Every seed draws from its
// own counter-based stream, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "synthgen/data.hpp"
#include "synthgen/matrix.hpp"
#include "synthgen/models.hpp"

namespace synthgen {

enum class GeneratorKind { VAE, MCD_VAE, MCD_AE };

const char* to_string(GeneratorKind k) noexcept;
GeneratorKind generator_from_string(std::string_view s);
/// Model family and decoder type each generator is trained with.
ModelKind model_kind_for(GeneratorKind k) noexcept;
bool uses_mcd_decoder(GeneratorKind k) noexcept;

struct GenerationRequest {
    const TrainedModel& model;
    const Matrix& seeds;
    std::size_t t = 2;
    std::uint64_t rng_seed = 0;
};

struct Provenance {
    std::size_t seed_index = 0;
    std::size_t replicate = 0;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct GeneratedSet {
    Matrix rows;
    std::vector<Provenance> provenance;
    GeneratorKind kind = GeneratorKind::VAE;
    std::vector<std::string> warnings;
    /// MCD-VAE only: mean sigma of the encoder heads, unused by generation.
    double mean_discarded_sigma = 0.0;
};

struct GenerationOptions {
    bool zero_epsilon = false; ///< test hook: VAE draws eps = 0
    unsigned threads = 1;
};

GeneratedSet vae_generate(const GenerationRequest& request, const GenerationOptions& options = {});
GeneratedSet mcd_vae_generate(const GenerationRequest& request, const GenerationOptions& options = {});
GeneratedSet mcd_ae_generate(const GenerationRequest& request, const GenerationOptions& options = {});
GeneratedSet generate(GeneratorKind kind, const GenerationRequest& request, const GenerationOptions& options = {});

/// Decodes generated rows back to the schema (class included, like any categorical).
RawTable materialize(const GeneratedSet& generated, const Schema& schema);

/// CSV with header "seed_index,replicate_index".
void write_provenance(std::ostream& out, const GeneratedSet& generated);

/// SYNTHGEN_THREADS when set to a positive integer, otherwise 1.
unsigned thread_count_from_env();

} // namespace synthgen
