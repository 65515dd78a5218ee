#pragma once

// Autoencoder and variational autoencoder assembly, training and persistence.
//
// Encoder: w -> M -> N -> L (AE) or 2L (VAE heads mu || log_var), relu hidden layers.
// Decoder: L -> N -> M -> w, relu hidden layers, sigmoid output. With an MCD decoder
// both hidden decoder layers carry dropout; the output layer never does, and the
// encoder never does.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "synthgen/matrix.hpp"
#include "synthgen/nn.hpp"

namespace synthgen {

enum class ModelKind { AE, VAE };
enum class ReconstructionLoss { mse, bce };

const char* to_string(ModelKind k) noexcept;
const char* to_string(ReconstructionLoss l) noexcept;
ReconstructionLoss reconstruction_loss_from_string(std::string_view s);

struct TrainingConfig {
    std::size_t epochs = 200;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    ReconstructionLoss loss = ReconstructionLoss::mse;
    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct ArchitectureConfig {
    std::size_t input_width = 0; ///< w
    std::size_t hidden1 = 0;     ///< M
    std::size_t hidden2 = 0;     ///< N
    std::size_t latent = 0;      ///< L
    double keep_rate = 0.9;
    ModelKind kind = ModelKind::VAE;
    bool mcd_decoder = false;
    TrainingConfig training;

    /// M >= N >= L >= 1, w >= 1, keep_rate in (0,1], epochs/batch >= 1.
    void validate() const;

    /// L = max(1, a/2). Hidden sizes are 512/256 with `wide_layers`, otherwise
    /// min(512, 8w) and min(256, 4w).
    static ArchitectureConfig defaults(std::size_t input_width, std::size_t attribute_count, ModelKind kind,
                                       bool mcd_decoder, bool wide_layers = false);

    friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

struct LatentGaussian {
    std::vector<double> mu;
    std::vector<double> log_var; ///< clamped to [-kLogVarBound, kLogVarBound]
};

struct TrainedModel {
    ArchitectureConfig config;
    nn::NetworkParams encoder;
    nn::NetworkParams decoder;
    std::uint64_t schema_fingerprint = 0;
    std::vector<double> loss_trace; ///< mean objective per epoch

    /// Dropout shape over the decoder (empty when the decoder has no MCD layers).
    nn::MaskShape decoder_mask_shape() const;
    void validate() const;
};

/// Test hooks for training; none alter production behaviour when left default.
struct TrainHooks {
    bool zero_epsilon = false; ///< VAE: feed z = mu to the decoder during training
};

/// Trains on every row of `rows` (the generator training split).
TrainedModel train(const Matrix& rows, const ArchitectureConfig& config, std::uint64_t schema_fingerprint = 0,
                   const TrainHooks& hooks = {});

/// VAE encoder heads. Throws for AE models.
LatentGaussian encode_gaussian(const TrainedModel& model, std::span<const double> x);

/// AE latent vector, or the VAE mean.
std::vector<double> encode_point(const TrainedModel& model, std::span<const double> x);

/// z_i = mu_i + exp(log_var_i / 2) * eps_i
std::vector<double> reparameterize(const LatentGaussian& latent, std::span<const double> eps);

/// Decoder forward; the mask applies only when supplied.
std::vector<double> decode_latent(const TrainedModel& model, std::span<const double> z,
                                  const nn::DropoutMask* mask = nullptr);

nn::DropoutMask sample_decoder_mask(const TrainedModel& model, std::uint64_t rng_seed);

void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

inline constexpr std::string_view kModelFormatTag = "synthgen-model v1";
inline constexpr double kLogVarBound = 10.0;

} // namespace synthgen
