#pragma once

// End-to-end experiments driven by a JSON config: ingest, run (split, train,
// generate, evaluate), bench and evaluate. One master seed fans out to every
// stochastic stage through labelled derivation.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "synthgen/bench.hpp"
#include "synthgen/data.hpp"
#include "synthgen/eval.hpp"
#include "synthgen/generate.hpp"
#include "synthgen/models.hpp"

namespace synthgen {

enum class NormalizationScope { full, train };

struct ArchitectureOverrides {
    std::optional<std::size_t> hidden1;
    std::optional<std::size_t> hidden2;
    std::optional<std::size_t> latent;
    std::optional<double> keep_rate;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> learning_rate;
    std::optional<ReconstructionLoss> loss;
    bool wide_layers = false; ///< 512/256 hidden layers regardless of width
};

struct ExperimentConfig {
    std::filesystem::path dataset;
    std::string class_column;  ///< header name, or "#i" for 0-based position i
    std::string name;          ///< defaults to the dataset file stem
    std::vector<GeneratorKind> generators{GeneratorKind::VAE, GeneratorKind::MCD_VAE, GeneratorKind::MCD_AE};
    ArchitectureOverrides architecture;
    std::size_t t = 2;
    std::size_t k = 0;         ///< 0: number of classes
    std::size_t trees = 100;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::string missing_marker = "?";
    NormalizationScope normalization = NormalizationScope::full;
    std::size_t bench_repetitions = 100;
    std::size_t bench_t = 1000;

    /// Dataset name used in reports.
    std::string label() const;
    void validate() const;
};

/// Unknown keys are rejected. A relative dataset path is taken relative to `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_json(const ExperimentConfig& config);

ColumnSelector parse_column_selector(const std::string& text);

/// Loaded, imputed, split and encoded data for one experiment.
struct PreparedData {
    Schema schema; ///< fitted
    EncodedDataset all;
    SplitIndices split;
    EncodedDataset train;
    EncodedDataset seeds;
    EncodedDataset eval;
};

PreparedData prepare_data(const ExperimentConfig& config);

ArchitectureConfig architecture_for(const ExperimentConfig& config, const Schema& schema, GeneratorKind kind);

struct GeneratorRun {
    GeneratorKind kind = GeneratorKind::VAE;
    TrainedModel model;
    GeneratedSet generated;
    EncodedDataset generated_encoded; ///< materialized then re-encoded
    ComparisonReport report;
};

struct ExperimentResult {
    PreparedData data;
    std::vector<GeneratorRun> runs;
};

/// Pipeline without file output.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes schema.json and encoded.csv into out_dir.
void cmd_ingest(const std::filesystem::path& csv, const std::string& class_column, const std::filesystem::path& out_dir,
                const std::string& missing_marker = "?");

/// run_experiment, then every artifact under output_dir/<label>/.
ExperimentResult cmd_run(const ExperimentConfig& config);

/// Timing per generator for each config; writes timing.csv and timing_runs.csv into out_dir.
std::vector<TimingReport> cmd_bench(const std::vector<ExperimentConfig>& configs, const std::filesystem::path& out_dir);

/// Compares two tables over one schema. Each file may be a raw table or an encoded CSV.
ComparisonReport cmd_evaluate(const std::filesystem::path& d1, const std::filesystem::path& d2,
                              const std::filesystem::path& schema, std::uint64_t seed, std::size_t k = 0,
                              std::size_t trees = 100);

} // namespace synthgen
