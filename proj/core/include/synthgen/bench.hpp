#pragma once

// Wall-clock timing of the generation procedure (seed encoding included).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "synthgen/generate.hpp"
#include "synthgen/matrix.hpp"
#include "synthgen/models.hpp"

namespace synthgen {

struct TimingReport {
    GeneratorKind generator_kind = GeneratorKind::VAE;
    std::string dataset;
    std::size_t repetitions = 0;
    std::size_t t = 0;
    double mean_seconds = 0.0;
    double sd_seconds = 0.0; ///< sample sd; 0 for a single run
    std::vector<double> per_run_seconds;
};

/// Runs generation `repetitions` times on one thread, each with its own derived seed.
/// One untimed warm-up run precedes the measurements.
TimingReport time_generation(const TrainedModel& model, GeneratorKind kind, const Matrix& seeds, std::size_t t,
                             std::size_t repetitions, std::uint64_t rng_seed, const std::string& dataset = {});

struct TimedGenerator {
    const TrainedModel* model = nullptr;
    GeneratorKind kind = GeneratorKind::VAE;
};

/// Times several generators on the same seeds with their runs interleaved round-robin,
/// so slow drift in machine load is shared evenly. Report order follows `generators`.
std::vector<TimingReport> time_generators(const std::vector<TimedGenerator>& generators, const Matrix& seeds,
                                          std::size_t t, std::size_t repetitions, std::uint64_t rng_seed,
                                          const std::string& dataset = {});

/// Mean and sample sd of per_run_seconds.
void summarize_timings(TimingReport& report);

/// One row per dataset with columns "VAE [s.d.]", "MCD-VAE [s.d.]", "MCD-AE [s.d.]".
/// Cells are "mean [sd]"; generators absent for a dataset print "-".
void write_timing_table(std::ostream& out, const std::vector<TimingReport>& reports);

/// Every run as CSV: dataset,generator,run,seconds
void write_timing_runs(std::ostream& out, const std::vector<TimingReport>& reports);

} // namespace synthgen
