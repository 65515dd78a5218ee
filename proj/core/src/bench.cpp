#include "synthgen/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "synthgen/error.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

TimingReport time_generation(const TrainedModel& model, GeneratorKind kind, const Matrix& seeds, std::size_t t,
                             std::size_t repetitions, std::uint64_t rng_seed, const std::string& dataset) {
    return time_generators({{&model, kind}}, seeds, t, repetitions, rng_seed, dataset).front();
}

std::vector<TimingReport> time_generators(const std::vector<TimedGenerator>& generators, const Matrix& seeds,
                                          std::size_t t, std::size_t repetitions, std::uint64_t rng_seed,
                                          const std::string& dataset) {
    if (repetitions == 0) throw Error("time_generation: repetitions must be positive");
    if (seeds.rows() == 0) throw Error("time_generation: no seeding rows");
    if (generators.empty()) throw Error("time_generation: nothing to time");

    std::vector<TimingReport> reports(generators.size());
    for (std::size_t g = 0; g < generators.size(); ++g) {
        if (!generators[g].model) throw Error("time_generation: null model");
        auto& r = reports[g];
        r.generator_kind = generators[g].kind;
        r.dataset = dataset;
        r.repetitions = repetitions;
        r.t = t;
        r.per_run_seconds.reserve(repetitions);
    }

    const GenerationOptions single_thread{.zero_epsilon = false, .threads = 1};
    auto run = [&](std::size_t g, std::uint64_t seed) {
        const GenerationRequest request{*generators[g].model, seeds, t, seed};
        return generate(generators[g].kind, request, single_thread);
    };
    // Warm-up: faults in pages and caches so the first timed run is not an outlier.
    for (std::size_t g = 0; g < generators.size(); ++g) run(g, derive_seed(rng_seed, "warmup"));

    using clock = std::chrono::steady_clock;
    for (std::size_t i = 0; i < repetitions; ++i) {
        for (std::size_t g = 0; g < generators.size(); ++g) {
            const std::uint64_t seed = derive_seed(derive_seed(rng_seed, to_string(generators[g].kind)), i);
            const auto start = clock::now();
            const auto out = run(g, seed);
            const auto stop = clock::now();
            if (out.rows.rows() != seeds.rows() * t) throw Error("time_generation: unexpected output size");
            reports[g].per_run_seconds.push_back(std::chrono::duration<double>(stop - start).count());
        }
    }
    for (auto& r : reports) summarize_timings(r);
    return reports;
}

void summarize_timings(TimingReport& r) {
    const auto& v = r.per_run_seconds;
    r.repetitions = v.size();
    if (v.empty()) {
        r.mean_seconds = r.sd_seconds = 0.0;
        return;
    }
    const double n = static_cast<double>(v.size());
    r.mean_seconds = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() == 1) {
        r.sd_seconds = 0.0;
        return;
    }
    double ss = 0.0;
    for (const double x : v) ss += (x - r.mean_seconds) * (x - r.mean_seconds);
    r.sd_seconds = std::sqrt(ss / (n - 1.0));
}

namespace {
std::string cell(const TimingReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f [%.4f]", r.mean_seconds, r.sd_seconds);
    return buf;
}
} // namespace

void write_timing_table(std::ostream& out, const std::vector<TimingReport>& reports) {
    constexpr GeneratorKind kinds[] = {GeneratorKind::VAE, GeneratorKind::MCD_VAE, GeneratorKind::MCD_AE};
    std::vector<std::string> order;
    std::map<std::string, std::map<GeneratorKind, const TimingReport*>> rows;
    for (const auto& r : reports) {
        if (!rows.count(r.dataset)) order.push_back(r.dataset);
        rows[r.dataset][r.generator_kind] = &r;
    }
    out << "Dataset";
    for (const auto k : kinds) out << ',' << to_string(k) << " [s.d.]";
    out << '\n';
    for (const auto& name : order) {
        out << name;
        for (const auto k : kinds) {
            const auto it = rows[name].find(k);
            out << ',' << (it == rows[name].end() ? std::string("-") : cell(*it->second));
        }
        out << '\n';
    }
}

void write_timing_runs(std::ostream& out, const std::vector<TimingReport>& reports) {
    out << "dataset,generator,run,seconds\n";
    char buf[32];
    for (const auto& r : reports)
        for (std::size_t i = 0; i < r.per_run_seconds.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.9f", r.per_run_seconds[i]);
            out << r.dataset << ',' << to_string(r.generator_kind) << ',' << i << ',' << buf << '\n';
        }
}

} // namespace synthgen
