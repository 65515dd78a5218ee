#include <benchmark/benchmark.h>

#include <random>

#include "synthgen/generate.hpp"
#include "synthgen/nn.hpp"

using namespace synthgen;

namespace {

// Untrained models are enough to measure generation cost: the work per row does
// not depend on the weights beyond relu sparsity.
struct Fixture {
    Matrix seeds;
    TrainedModel vae;
    TrainedModel mcd_vae;
    TrainedModel mcd_ae;

    explicit Fixture(std::size_t width) : seeds(192, width) {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (double& v : seeds.values()) v = u(gen);
        auto make = [&](ModelKind kind, bool mcd) {
            auto c = ArchitectureConfig::defaults(width, width - 2, kind, mcd);
            c.training.epochs = 1;
            return train(seeds, c);
        };
        vae = make(ModelKind::VAE, false);
        mcd_vae = make(ModelKind::VAE, true);
        mcd_ae = make(ModelKind::AE, true);
    }

    const TrainedModel& model(GeneratorKind k) const {
        return k == GeneratorKind::VAE ? vae : k == GeneratorKind::MCD_VAE ? mcd_vae : mcd_ae;
    }
};

const Fixture& fixture() {
    static const Fixture f(9);
    return f;
}

void BM_Generate(benchmark::State& state) {
    const auto kind = static_cast<GeneratorKind>(state.range(0));
    const auto t = static_cast<std::size_t>(state.range(1));
    const auto& f = fixture();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto g = generate(kind, {f.model(kind), f.seeds, t, ++seed});
        benchmark::DoNotOptimize(g.rows.values().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.seeds.rows() * t));
    state.SetLabel(to_string(kind));
}

void BM_Forward(benchmark::State& state) {
    const auto& net = fixture().mcd_ae.decoder;
    const auto plan = nn::compile(net);
    nn::InferenceScratch scratch;
    std::vector<double> x(net.input_width(), 0.3), out(net.output_width());
    CounterRng rng(1);
    const nn::MaskShape shape{net.layers[0].out_width(), net.layers[1].out_width(), 0};
    for (auto _ : state) {
        if (state.range(0))
            nn::infer_dropout(plan, x, shape, 0.9, rng, out, scratch);
        else
            nn::infer(plan, x, nullptr, out, scratch);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetLabel(state.range(0) ? "dropout" : "plain");
}

} // namespace

BENCHMARK(BM_Generate)->ArgsProduct({{0, 1, 2}, {2, 100}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Forward)->Arg(0)->Arg(1);
BENCHMARK_MAIN();
