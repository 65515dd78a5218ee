// synthgen: ingest, run, bench and evaluate from the command line.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthgen/error.hpp"
#include "synthgen/experiment.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> t;
    std::optional<std::size_t> k;
    std::optional<std::size_t> trees;
    std::optional<double> keep_rate;
    std::optional<std::size_t> epochs;

    void attach(CLI::App* app) {
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--out", out, "Output directory");
        app->add_option("--t", t, "Synthetic rows per seeding row");
        app->add_option("--k", k, "Clusters for k-medoids (0: class count)");
        app->add_option("--trees", trees, "Random forest size")->check(CLI::PositiveNumber);
        app->add_option("--keep-rate", keep_rate, "Dropout keep rate in (0,1]");
        app->add_option("--epochs", epochs, "Training epochs")->check(CLI::PositiveNumber);
    }

    void apply(synthgen::ExperimentConfig& c) const {
        if (seed) c.seed = *seed;
        if (out) c.output_dir = *out;
        if (t) c.t = *t;
        if (k) c.k = *k;
        if (trees) c.trees = *trees;
        if (keep_rate) c.architecture.keep_rate = *keep_rate;
        if (epochs) c.architecture.epochs = *epochs;
        c.validate();
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-artificial tabular data from VAE, MCD-VAE and MCD-AE generators"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Infer schema, impute, encode and write schema.json + encoded.csv");
    std::string ingest_csv;
    std::string class_column;
    std::string ingest_out = ".";
    std::string missing = "?";
    ingest->add_option("csv", ingest_csv, "Input CSV with header")->required()->check(CLI::ExistingFile);
    ingest->add_option("--class", class_column, "Class column: header name or #index")->required();
    ingest->add_option("--out", ingest_out, "Output directory");
    ingest->add_option("--missing", missing, "Missing-value marker");

    // run
    auto* run = app.add_subcommand("run", "Split, train, generate and evaluate per the config");
    std::string run_config;
    Overrides run_over;
    run->add_option("--config", run_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run_over.attach(run);

    // bench
    auto* bench = app.add_subcommand("bench", "Time generation for each config's generators");
    std::vector<std::string> bench_configs;
    Overrides bench_over;
    std::optional<std::size_t> repetitions;
    bench->add_option("--config", bench_configs, "Experiment config(s) (JSON); repeatable")
        ->required()
        ->check(CLI::ExistingFile);
    bench->add_option("--repetitions", repetitions, "Timed runs per generator")->check(CLI::PositiveNumber);
    bench_over.attach(bench);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Compare two tables over one schema");
    std::string d1;
    std::string d2;
    std::string schema;
    std::uint64_t eval_seed = 0;
    std::size_t eval_k = 0;
    std::size_t eval_trees = 100;
    std::string eval_out;
    evaluate->add_option("d1", d1, "Original table (raw or encoded CSV)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("d2", d2, "Compared table (raw or encoded CSV)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--schema", schema, "Fitted schema (schema.json from ingest or run)")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--seed", eval_seed, "Master seed");
    evaluate->add_option("--k", eval_k, "Clusters for k-medoids (0: class count)");
    evaluate->add_option("--trees", eval_trees, "Random forest size")->check(CLI::PositiveNumber);
    evaluate->add_option("--out", eval_out, "Write the JSON report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            synthgen::cmd_ingest(ingest_csv, class_column, ingest_out, missing);
            std::cout << "wrote " << ingest_out << "/schema.json and " << ingest_out << "/encoded.csv\n";
        } else if (*run) {
            auto config = synthgen::load_config(run_config);
            run_over.apply(config);
            const auto result = synthgen::cmd_run(config);
            for (const auto& r : result.runs)
                synthgen::write_report_text(std::cout, r.report, config.label() + " / " + synthgen::to_string(r.kind));
            std::cout << "artifacts in " << (config.output_dir / config.label()).string() << '\n';
        } else if (*bench) {
            std::vector<synthgen::ExperimentConfig> configs;
            for (const auto& path : bench_configs) {
                auto c = synthgen::load_config(path);
                bench_over.apply(c);
                if (bench_over.t) c.bench_t = *bench_over.t;
                if (repetitions) c.bench_repetitions = *repetitions;
                configs.push_back(std::move(c));
            }
            const std::filesystem::path out = bench_over.out ? std::filesystem::path(*bench_over.out) : configs.front().output_dir;
            const auto reports = synthgen::cmd_bench(configs, out);
            synthgen::write_timing_table(std::cout, reports);
        } else if (*evaluate) {
            const auto report = synthgen::cmd_evaluate(d1, d2, schema, eval_seed, eval_k, eval_trees);
            const auto text = synthgen::report_json(report, d1, d2);
            if (eval_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(eval_out, std::ios::binary);
                if (!(out << text)) throw synthgen::Error("cannot write '" + eval_out + "'");
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "synthgen: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
