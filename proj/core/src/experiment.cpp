#include "synthgen/experiment.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synthgen/csv.hpp"
#include "synthgen/error.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Re-throws anything from `fn` with the stage name in front.
template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw Error(name + ": " + e.what());
    }
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open '" + p.string() + "' for reading");
    return in;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + p.string() + "' for writing");
    return out;
}

} // namespace

// -- config ----------------------------------------------------------------------

std::string ExperimentConfig::label() const { return name.empty() ? dataset.stem().string() : name; }

void ExperimentConfig::validate() const {
    if (dataset.empty()) throw Error("config: dataset is required");
    if (class_column.empty()) throw Error("config: class_column is required");
    if (generators.empty()) throw Error("config: at least one generator is required");
    if (t < 1) throw Error("config: t must be >= 1");
    if (k == 1) throw Error("config: k must be 0 (class count) or >= 2");
    if (trees < 1) throw Error("config: trees must be >= 1");
    if (bench_repetitions < 1 || bench_t < 1) throw Error("config: bench repetitions and t must be >= 1");
    if (architecture.keep_rate && !(*architecture.keep_rate > 0.0 && *architecture.keep_rate <= 1.0))
        throw Error("config: keep_rate must lie in (0, 1]");
}

ColumnSelector parse_column_selector(const std::string& text) {
    if (text.size() > 1 && text[0] == '#') {
        std::size_t pos = 0;
        try {
            const auto v = std::stoull(text.substr(1), &pos);
            if (pos == text.size() - 1) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        throw Error("bad column position '" + text + "'");
    }
    return text;
}

namespace {

void parse_architecture(const json& v, ArchitectureOverrides& a) {
    for (const auto& [key, value] : v.items()) {
        if (key == "hidden1") a.hidden1 = value.get<std::size_t>();
        else if (key == "hidden2") a.hidden2 = value.get<std::size_t>();
        else if (key == "latent") a.latent = value.get<std::size_t>();
        else if (key == "keep_rate") a.keep_rate = value.get<double>();
        else if (key == "epochs") a.epochs = value.get<std::size_t>();
        else if (key == "batch_size") a.batch_size = value.get<std::size_t>();
        else if (key == "learning_rate") a.learning_rate = value.get<double>();
        else if (key == "loss") a.loss = reconstruction_loss_from_string(value.get<std::string>());
        else if (key == "wide_layers") a.wide_layers = value.get<bool>();
        else throw Error("unknown key architecture." + key);
    }
}

void parse_entry(const std::string& key, const json& v, ExperimentConfig& c, const fs::path& base_dir) {
    auto resolve = [&](fs::path p) { return p.is_relative() && !base_dir.empty() ? base_dir / p : p; };
    if (key == "dataset") {
        c.dataset = resolve(v.get<std::string>());
    } else if (key == "class_column") {
        c.class_column = v.is_number_unsigned() ? "#" + std::to_string(v.get<std::size_t>()) : v.get<std::string>();
    } else if (key == "name") {
        c.name = v.get<std::string>();
    } else if (key == "generators") {
        c.generators.clear();
        for (const auto& g : v) c.generators.push_back(generator_from_string(g.get<std::string>()));
    } else if (key == "t") {
        c.t = v.get<std::size_t>();
    } else if (key == "k") {
        c.k = v.get<std::size_t>();
    } else if (key == "trees") {
        c.trees = v.get<std::size_t>();
    } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
    } else if (key == "output_dir") {
        c.output_dir = resolve(v.get<std::string>());
    } else if (key == "missing_marker") {
        c.missing_marker = v.get<std::string>();
    } else if (key == "normalization") {
        const auto s = v.get<std::string>();
        if (s == "full") c.normalization = NormalizationScope::full;
        else if (s == "train") c.normalization = NormalizationScope::train;
        else throw Error("normalization must be \"full\" or \"train\"");
    } else if (key == "bench") {
        for (const auto& [bk, bv] : v.items()) {
            if (bk == "repetitions") c.bench_repetitions = bv.get<std::size_t>();
            else if (bk == "t") c.bench_t = bv.get<std::size_t>();
            else throw Error("unknown key bench." + bk);
        }
    } else if (key == "architecture") {
        parse_architecture(v, c.architecture);
    } else {
        throw Error("unknown key '" + key + "'");
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw Error("config: top level must be an object");

    ExperimentConfig c;
    try {
        for (const auto& [key, v] : j.items()) parse_entry(key, v, c, base_dir);
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    } catch (const Error& e) {
        throw Error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    auto in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string config_json(const ExperimentConfig& c) {
    json j;
    j["dataset"] = c.dataset.string();
    j["class_column"] = c.class_column;
    j["name"] = c.label();
    json gens = json::array();
    for (const auto g : c.generators) gens.push_back(to_string(g));
    j["generators"] = gens;
    j["t"] = c.t;
    j["k"] = c.k;
    j["trees"] = c.trees;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir.string();
    j["missing_marker"] = c.missing_marker;
    j["normalization"] = c.normalization == NormalizationScope::full ? "full" : "train";
    j["bench"] = {{"repetitions", c.bench_repetitions}, {"t", c.bench_t}};
    json a = json::object();
    const auto& o = c.architecture;
    if (o.hidden1) a["hidden1"] = *o.hidden1;
    if (o.hidden2) a["hidden2"] = *o.hidden2;
    if (o.latent) a["latent"] = *o.latent;
    if (o.keep_rate) a["keep_rate"] = *o.keep_rate;
    if (o.epochs) a["epochs"] = *o.epochs;
    if (o.batch_size) a["batch_size"] = *o.batch_size;
    if (o.learning_rate) a["learning_rate"] = *o.learning_rate;
    if (o.loss) a["loss"] = to_string(*o.loss);
    a["wide_layers"] = o.wide_layers;
    j["architecture"] = a;
    return j.dump(2) + "\n";
}

// -- pipeline ------------------------------------------------------------------

PreparedData prepare_data(const ExperimentConfig& config) {
    config.validate();
    PreparedData p;
    const auto table = stage("ingest", [&] {
        auto in = open_in(config.dataset);
        SchemaOptions opts;
        opts.missing_marker = config.missing_marker;
        return impute_missing(ingest_csv(in, parse_column_selector(config.class_column), opts));
    });
    stage("split", [&] {
        p.split = split_25_25_50(table.rows.size(), derive_seed(config.seed, "split"));
        p.schema = config.normalization == NormalizationScope::full ? fit_schema(table)
                                                                    : fit_schema(table, p.split.train);
        p.all = encode(table, p.schema);
        p.train = select_rows(p.all, p.split.train);
        p.seeds = select_rows(p.all, p.split.seed);
        p.eval = select_rows(p.all, p.split.eval);
    });
    return p;
}

ArchitectureConfig architecture_for(const ExperimentConfig& config, const Schema& schema, GeneratorKind kind) {
    auto a = ArchitectureConfig::defaults(schema.encoded_width(), schema.feature_count(), model_kind_for(kind),
                                          uses_mcd_decoder(kind), config.architecture.wide_layers);
    const auto& o = config.architecture;
    if (o.hidden1) a.hidden1 = *o.hidden1;
    if (o.hidden2) a.hidden2 = *o.hidden2;
    if (o.latent) a.latent = *o.latent;
    if (o.keep_rate) a.keep_rate = *o.keep_rate;
    if (o.epochs) a.training.epochs = *o.epochs;
    if (o.batch_size) a.training.batch_size = *o.batch_size;
    if (o.learning_rate) a.training.learning_rate = *o.learning_rate;
    if (o.loss) a.training.loss = *o.loss;
    a.training.seed = derive_seed(config.seed, std::string("train/") + to_string(kind));
    a.validate();
    return a;
}

namespace {
TrainedModel train_for(const ExperimentConfig& config, const PreparedData& d, GeneratorKind kind) {
    return stage(std::string("train[") + to_string(kind) + "]", [&] {
        return train(d.train.matrix, architecture_for(config, d.schema, kind), d.schema.fingerprint());
    });
}
} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;
    result.data = prepare_data(config);
    const auto& d = result.data;
    const unsigned threads = thread_count_from_env();
    CompareOptions compare;
    compare.k = config.k;
    compare.forest.trees = config.trees;
    compare.forest.threads = threads;
    compare.rng_seed = derive_seed(config.seed, "evaluate");

    for (const auto kind : config.generators) {
        const std::string tag = std::string("[") + to_string(kind) + "]";
        GeneratorRun run;
        run.kind = kind;
        run.model = train_for(config, d, kind);
        run.generated = stage("generate" + tag, [&] {
            const GenerationRequest req{run.model, d.seeds.matrix, config.t,
                                        derive_seed(config.seed, std::string("generate/") + to_string(kind))};
            return generate(kind, req, GenerationOptions{.zero_epsilon = false, .threads = threads});
        });
        run.generated_encoded =
            stage("decode" + tag, [&] { return encode(materialize(run.generated, d.schema), d.schema); });
        run.report = stage("evaluate" + tag, [&] { return compare_datasets(d.eval, run.generated_encoded, compare); });
        result.runs.push_back(std::move(run));
    }
    return result;
}

// -- commands ------------------------------------------------------------------

void cmd_ingest(const fs::path& csv, const std::string& class_column, const fs::path& out_dir,
                const std::string& missing_marker) {
    const auto encoded = stage("ingest", [&] {
        auto in = open_in(csv);
        SchemaOptions opts;
        opts.missing_marker = missing_marker;
        return fit_encode(impute_missing(ingest_csv(in, parse_column_selector(class_column), opts)));
    });
    stage("write", [&] {
        fs::create_directories(out_dir);
        save_encoded(out_dir / "encoded.csv", out_dir / "schema.json", encoded);
    });
}

namespace {

std::string optional_number(std::optional<double> v) { return v ? csv::format_double(*v) : std::string(); }

void write_run(const fs::path& dir, const ExperimentConfig& config, const PreparedData& data, const GeneratorRun& run) {
    fs::create_directories(dir);
    save_model(dir / "model.txt", run.model);
    {
        auto out = open_out(dir / "generated.csv");
        write_table(out, materialize(run.generated, data.schema), config.missing_marker);
    }
    {
        auto out = open_out(dir / "provenance.csv");
        write_provenance(out, run.generated);
    }
    open_out(dir / "report.json") << report_json(run.report, config.label(), to_string(run.kind));
    auto out = open_out(dir / "report.txt");
    write_report_text(out, run.report, config.label() + " / " + to_string(run.kind));
    for (const auto& w : run.generated.warnings) out << "  warning: " << w << '\n';
}

} // namespace

ExperimentResult cmd_run(const ExperimentConfig& config) {
    auto result = run_experiment(config);
    const fs::path dir = config.output_dir / config.label();
    stage("write", [&] {
        fs::create_directories(dir);
        open_out(dir / "config.json") << config_json(config);
        save_schema(dir / "schema.json", result.data.schema);
        {
            auto out = open_out(dir / "split.csv");
            out << "row,part\n";
            for (const auto r : result.data.split.train) out << r << ",train\n";
            for (const auto r : result.data.split.seed) out << r << ",seed\n";
            for (const auto r : result.data.split.eval) out << r << ",eval\n";
        }
        auto summary = open_out(dir / "report.csv");
        summary << "dataset,generator,delta_mean,delta_std,ari,delta_acc\n";
        for (const auto& run : result.runs) {
            write_run(dir / to_string(run.kind), config, result.data, run);
            const auto& r = run.report;
            summary << config.label() << ',' << to_string(run.kind) << ','
                    << optional_number(r.stats.summary_delta_mean()) << ','
                    << optional_number(r.stats.summary_delta_std()) << ',' << csv::format_double(r.cluster.ari) << ','
                    << csv::format_double(r.predictive.delta_acc) << '\n';
        }
    });
    return result;
}

std::vector<TimingReport> cmd_bench(const std::vector<ExperimentConfig>& configs, const fs::path& out_dir) {
    std::vector<TimingReport> reports;
    for (const auto& config : configs) {
        const auto data = prepare_data(config);
        std::vector<TrainedModel> models;
        models.reserve(config.generators.size());
        for (const auto kind : config.generators) models.push_back(train_for(config, data, kind));
        std::vector<TimedGenerator> timed;
        for (std::size_t g = 0; g < models.size(); ++g) timed.push_back({&models[g], config.generators[g]});
        const auto timings = stage("bench", [&] {
            return time_generators(timed, data.seeds.matrix, config.bench_t, config.bench_repetitions,
                                   derive_seed(config.seed, "bench"), config.label());
        });
        reports.insert(reports.end(), timings.begin(), timings.end());
    }
    stage("write", [&] {
        fs::create_directories(out_dir);
        {
            auto out = open_out(out_dir / "timing.csv");
            write_timing_table(out, reports);
        }
        auto out = open_out(out_dir / "timing_runs.csv");
        write_timing_runs(out, reports);
    });
    return reports;
}

namespace {

// Encoded CSVs are recognised by their header; anything else is read as a raw table.
EncodedDataset load_any(const fs::path& path, const Schema& schema) {
    std::string header;
    {
        auto in = open_in(path);
        std::getline(in, header);
        if (!header.empty() && header.back() == '\r') header.pop_back();
    }
    std::ostringstream expected;
    csv::write_row(expected, encoded_column_names(schema));
    std::string want = expected.str();
    while (!want.empty() && (want.back() == '\n' || want.back() == '\r')) want.pop_back();

    auto in = open_in(path);
    if (header == want) return read_encoded(in, schema);
    return encode(impute_missing(read_table(in, schema)), schema);
}

} // namespace

ComparisonReport cmd_evaluate(const fs::path& d1, const fs::path& d2, const fs::path& schema_path, std::uint64_t seed,
                              std::size_t k, std::size_t trees) {
    const auto schema = stage("schema", [&] {
        auto s = load_schema(schema_path);
        if (!s.fitted()) throw Error("schema has no fitted numeric ranges");
        return s;
    });
    const auto a = stage("load d1", [&] { return load_any(d1, schema); });
    const auto b = stage("load d2", [&] { return load_any(d2, schema); });
    CompareOptions opts;
    opts.k = k;
    opts.forest.trees = trees;
    opts.forest.threads = thread_count_from_env();
    opts.rng_seed = derive_seed(seed, "evaluate");
    return stage("evaluate", [&] { return compare_datasets(a, b, opts); });
}

} // namespace synthgen
