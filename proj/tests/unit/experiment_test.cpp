#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthgen/error.hpp"
#include "synthgen/experiment.hpp"

using namespace synthgen;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("synthgen_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

/// 48 rows, one numeric, one categorical, a class and a missing cell.
std::string small_csv() {
    std::ostringstream s;
    s << "x,color,label\n";
    for (int i = 0; i < 48; ++i)
        s << (i == 5 ? std::string("?") : std::to_string(i % 2 ? 10 + i % 7 : 30 + i % 5)) << ','
          << (i % 3 == 0 ? "red" : "blue") << ',' << (i % 2 ? "yes" : "no") << '\n';
    return s.str();
}

#ifdef SYNTHGEN_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(SYNTHGEN_CLI_PATH) + ' ' + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

} // namespace

TEST(Config, ParseDefaultsAndRelativePaths) {
    const auto c = parse_config(R"({"dataset": "d/x.csv", "class_column": "label"})", "/base");
    EXPECT_EQ(c.dataset, fs::path("/base/d/x.csv"));
    EXPECT_EQ(c.label(), "x");
    EXPECT_EQ(c.generators.size(), 3u);
    EXPECT_EQ(c.t, 2u);
    EXPECT_EQ(c.trees, 100u);
    EXPECT_EQ(c.bench_t, 1000u);
    EXPECT_FALSE(c.architecture.wide_layers);
}

TEST(Config, FullRoundTrip) {
    const auto c = parse_config(R"({"dataset": "/d.csv", "class_column": "#3", "name": "N", "generators": ["MCD-AE"],
        "t": 5, "k": 3, "trees": 7, "seed": 12, "output_dir": "/o", "missing_marker": "NA",
        "normalization": "train", "bench": {"repetitions": 4, "t": 9},
        "architecture": {"hidden1": 16, "hidden2": 8, "latent": 2, "keep_rate": 0.5, "epochs": 3,
                         "batch_size": 4, "learning_rate": 0.01, "loss": "bce", "wide_layers": false}})");
    EXPECT_EQ(c.generators, std::vector<GeneratorKind>{GeneratorKind::MCD_AE});
    EXPECT_EQ(c.normalization, NormalizationScope::train);
    EXPECT_EQ(*c.architecture.loss, ReconstructionLoss::bce);
    EXPECT_EQ(c.bench_repetitions, 4u);
    const auto again = parse_config(config_json(c));
    EXPECT_EQ(config_json(again), config_json(c));
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config(R"({"dataset": "a.csv", "class_column": "c", "colour": 1})"), Error);
    EXPECT_THROW(parse_config(R"({"class_column": "c"})"), Error);
    EXPECT_THROW(parse_config(R"({"dataset": "a.csv", "class_column": "c", "generators": ["GAN"]})"), Error);
    EXPECT_THROW(parse_config(R"({"dataset": "a.csv", "class_column": "c", "t": 0})"), Error);
    EXPECT_THROW(parse_config(R"({"dataset": "a.csv", "class_column": "c", "architecture": {"depth": 3}})"), Error);
    EXPECT_THROW(parse_config("{not json"), Error);
}

TEST(Config, ColumnSelector) {
    EXPECT_EQ(parse_column_selector("#2"), ColumnSelector(std::size_t{2}));
    EXPECT_EQ(parse_column_selector("type"), ColumnSelector(std::string("type")));
}

TEST(Config, ShippedConfigsLoad) {
    for (const char* name : {"pima.json", "breast_wisc.json"}) {
        const auto c = load_config(fs::path(SYNTHGEN_DATA_DIR) / ".." / "configs" / name);
        EXPECT_TRUE(fs::exists(c.dataset)) << c.dataset;
        EXPECT_EQ(c.seed, 2021u);
    }
}

TEST(Experiment, ArchitectureOverrides) {
    auto c = parse_config(R"({"dataset": "a.csv", "class_column": "c", "architecture": {"latent": 2, "epochs": 7}})");
    Schema s;
    for (const char* n : {"a", "b", "c"}) s.attributes.push_back({n, AttributeKind::numeric, {}, NumericRange{0, 1}});
    s.attributes[2] = {"c", AttributeKind::categorical, {"p", "q"}, {}};
    s.class_index = 2;
    const auto a = architecture_for(c, s, GeneratorKind::MCD_VAE);
    EXPECT_EQ(a.latent, 2u);
    EXPECT_EQ(a.training.epochs, 7u);
    EXPECT_EQ(a.kind, ModelKind::VAE);
    EXPECT_TRUE(a.mcd_decoder);
    EXPECT_EQ(a.hidden1, 8 * s.encoded_width());
    EXPECT_NE(architecture_for(c, s, GeneratorKind::VAE).training.seed, a.training.seed);
}

TEST(Experiment, RunWritesArtifactsAndIsReproducible) {
    const auto dir = scratch_dir("run");
    write_file(dir / "small.csv", small_csv());
    auto c = parse_config(R"({"dataset": "small.csv", "class_column": "label", "t": 2, "trees": 10, "seed": 3,
        "output_dir": "out", "architecture": {"epochs": 5}})", dir);
    const auto r = cmd_run(c);
    ASSERT_EQ(r.runs.size(), 3u);
    EXPECT_EQ(r.data.train.size(), 12u);
    EXPECT_EQ(r.data.seeds.size(), 12u);
    EXPECT_EQ(r.data.eval.size(), 24u);
    const auto out = dir / "out" / "small";
    for (const char* f : {"config.json", "schema.json", "split.csv", "report.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    for (const char* g : {"VAE", "MCD-VAE", "MCD-AE"})
        for (const char* f : {"model.txt", "generated.csv", "provenance.csv", "report.json", "report.txt"})
            EXPECT_TRUE(fs::exists(out / g / f)) << g << '/' << f;
    EXPECT_EQ(r.runs[0].generated.rows.rows(), 24u);

    const auto first = slurp(out / "report.csv");
    const auto model = slurp(out / "MCD-AE" / "model.txt");
    cmd_run(c);
    EXPECT_EQ(slurp(out / "report.csv"), first);
    EXPECT_EQ(slurp(out / "MCD-AE" / "model.txt"), model);
    fs::remove_all(dir);
}

TEST(Experiment, MissingClassColumnNamesTheStage) {
    const auto dir = scratch_dir("noclass");
    write_file(dir / "small.csv", small_csv());
    const auto c = parse_config(R"({"dataset": "small.csv", "class_column": "nope"})", dir);
    try {
        run_experiment(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("ingest"), std::string::npos) << e.what();
    }
    fs::remove_all(dir);
}

TEST(Experiment, IngestIsIdempotentAndEvaluateReadsBothForms) {
    const auto dir = scratch_dir("ingest");
    write_file(dir / "small.csv", small_csv());
    cmd_ingest(dir / "small.csv", "label", dir / "a");
    cmd_ingest(dir / "small.csv", "#2", dir / "b");
    EXPECT_EQ(slurp(dir / "a" / "encoded.csv"), slurp(dir / "b" / "encoded.csv"));
    EXPECT_EQ(slurp(dir / "a" / "schema.json"), slurp(dir / "b" / "schema.json"));
    const auto r = cmd_evaluate(dir / "small.csv", dir / "a" / "encoded.csv", dir / "a" / "schema.json", 1, 0, 10);
    EXPECT_EQ(r.cluster.ari, 1.0);
    EXPECT_EQ(r.predictive.delta_acc, 0.0);
    EXPECT_EQ(*r.stats.summary_delta_mean(), 0.0);
    fs::remove_all(dir);
}

TEST(Experiment, BenchWritesTables) {
    const auto dir = scratch_dir("bench");
    write_file(dir / "small.csv", small_csv());
    const auto c = parse_config(R"({"dataset": "small.csv", "class_column": "label", "generators": ["VAE", "MCD-AE"],
        "bench": {"repetitions": 2, "t": 3}, "architecture": {"epochs": 1}})", dir);
    const auto reports = cmd_bench({c}, dir / "bench");
    ASSERT_EQ(reports.size(), 2u);
    EXPECT_EQ(reports[0].per_run_seconds.size(), 2u);
    const auto table = slurp(dir / "bench" / "timing.csv");
    EXPECT_EQ(table.substr(0, table.find('\n')), "Dataset,VAE [s.d.],MCD-VAE [s.d.],MCD-AE [s.d.]");
    EXPECT_TRUE(fs::exists(dir / "bench" / "timing_runs.csv"));
    fs::remove_all(dir);
}

#ifdef SYNTHGEN_CLI_PATH
TEST(Cli, ExitCodes) {
    const auto dir = scratch_dir("cli");
    write_file(dir / "small.csv", small_csv());
    const auto csv = (dir / "small.csv").string();
    EXPECT_EQ(run_cli("ingest " + csv + " --class label --out " + (dir / "enc").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "enc" / "schema.json"));
    EXPECT_NE(run_cli("ingest " + csv + " --class missing --out " + (dir / "x").string()), 0);
    EXPECT_NE(run_cli("frobnicate"), 0);
    EXPECT_EQ(run_cli("evaluate " + csv + ' ' + (dir / "enc" / "encoded.csv").string() + " --schema " +
                      (dir / "enc" / "schema.json").string() + " --trees 5 --out " + (dir / "r.json").string()),
              0);
    EXPECT_NE(slurp(dir / "r.json").find("\"ari\""), std::string::npos);
    fs::remove_all(dir);
}
#endif
