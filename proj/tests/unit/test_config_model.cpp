#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "deepif/data.hpp"
#include "deepif/errors.hpp"
#include "deepif/model_io.hpp"
#include "deepif/run_config.hpp"

using namespace deepif;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("run config defaults match the standard settings") {
    const RunConfig config;
    CHECK(config.r == 50);
    CHECK(config.t == 6);
    CHECK(config.subsample == 256);
    CHECK(config.baseline_trees() == 300);
    CHECK(config.batch_size == 64);
    CHECK(config.output_dim == 16);
    CHECK(config.mode == ScoringMode::kDeas);
    CHECK(config.activation.kind == Activation::kTanh);
    CHECK_FALSE(config.hidden_dims.has_value());  // auto width
}

TEST_CASE("config file parsing with comments and overrides") {
    const auto path = temp_file("deepif_test.conf");
    std::ofstream out(path);
    out << "# experiment manifest\n"
        << "algo = dif\n"
        << "r = 10\n"
        << "t = 3\n"
        << "hidden = 32,8\n"
        << "mode = path-only\n"
        << "seed = 99\n";
    out.close();
    RunConfig config = parse_config_file(path.string());
    CHECK(config.r == 10);
    CHECK(config.t == 3);
    REQUIRE(config.hidden_dims.has_value());
    CHECK(*config.hidden_dims == std::vector<std::size_t>{32, 8});
    CHECK(config.mode == ScoringMode::kPathOnly);
    CHECK(config.seed == 99);

    apply_config_entry(config, "r", "20");  // flag override wins
    CHECK(config.r == 20);
    CHECK_THROWS_AS(apply_config_entry(config, "bogus", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(config, "r", "abc"), ConfigError);
}

TEST_CASE("canonical config hashes are stable and sensitive") {
    RunConfig a, b;
    CHECK(canonical_config(a) == canonical_config(b));
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash_hex(a).size() == 16);

    // Canonical text round-trips through the entry parser.
    RunConfig c;
    c.hidden_dims = std::vector<std::size_t>{7};
    c.mode = ScoringMode::kPathOnly;
    c.algorithm = Algorithm::kEif;
    RunConfig parsed;
    std::istringstream in(canonical_config(c));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        apply_config_entry(parsed, line.substr(0, eq), line.substr(eq + 1));
    }
    CHECK(canonical_config(parsed) == canonical_config(c));
}

TEST_CASE("model save/load round trip preserves scores for all algorithms") {
    const DataMatrix train = gen_ring({}, 51);
    const DataMatrix test = gen_ring({}, 52);
    for (Algorithm algo : {Algorithm::kDif, Algorithm::kIForest, Algorithm::kEif}) {
        CAPTURE(to_string(algo));
        RunConfig config;
        config.algorithm = algo;
        config.r = 4;
        config.t = 5;
        config.subsample = 64;
        config.seed = 7;
        const Model model = fit_model(train, config);
        const auto path = temp_file("deepif_model_" + to_string(algo) + ".bin");
        save_model(model, path.string());
        const Model loaded = load_model(path.string());
        CHECK(loaded.tree_count() == model.tree_count());
        CHECK(loaded.input_dim() == 2);
        const auto before = model.score(test, config.mode);
        const auto after = loaded.score(test, config.mode);
        REQUIRE(before.size() == after.size());
        for (std::size_t i = 0; i < before.size(); ++i) REQUIRE(before[i] == after[i]);
    }
}

TEST_CASE("refitting with identical config and data is byte-identical") {
    const DataMatrix train = gen_ring({}, 53);
    RunConfig config;
    config.r = 3;
    config.t = 4;
    config.subsample = 64;
    config.seed = 11;
    const auto path_a = temp_file("deepif_refit_a.bin");
    const auto path_b = temp_file("deepif_refit_b.bin");
    save_model(fit_model(train, config), path_a.string());
    save_model(fit_model(train, config), path_b.string());
    const std::string a = slurp(path_a);
    const std::string b = slurp(path_b);
    REQUIRE_FALSE(a.empty());
    CHECK(a == b);
}

TEST_CASE("model loader rejects corruption") {
    const DataMatrix train = gen_ring({}, 54);
    RunConfig config;
    config.r = 2;
    config.t = 2;
    config.subsample = 32;
    const Model model = fit_model(train, config);
    const auto path = temp_file("deepif_corrupt.bin");
    save_model(model, path.string());

    std::string blob = slurp(path.string());
    blob[0] = 'X';
    const auto bad_path = temp_file("deepif_corrupt_bad.bin");
    std::ofstream(bad_path, std::ios::binary) << blob;
    CHECK_THROWS_AS(load_model(bad_path.string()), ParseError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), IoError);
}

TEST_CASE("fit_model count bookkeeping") {
    const DataMatrix train = gen_ring({}, 55);
    RunConfig config;
    config.r = 2;
    config.t = 3;
    config.subsample = 32;
    CHECK(fit_model(train, config).tree_count() == 6);
    config.algorithm = Algorithm::kIForest;
    CHECK(fit_model(train, config).tree_count() == 6);  // r*t trees for baselines
}
