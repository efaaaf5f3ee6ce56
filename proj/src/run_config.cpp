#include "deepif/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "deepif/errors.hpp"
#include "deepif/rng.hpp"

namespace deepif {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::kDif: return "dif";
        case Algorithm::kIForest: return "iforest";
        case Algorithm::kEif: return "eif";
    }
    return "dif";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "dif") return Algorithm::kDif;
    if (s == "iforest") return Algorithm::kIForest;
    if (s == "eif") return Algorithm::kEif;
    throw ConfigError("unknown algorithm '" + s + "' (expected dif|iforest|eif)");
}

std::string to_string(ScoringMode m) {
    return m == ScoringMode::kDeas ? "deas" : "path-only";
}

ScoringMode scoring_mode_from_string(const std::string& s) {
    if (s == "deas") return ScoringMode::kDeas;
    if (s == "path-only") return ScoringMode::kPathOnly;
    throw ConfigError("unknown scoring mode '" + s + "' (expected deas|path-only)");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::kTanh: return "tanh";
        case Activation::kRelu: return "relu";
        case Activation::kLeakyRelu: return "leaky-relu";
    }
    return "tanh";
}

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::kTanh;
    if (s == "relu") return Activation::kRelu;
    if (s == "leaky-relu") return Activation::kLeakyRelu;
    throw ConfigError("unknown activation '" + s + "' (expected tanh|relu|leaky-relu)");
}

ForestConfig RunConfig::forest_config() const {
    ForestConfig fc;
    fc.r = r;
    fc.t = t;
    fc.subsample = subsample;
    fc.depth_limit = depth_limit;
    fc.hidden_dims = hidden_dims;
    fc.output_dim = output_dim;
    fc.activation = activation;
    fc.init = init;
    fc.batch_size = batch_size;
    fc.seed = seed;
    return fc;
}

BaselineConfig RunConfig::baseline_config() const {
    BaselineConfig bc;
    bc.trees = baseline_trees();
    bc.subsample = subsample;
    bc.depth_limit = depth_limit;
    bc.leaf_adjustment = true;
    bc.seed = seed;
    return bc;
}

namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
    std::size_t out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("config: cannot parse '" + value + "' for key '" + key + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("config: cannot parse '" + value + "' for key '" + key + "'");
    }
    return out;
}

std::optional<std::vector<std::size_t>> parse_hidden(const std::string& value) {
    if (value == "auto") return std::nullopt;
    std::vector<std::size_t> dims;
    if (value == "none" || value.empty()) return dims;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
        dims.push_back(parse_size("hidden", part));
    }
    return dims;
}

std::string hidden_to_string(const std::optional<std::vector<std::size_t>>& hidden) {
    if (!hidden) return "auto";
    if (hidden->empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < hidden->size(); ++i) {
        if (i) out += ',';
        out += std::to_string((*hidden)[i]);
    }
    return out;
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "algo") {
        config.algorithm = algorithm_from_string(value);
    } else if (key == "r") {
        config.r = parse_size(key, value);
    } else if (key == "t") {
        config.t = parse_size(key, value);
    } else if (key == "n") {
        config.subsample = parse_size(key, value);
    } else if (key == "depth") {
        config.depth_limit = parse_size(key, value);
    } else if (key == "hidden") {
        config.hidden_dims = parse_hidden(value);
    } else if (key == "out_dim") {
        config.output_dim = parse_size(key, value);
    } else if (key == "activation") {
        config.activation.kind = activation_from_string(value);
    } else if (key == "alpha") {
        config.activation.alpha = parse_double(key, value);
    } else if (key == "init") {
        if (value == "normal") {
            config.init.kind = Distribution::Kind::kStandardNormal;
        } else if (value == "uniform") {
            config.init.kind = Distribution::Kind::kUniform;
        } else {
            throw ConfigError("config: unknown init '" + value + "' (expected normal|uniform)");
        }
    } else if (key == "init_a") {
        config.init.half_width = parse_double(key, value);
    } else if (key == "batch") {
        config.batch_size = parse_size(key, value);
    } else if (key == "seed") {
        std::uint64_t out = 0;
        const char* first = value.data();
        const char* last = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr != last) {
            throw ConfigError("config: cannot parse seed '" + value + "'");
        }
        config.seed = out;
    } else if (key == "mode") {
        config.mode = scoring_mode_from_string(value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        // Trim.
        const std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const std::size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value'");
        }
        auto strip = [](std::string s) {
            const std::size_t sb = s.find_first_not_of(" \t");
            if (sb == std::string::npos) return std::string();
            const std::size_t se = s.find_last_not_of(" \t");
            return s.substr(sb, se - sb + 1);
        };
        apply_config_entry(config, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return config;
}

std::string canonical_config(const RunConfig& config) {
    std::ostringstream out;
    out << "activation=" << to_string(config.activation.kind) << '\n'
        << "algo=" << to_string(config.algorithm) << '\n'
        << "alpha=" << config.activation.alpha << '\n'
        << "batch=" << config.batch_size << '\n'
        << "depth=" << config.depth_limit << '\n'
        << "hidden=" << hidden_to_string(config.hidden_dims) << '\n'
        << "init=" << (config.init.kind == Distribution::Kind::kStandardNormal ? "normal" : "uniform")
        << '\n'
        << "init_a=" << config.init.half_width << '\n'
        << "mode=" << to_string(config.mode) << '\n'
        << "n=" << config.subsample << '\n'
        << "out_dim=" << config.output_dim << '\n'
        << "r=" << config.r << '\n'
        << "seed=" << config.seed << '\n'
        << "t=" << config.t << '\n';
    return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    return fnv1a64(canonical_config(config));
}

std::string config_hash_hex(const RunConfig& config) {
    const std::uint64_t h = config_hash(config);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace deepif
