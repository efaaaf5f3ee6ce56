#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deepif/baselines.hpp"
#include "deepif/forest.hpp"
#include "deepif/scoring.hpp"

namespace deepif {

enum class Algorithm { kDif, kIForest, kEif };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);
std::string to_string(ScoringMode m);
ScoringMode scoring_mode_from_string(const std::string& s);
std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Experiment configuration shared by every subcommand. Baselines use
/// r * t trees so the ensemble sizes stay comparable.
struct RunConfig {
    Algorithm algorithm = Algorithm::kDif;
    std::size_t r = 50;
    std::size_t t = 6;
    std::size_t subsample = 256;   // n
    std::size_t depth_limit = 0;   // 0 => ceil(log2(min(n, N)))
    std::optional<std::vector<std::size_t>> hidden_dims;  // nullopt => auto width
    std::size_t output_dim = 16;
    ActivationSpec activation;     // tanh by default
    Distribution init = Distribution::standard_normal();
    std::size_t batch_size = 64;
    std::uint64_t seed = 42;
    ScoringMode mode = ScoringMode::kDeas;

    std::size_t baseline_trees() const { return r * t; }
    ForestConfig forest_config() const;
    BaselineConfig baseline_config() const;
};

/// Parse a flat key=value config file ('#' starts a comment). Unknown keys
/// raise ConfigError.
RunConfig parse_config_file(const std::string& path);

/// Apply one key=value override (the CLI flag path). Raises ConfigError on
/// unknown keys or unparsable values.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical text form: one sorted key=value line each, newline terminated.
/// Every output artifact embeds the FNV-1a hash of this text.
std::string canonical_config(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

}  // namespace deepif
