#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deepif/baselines.hpp"
#include "deepif/data.hpp"
#include "deepif/forest.hpp"
#include "deepif/run_config.hpp"
#include "deepif/scoring.hpp"

namespace deepif {

/// A fitted detector of any of the three algorithms plus the configuration
/// it was fitted with. Exactly one of the three model slots is set.
struct Model {
    RunConfig config;
    std::optional<DeepForest> dif;
    std::optional<IsolationForestModel> iforest;
    std::optional<EifModel> eif;

    Algorithm algorithm() const { return config.algorithm; }
    std::size_t input_dim() const;
    std::size_t tree_count() const;

    /// Final anomaly scores; the mode applies to DIF only (baselines are
    /// depth-scored by construction).
    std::vector<double> score(const DataMatrix& data, ScoringMode mode) const;
    std::vector<ScoreBreakdown> score_breakdown(const DataMatrix& data, ScoringMode mode) const;
};

Model fit_model(const DataMatrix& data, const RunConfig& config);

/// Versioned binary container: magic, format version, and a section table
/// (config text, standardization stats, network, tree records). Writing is
/// deterministic: refitting with identical config and data reproduces the
/// file byte for byte.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace deepif
