#include "deepif/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepif/errors.hpp"

namespace deepif {

double avg_deviation(const TraversalRecord& rec) {
    if (rec.path_length == 0) return 0.0;
    return rec.deviation_sum / static_cast<double>(rec.path_length);
}

double normalizer(std::size_t n) {
    constexpr double kEulerGamma = 0.57721566490153286;
    if (n <= 2) return 1.0;
    const double m = static_cast<double>(n - 1);
    const double harmonic = std::log(m) + kEulerGamma;
    return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

namespace {

// Indices of records sorted by tree_index, making every aggregate invariant
// to the order records are handed in.
std::vector<std::size_t> canonical_order(const std::vector<TraversalRecord>& records) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].tree_index < records[b].tree_index;
    });
    return order;
}

}  // namespace

double mean_path_length(const std::vector<TraversalRecord>& records, bool leaf_adjustment) {
    if (records.empty()) throw ShapeError("scoring: empty record list");
    if (!leaf_adjustment) {
        std::uint64_t total = 0;
        for (const TraversalRecord& rec : records) total += rec.path_length;
        return static_cast<double>(total) / static_cast<double>(records.size());
    }
    const std::vector<std::size_t> order = canonical_order(records);
    double total = 0.0;
    for (std::size_t idx : order) {
        const TraversalRecord& rec = records[idx];
        total += static_cast<double>(rec.path_length);
        if (rec.leaf_size > 1) total += normalizer(rec.leaf_size);
    }
    return total / static_cast<double>(records.size());
}

double iforest_score(const std::vector<TraversalRecord>& records, std::size_t subsample_size,
                     bool leaf_adjustment) {
    const double mean_path = mean_path_length(records, leaf_adjustment);
    return std::exp2(-mean_path / normalizer(subsample_size));
}

ScoreBreakdown deas_score(const std::vector<TraversalRecord>& records,
                          std::size_t subsample_size) {
    if (records.empty()) throw ShapeError("scoring: empty record list");
    ScoreBreakdown out;
    out.mean_path = mean_path_length(records, false);
    const std::vector<std::size_t> order = canonical_order(records);
    double dev_total = 0.0;
    for (std::size_t idx : order) dev_total += avg_deviation(records[idx]);
    out.mean_deviation = dev_total / static_cast<double>(records.size());
    const double depth_factor = std::exp2(-out.mean_path / normalizer(subsample_size));
    out.final_score = depth_factor * out.mean_deviation;
    return out;
}

namespace {

std::vector<ScoreBreakdown> score_dataset_impl(const DeepForest& forest,
                                               const DataMatrix& data, ScoringMode mode,
                                               bool keep_records, bool parallel) {
    if (data.cols() != forest.input_dim()) {
        throw ShapeError("score_dataset: data has " + std::to_string(data.cols()) +
                         " features, model expects " + std::to_string(forest.input_dim()));
    }
    if (data.rows() == 0) throw ShapeError("score_dataset: empty dataset");

    const Matrix standardized = apply_standardize(data.values, forest.stats());
    const RepresentationSet reps =
        forest.network().forward_ensemble(standardized, forest.config().batch_size);

    const std::vector<IsolationTree>& trees = forest.trees();
    const std::size_t n_trees = trees.size();
    const std::size_t subsample = forest.effective_subsample();
    std::vector<ScoreBreakdown> out(data.rows());

    const std::int64_t n = static_cast<std::int64_t>(data.rows());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<TraversalRecord> records;
        records.reserve(n_trees);
        for (std::size_t k = 0; k < n_trees; ++k) {
            const std::size_t u = trees[k].representation_index();
            records.push_back(trees[k].traverse_record(
                reps.members[u].row(static_cast<std::size_t>(i)),
                static_cast<std::uint32_t>(k)));
        }
        ScoreBreakdown breakdown = deas_score(records, subsample);
        if (mode == ScoringMode::kPathOnly) {
            breakdown.final_score = iforest_score(records, subsample, false);
        }
        if (keep_records) breakdown.per_tree = std::move(records);
        out[static_cast<std::size_t>(i)] = std::move(breakdown);
    }
    return out;
}

}  // namespace

std::vector<ScoreBreakdown> score_dataset(const DeepForest& forest, const DataMatrix& data,
                                          ScoringMode mode, bool keep_records) {
    return score_dataset_impl(forest, data, mode, keep_records, true);
}

std::vector<ScoreBreakdown> serial::score_dataset(const DeepForest& forest,
                                                  const DataMatrix& data, ScoringMode mode,
                                                  bool keep_records) {
    return score_dataset_impl(forest, data, mode, keep_records, false);
}

std::vector<double> score_values(const DeepForest& forest, const DataMatrix& data,
                                 ScoringMode mode) {
    const std::vector<ScoreBreakdown> breakdowns = score_dataset(forest, data, mode);
    std::vector<double> values;
    values.reserve(breakdowns.size());
    for (const ScoreBreakdown& b : breakdowns) values.push_back(b.final_score);
    return values;
}

}  // namespace deepif
