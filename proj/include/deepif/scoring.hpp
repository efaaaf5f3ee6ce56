#pragma once

#include <cstdint>
#include <vector>

#include "deepif/data.hpp"
#include "deepif/forest.hpp"

namespace deepif {

enum class ScoringMode { kDeas, kPathOnly };

/// Per-object score decomposition over the T traversal records.
struct ScoreBreakdown {
    std::vector<TraversalRecord> per_tree;  // filled only on request
    double mean_path = 0.0;
    double mean_deviation = 0.0;  // mean over trees of the averaged deviation
    double final_score = 0.0;
};

/// Averaged deviation degree of one traversal: deviation_sum / path_length,
/// 0 for a zero-length path.
double avg_deviation(const TraversalRecord& rec);

/// Expected unsuccessful-search path length c(n) in a binary search tree:
/// 2*H(n-1) - 2*(n-1)/n for n > 2, c(2) = 1, and c(1) treated as 1 so it is
/// safe as a divisor.
double normalizer(std::size_t n);

/// Mean path length over the records, optionally adding the classic c(size)
/// adjustment at non-singleton leaves. Accumulation runs in ascending
/// tree_index order so the result is invariant to record permutation.
double mean_path_length(const std::vector<TraversalRecord>& records, bool leaf_adjustment);

/// Depth-based score 2^(-mean_path / c(n)); monotone decreasing in the mean
/// path length, in (0, 1].
double iforest_score(const std::vector<TraversalRecord>& records, std::size_t subsample_size,
                     bool leaf_adjustment = false);

/// Deviation-enhanced score: 2^(-mean_path / c(n)) times the mean averaged
/// deviation. Exactly factors as iforest_score * mean_deviation.
ScoreBreakdown deas_score(const std::vector<TraversalRecord>& records,
                          std::size_t subsample_size);

/// Standardize with the forest's training stats, project through its
/// network, traverse all T trees, and aggregate per mode. Parallel over
/// objects; results are independent of the schedule.
std::vector<ScoreBreakdown> score_dataset(const DeepForest& forest, const DataMatrix& data,
                                          ScoringMode mode, bool keep_records = false);

/// Convenience: final scores only.
std::vector<double> score_values(const DeepForest& forest, const DataMatrix& data,
                                 ScoringMode mode);

namespace serial {

/// Single-threaded reference for score_dataset.
std::vector<ScoreBreakdown> score_dataset(const DeepForest& forest, const DataMatrix& data,
                                          ScoringMode mode, bool keep_records = false);

}  // namespace serial

}  // namespace deepif
