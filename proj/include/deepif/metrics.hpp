#pragma once

#include <cstddef>
#include <vector>

#include "deepif/matrix.hpp"
#include "deepif/rng.hpp"

namespace deepif {

struct LabeledScores {
    std::vector<double> scores;
    std::vector<int> labels;  // 0 normal, 1 anomaly
};

/// Probability that a random anomaly outscores a random normal, ties
/// counting one half (Mann-Whitney via average ranks). Requires both
/// classes present.
double auc_roc(const LabeledScores& ls);

/// Average precision of the anomaly class over a descending-score sweep;
/// equal scores collapse into one threshold step.
double auc_pr(const LabeledScores& ls);

struct AiiParams {
    std::size_t anchors = 20;      // |C|
    std::size_t references = 1000; // |N|
};

/// Anomaly Isoability Index: the fraction of true anomalies a whose median,
/// over reference normals n_i, of the mean anchor-distance margin
/// mean_{n_j in C}(d(a, n_j) - d(n_i, n_j)) is positive. An isolated anomaly
/// sits farther from the anchors than a typical normal does. Distances are
/// Euclidean in the given representation space; anchor and reference sets
/// are resampled per anomaly from derived streams (without replacement when
/// the normal pool is large enough).
double aii(const Matrix& representation, const std::vector<int>& labels,
           const RngStream& rng, const AiiParams& params = {});

}  // namespace deepif
