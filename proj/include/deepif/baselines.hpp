#pragma once

#include <cstdint>
#include <vector>

#include "deepif/data.hpp"
#include "deepif/forest.hpp"
#include "deepif/representation.hpp"
#include "deepif/scoring.hpp"

namespace deepif {

struct BaselineConfig {
    std::size_t trees = 300;
    std::size_t subsample = 256;
    std::size_t depth_limit = 0;  // 0 => ceil(log2(min(n, N)))
    bool leaf_adjustment = true;  // classic c(size) added at truncated leaves
    std::uint64_t seed = 42;
};

/// Classic isolation forest: axis-parallel random splits on the raw
/// (standardized) features, scored by 2^(-mean_path / c(n)). Reuses the
/// forest module's tree machinery and per-tree streams, which is what makes
/// the identity-network reduction exact.
class IsolationForestModel {
public:
    static IsolationForestModel fit(const DataMatrix& data, const BaselineConfig& config);

    std::vector<double> score(const DataMatrix& data) const;

    const std::vector<IsolationTree>& trees() const { return trees_; }
    const ColumnStats& stats() const { return stats_; }
    const BaselineConfig& config() const { return config_; }
    std::size_t effective_subsample() const { return effective_subsample_; }
    std::size_t depth_limit_used() const { return depth_limit_used_; }
    std::size_t input_dim() const { return stats_.cols(); }

private:
    friend class ModelReader;
    IsolationForestModel() = default;

    std::vector<IsolationTree> trees_;
    ColumnStats stats_;
    BaselineConfig config_;
    std::size_t effective_subsample_ = 0;
    std::size_t depth_limit_used_ = 0;
};

/// One hyper-plane split: slope entries are i.i.d. standard normal, the
/// intercept point is uniform within the node pool's per-dimension ranges,
/// and an object branches left iff (o - p) . k <= 0.
struct EifNode {
    std::uint64_t heap_id = 1;
    std::vector<double> normal_vector;    // empty marks a leaf
    std::vector<double> intercept_point;
    std::uint32_t size = 0;
    std::uint32_t depth = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const { return normal_vector.empty(); }
};

class EifTree {
public:
    EifTree() = default;

    const std::vector<EifNode>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& subsample_rows() const { return subsample_rows_; }
    std::size_t dims() const { return dims_; }
    std::size_t depth_limit() const { return depth_limit_; }

    TraversalRecord traverse_record(std::span<const double> x, std::uint32_t tree_index = 0) const;

private:
    friend EifTree build_eif_tree(const Matrix&, std::size_t, std::size_t, RngStream);
    friend class ModelReader;

    std::vector<EifNode> nodes_;
    std::vector<std::uint32_t> subsample_rows_;
    std::size_t dims_ = 0;
    std::size_t depth_limit_ = 0;
};

EifTree build_eif_tree(const Matrix& data, std::size_t n, std::size_t depth_limit,
                       RngStream rng);

/// Extended isolation forest at full extension level; same subsampling,
/// depth limit and scoring conventions as the classic baseline.
class EifModel {
public:
    static EifModel fit(const DataMatrix& data, const BaselineConfig& config);

    std::vector<double> score(const DataMatrix& data) const;

    const std::vector<EifTree>& trees() const { return trees_; }
    const ColumnStats& stats() const { return stats_; }
    const BaselineConfig& config() const { return config_; }
    std::size_t effective_subsample() const { return effective_subsample_; }
    std::size_t depth_limit_used() const { return depth_limit_used_; }
    std::size_t input_dim() const { return stats_.cols(); }

private:
    friend class ModelReader;
    EifModel() = default;

    std::vector<EifTree> trees_;
    ColumnStats stats_;
    BaselineConfig config_;
    std::size_t effective_subsample_ = 0;
    std::size_t depth_limit_used_ = 0;
};

/// Fit-and-score conveniences (training scores, unsupervised).
std::vector<double> iforest_fit_score(const DataMatrix& data, std::size_t trees,
                                      std::size_t subsample, std::uint64_t seed);
std::vector<double> eif_fit_score(const DataMatrix& data, std::size_t trees,
                                  std::size_t subsample, std::uint64_t seed);

/// Result of replaying the identity-network reduction: a single-linear-layer
/// network with identity weights makes path-only scoring coincide exactly
/// with the no-adjustment classic forest sharing its decision streams.
struct IForestReductionReport {
    std::uint64_t seed = 0;
    std::size_t trees = 0;
    std::size_t subsample = 0;
    double max_abs_score_diff = 0.0;
    std::vector<bool> tree_equal;  // per-tree structural equality
    bool all_trees_equal = false;
    /// max |deas / path_only - mean_deviation| over objects: with the
    /// identity mapping, deviation-enhanced scores differ from the classic
    /// ones exactly by the multiplicative deviation factor.
    double max_deviation_factor_diff = 0.0;

    bool passed() const { return max_abs_score_diff == 0.0 && all_trees_equal; }
};

/// inject_mismatch is a self-test of the verifier: the first DIF tree is
/// grown from a corrupted stream, which the report must flag as a failure.
IForestReductionReport verify_iforest_reduction(const DataMatrix& data, std::uint64_t seed,
                                                std::size_t trees = 300,
                                                std::size_t subsample = 256,
                                                bool inject_mismatch = false);

/// Result of checking the hyper-plane predicate against its one-column
/// projection form: o.k <= p.k iff (o - p).k <= 0, on random triples and on
/// every branching decision of freshly built trees under shared (k, p).
struct EifReductionReport {
    std::uint64_t seed = 0;
    std::size_t triples_checked = 0;
    std::size_t triples_agreeing = 0;
    std::size_t decisions_checked = 0;
    std::size_t decisions_agreeing = 0;

    double predicate_agreement() const {
        const std::size_t total = triples_checked + decisions_checked;
        if (total == 0) return 0.0;
        return static_cast<double>(triples_agreeing + decisions_agreeing) /
               static_cast<double>(total);
    }
    bool passed() const { return predicate_agreement() == 1.0; }
};

EifReductionReport verify_eif_reduction(const DataMatrix& data, std::uint64_t seed,
                                        std::size_t triples = 500, std::size_t trees = 10);

}  // namespace deepif
