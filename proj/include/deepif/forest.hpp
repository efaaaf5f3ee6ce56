#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deepif/data.hpp"
#include "deepif/matrix.hpp"
#include "deepif/representation.hpp"
#include "deepif/rng.hpp"

namespace deepif {

/// One split record. Heap ids follow the 1-based convention: children of
/// node k are 2k (left, value <= threshold) and 2k+1 (right).
struct TreeNode {
    std::uint64_t heap_id = 1;
    std::int32_t split_dim = -1;  // -1 marks a leaf
    double split_value = 0.0;
    std::uint32_t size = 0;   // subsample objects reaching this node at build time
    std::uint32_t depth = 0;
    std::int32_t left = -1;   // indices into the node vector
    std::int32_t right = -1;

    bool is_leaf() const { return split_dim < 0; }
};

/// Path taken by one object through one tree: number of internal-node
/// decisions, the summed |value - threshold| deviation over them, and the
/// size of the leaf reached (for the classic path-length adjustment).
struct TraversalRecord {
    std::uint32_t path_length = 0;
    double deviation_sum = 0.0;
    std::uint32_t tree_index = 0;
    std::uint32_t leaf_size = 1;
};

/// TraversalRecord plus the visited node ids (root excluded, one per decision).
struct Traversal {
    TraversalRecord record;
    std::vector<std::uint64_t> path;
};

/// Random-partition binary tree over one representation. Immutable after
/// construction; traversal is pure and concurrently callable.
class IsolationTree {
public:
    IsolationTree() = default;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }
    std::size_t representation_index() const { return representation_index_; }
    std::size_t subsample_size() const { return subsample_rows_.size(); }
    std::size_t depth_limit() const { return depth_limit_; }
    std::size_t dims() const { return dims_; }
    /// Training rows forming the root pool (indices into the representation).
    const std::vector<std::uint32_t>& subsample_rows() const { return subsample_rows_; }

    /// Route x to a leaf, accumulating the deviation at each decision.
    /// Equal values route left (x[j] <= threshold).
    TraversalRecord traverse_record(std::span<const double> x, std::uint32_t tree_index = 0) const;

    /// As traverse_record, but also reports the visited node ids.
    Traversal traverse(std::span<const double> x, std::uint32_t tree_index = 0) const;

    bool structurally_equal(const IsolationTree& other) const;

private:
    friend IsolationTree build_tree(const Matrix&, std::size_t, std::size_t, RngStream,
                                    std::size_t);
    friend class ModelReader;

    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> subsample_rows_;
    std::size_t representation_index_ = 0;
    std::size_t depth_limit_ = 0;
    std::size_t dims_ = 0;
};

/// Grow one tree on a representation: the root pool is a uniform random
/// subsample of min(n, N) rows without replacement; each splittable node
/// draws a dimension uniformly among those with max > min in its pool and a
/// threshold uniformly within that range; growth stops at single-object
/// pools or depth J. A split leaving one side empty (possible only through
/// rounding at the range edge) is redrawn up to d times, then the node
/// becomes a leaf.
IsolationTree build_tree(const Matrix& rep, std::size_t n, std::size_t depth_limit,
                         RngStream rng, std::size_t rep_index = 0);

struct ForestConfig {
    std::size_t r = 50;          // representations
    std::size_t t = 6;           // trees per representation
    std::size_t subsample = 256; // n
    std::size_t depth_limit = 0; // 0 => ceil(log2(min(n, N)))
    std::optional<std::vector<std::size_t>> hidden_dims;  // nullopt => default width
    std::size_t output_dim = 16;
    ActivationSpec activation;
    Distribution init = Distribution::standard_normal();
    std::size_t batch_size = 64;
    std::uint64_t seed = 42;
};

/// Stream feeding tree flat_index's construction, shared by every forest
/// builder in the library so equal seeds mean equal partition sequences.
RngStream tree_stream(std::uint64_t master_seed, std::size_t flat_index);

std::size_t default_depth_limit(std::size_t effective_subsample);

/// Network plus r*t isolation trees (t per representation, u-major order)
/// plus the training standardization stats. Immutable after build.
class DeepForest {
public:
    DeepForest(CereNetwork network, std::vector<IsolationTree> trees, ForestConfig config,
               ColumnStats stats, std::size_t effective_subsample,
               std::size_t depth_limit_used)
        : network_(std::move(network)),
          trees_(std::move(trees)),
          config_(std::move(config)),
          stats_(std::move(stats)),
          effective_subsample_(effective_subsample),
          depth_limit_used_(depth_limit_used) {}

    const CereNetwork& network() const { return network_; }
    const std::vector<IsolationTree>& trees() const { return trees_; }
    const ForestConfig& config() const { return config_; }
    const ColumnStats& stats() const { return stats_; }
    std::size_t effective_subsample() const { return effective_subsample_; }
    std::size_t depth_limit_used() const { return depth_limit_used_; }
    std::size_t input_dim() const { return network_.input_dim(); }

private:
    CereNetwork network_;
    std::vector<IsolationTree> trees_;
    ForestConfig config_;
    ColumnStats stats_;
    std::size_t effective_subsample_ = 0;
    std::size_t depth_limit_used_ = 0;
};

/// Standardize, build the network, project, and grow t trees per
/// representation. Tree construction is parallel over (representation, tree)
/// pairs; per-tree derived streams make the result identical to the serial
/// builder.
DeepForest build_forest(const DataMatrix& data, const ForestConfig& config);

/// As build_forest but with a caller-supplied network (reduction harnesses).
DeepForest build_forest_with_network(const DataMatrix& data, const ForestConfig& config,
                                     CereNetwork network);

namespace serial {

/// Sequential builder kept as the reference for the parallel one.
DeepForest build_forest(const DataMatrix& data, const ForestConfig& config);

}  // namespace serial

}  // namespace deepif
