#include "deepif/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "deepif/errors.hpp"

namespace deepif {

TraversalRecord IsolationTree::traverse_record(std::span<const double> x,
                                               std::uint32_t tree_index) const {
    if (x.size() != dims_) {
        throw ShapeError("traverse: vector length " + std::to_string(x.size()) +
                         " differs from tree dimensionality " + std::to_string(dims_));
    }
    TraversalRecord rec;
    rec.tree_index = tree_index;
    std::size_t idx = 0;
    while (!nodes_[idx].is_leaf()) {
        const TreeNode& node = nodes_[idx];
        const double v = x[static_cast<std::size_t>(node.split_dim)];
        ++rec.path_length;
        rec.deviation_sum += std::abs(v - node.split_value);
        idx = static_cast<std::size_t>(v <= node.split_value ? node.left : node.right);
    }
    rec.leaf_size = nodes_[idx].size;
    return rec;
}

Traversal IsolationTree::traverse(std::span<const double> x, std::uint32_t tree_index) const {
    if (x.size() != dims_) {
        throw ShapeError("traverse: vector length " + std::to_string(x.size()) +
                         " differs from tree dimensionality " + std::to_string(dims_));
    }
    Traversal t;
    t.record.tree_index = tree_index;
    std::size_t idx = 0;
    while (!nodes_[idx].is_leaf()) {
        const TreeNode& node = nodes_[idx];
        const double v = x[static_cast<std::size_t>(node.split_dim)];
        ++t.record.path_length;
        t.record.deviation_sum += std::abs(v - node.split_value);
        idx = static_cast<std::size_t>(v <= node.split_value ? node.left : node.right);
        t.path.push_back(nodes_[idx].heap_id);
    }
    t.record.leaf_size = nodes_[idx].size;
    return t;
}

bool IsolationTree::structurally_equal(const IsolationTree& other) const {
    if (nodes_.size() != other.nodes_.size() ||
        subsample_rows_ != other.subsample_rows_ || dims_ != other.dims_) {
        return false;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& a = nodes_[i];
        const TreeNode& b = other.nodes_[i];
        if (a.heap_id != b.heap_id || a.split_dim != b.split_dim ||
            a.split_value != b.split_value || a.size != b.size || a.depth != b.depth ||
            a.left != b.left || a.right != b.right) {
            return false;
        }
    }
    return true;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const Matrix& rep, std::size_t depth_limit, RngStream& rng)
        : rep_(rep), depth_limit_(depth_limit), rng_(rng) {}

    std::int32_t grow(std::vector<std::uint32_t>& pool, std::uint64_t heap_id,
                      std::uint32_t depth, std::vector<TreeNode>& nodes) {
        const std::int32_t index = static_cast<std::int32_t>(nodes.size());
        TreeNode node;
        node.heap_id = heap_id;
        node.size = static_cast<std::uint32_t>(pool.size());
        node.depth = depth;
        nodes.push_back(node);

        if (pool.size() <= 1 || depth >= depth_limit_) return index;

        const std::size_t d = rep_.cols();
        std::vector<double> mins(d, std::numeric_limits<double>::infinity());
        std::vector<double> maxs(d, -std::numeric_limits<double>::infinity());
        for (std::uint32_t row : pool) {
            const double* r = rep_.data() + static_cast<std::size_t>(row) * d;
            for (std::size_t j = 0; j < d; ++j) {
                mins[j] = std::min(mins[j], r[j]);
                maxs[j] = std::max(maxs[j], r[j]);
            }
        }
        std::vector<std::uint32_t> splittable;
        for (std::size_t j = 0; j < d; ++j) {
            if (maxs[j] > mins[j]) splittable.push_back(static_cast<std::uint32_t>(j));
        }
        if (splittable.empty()) return index;  // fully degenerate pool

        for (std::size_t attempt = 0; attempt < d; ++attempt) {
            const std::uint32_t dim = splittable[rng_.below(splittable.size())];
            const double threshold = rng_.uniform(mins[dim], maxs[dim]);
            std::vector<std::uint32_t> left_pool, right_pool;
            for (std::uint32_t row : pool) {
                if (rep_(row, dim) <= threshold) {
                    left_pool.push_back(row);
                } else {
                    right_pool.push_back(row);
                }
            }
            if (left_pool.empty() || right_pool.empty()) continue;

            pool.clear();
            pool.shrink_to_fit();
            const std::int32_t left = grow(left_pool, 2 * heap_id, depth + 1, nodes);
            const std::int32_t right = grow(right_pool, 2 * heap_id + 1, depth + 1, nodes);
            nodes[static_cast<std::size_t>(index)].split_dim = static_cast<std::int32_t>(dim);
            nodes[static_cast<std::size_t>(index)].split_value = threshold;
            nodes[static_cast<std::size_t>(index)].left = left;
            nodes[static_cast<std::size_t>(index)].right = right;
            return index;
        }
        return index;  // could not realize a non-degenerate split
    }

private:
    const Matrix& rep_;
    std::size_t depth_limit_;
    RngStream& rng_;
};

}  // namespace

IsolationTree build_tree(const Matrix& rep, std::size_t n, std::size_t depth_limit,
                         RngStream rng, std::size_t rep_index) {
    if (rep.rows() == 0) throw ShapeError("build_tree: empty representation");
    if (n == 0 || depth_limit == 0) {
        throw ConfigError("build_tree: subsample size and depth limit must be >= 1");
    }

    const std::size_t total = rep.rows();
    const std::size_t take = std::min(n, total);

    // Partial Fisher-Yates: the first `take` entries are a uniform sample
    // without replacement.
    std::vector<std::uint32_t> indices(total);
    for (std::size_t i = 0; i < total; ++i) indices[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(total - i);
        std::swap(indices[i], indices[j]);
    }
    indices.resize(take);

    IsolationTree tree;
    tree.subsample_rows_ = indices;
    tree.representation_index_ = rep_index;
    tree.depth_limit_ = depth_limit;
    tree.dims_ = rep.cols();

    std::vector<std::uint32_t> pool = indices;
    TreeBuilder builder(rep, depth_limit, rng);
    builder.grow(pool, 1, 0, tree.nodes_);
    return tree;
}

RngStream tree_stream(std::uint64_t master_seed, std::size_t flat_index) {
    return RngStream(master_seed, 0).derive("tree", flat_index);
}

std::size_t default_depth_limit(std::size_t effective_subsample) {
    if (effective_subsample <= 2) return 1;
    return static_cast<std::size_t>(
        std::ceil(std::log2(static_cast<double>(effective_subsample))));
}

namespace {

DeepForest build_forest_impl(const DataMatrix& data, const ForestConfig& config,
                             CereNetwork network, bool parallel) {
    if (data.rows() == 0) throw ShapeError("build_forest: empty dataset");
    if (config.r == 0 || config.t == 0 || config.subsample == 0) {
        throw ConfigError("build_forest: r, t and subsample must be >= 1");
    }
    if (network.input_dim() != data.cols()) {
        throw ShapeError("build_forest: network input width differs from data");
    }
    if (network.ensemble_size() != config.r) {
        throw ConfigError("build_forest: network ensemble size differs from config.r");
    }

    ColumnStats stats;
    const Matrix standardized = standardize(data.values, &stats);
    const RepresentationSet reps = network.forward_ensemble(standardized, config.batch_size);

    const std::size_t effective_n = std::min(config.subsample, data.rows());
    const std::size_t depth_limit =
        config.depth_limit > 0 ? config.depth_limit : default_depth_limit(effective_n);

    const std::size_t total_trees = config.r * config.t;
    std::vector<IsolationTree> trees(total_trees);
    if (parallel) {
        const std::int64_t tt = static_cast<std::int64_t>(total_trees);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t k = 0; k < tt; ++k) {
            const std::size_t u = static_cast<std::size_t>(k) / config.t;
            trees[static_cast<std::size_t>(k)] =
                build_tree(reps.members[u], config.subsample, depth_limit,
                           tree_stream(config.seed, static_cast<std::size_t>(k)), u);
        }
    } else {
        for (std::size_t k = 0; k < total_trees; ++k) {
            const std::size_t u = k / config.t;
            trees[k] = build_tree(reps.members[u], config.subsample, depth_limit,
                                  tree_stream(config.seed, k), u);
        }
    }
    return DeepForest(std::move(network), std::move(trees), config, std::move(stats),
                      effective_n, depth_limit);
}

CereNetwork make_network(const DataMatrix& data, const ForestConfig& config) {
    if (data.rows() == 0) throw ShapeError("build_forest: empty dataset");
    NetworkConfig net_config;
    net_config.hidden_dims =
        config.hidden_dims ? *config.hidden_dims : default_hidden_dims(data.cols());
    net_config.output_dim = config.output_dim;
    net_config.activation = config.activation;
    net_config.init = config.init;
    return CereNetwork::random(data.cols(), net_config, config.r, RngStream(config.seed, 0));
}

}  // namespace

DeepForest build_forest(const DataMatrix& data, const ForestConfig& config) {
    return build_forest_impl(data, config, make_network(data, config), true);
}

DeepForest build_forest_with_network(const DataMatrix& data, const ForestConfig& config,
                                     CereNetwork network) {
    return build_forest_impl(data, config, std::move(network), true);
}

DeepForest serial::build_forest(const DataMatrix& data, const ForestConfig& config) {
    return build_forest_impl(data, config, make_network(data, config), false);
}

}  // namespace deepif
