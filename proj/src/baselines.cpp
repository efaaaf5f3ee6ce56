#include "deepif/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "deepif/errors.hpp"

namespace deepif {

namespace {

std::size_t resolve_depth_limit(const BaselineConfig& config, std::size_t effective_n) {
    return config.depth_limit > 0 ? config.depth_limit : default_depth_limit(effective_n);
}

template <typename Tree>
std::vector<double> score_trees(const std::vector<Tree>& trees, const Matrix& standardized,
                                std::size_t subsample, bool leaf_adjustment) {
    std::vector<double> scores(standardized.rows());
    const std::int64_t n = static_cast<std::int64_t>(standardized.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<TraversalRecord> records;
        records.reserve(trees.size());
        for (std::size_t k = 0; k < trees.size(); ++k) {
            records.push_back(trees[k].traverse_record(
                standardized.row(static_cast<std::size_t>(i)), static_cast<std::uint32_t>(k)));
        }
        scores[static_cast<std::size_t>(i)] = iforest_score(records, subsample, leaf_adjustment);
    }
    return scores;
}

}  // namespace

IsolationForestModel IsolationForestModel::fit(const DataMatrix& data,
                                               const BaselineConfig& config) {
    if (data.rows() == 0) throw ShapeError("iforest: empty dataset");
    if (config.trees == 0 || config.subsample == 0) {
        throw ConfigError("iforest: trees and subsample must be >= 1");
    }
    IsolationForestModel model;
    model.config_ = config;
    const Matrix standardized = standardize(data.values, &model.stats_);
    model.effective_subsample_ = std::min(config.subsample, data.rows());
    model.depth_limit_used_ = resolve_depth_limit(config, model.effective_subsample_);
    model.trees_.resize(config.trees);
    const std::int64_t tt = static_cast<std::int64_t>(config.trees);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < tt; ++k) {
        model.trees_[static_cast<std::size_t>(k)] =
            build_tree(standardized, config.subsample, model.depth_limit_used_,
                       tree_stream(config.seed, static_cast<std::size_t>(k)));
    }
    return model;
}

std::vector<double> IsolationForestModel::score(const DataMatrix& data) const {
    if (data.cols() != stats_.cols()) {
        throw ShapeError("iforest: data has " + std::to_string(data.cols()) +
                         " features, model expects " + std::to_string(stats_.cols()));
    }
    const Matrix standardized = apply_standardize(data.values, stats_);
    return score_trees(trees_, standardized, effective_subsample_, config_.leaf_adjustment);
}

TraversalRecord EifTree::traverse_record(std::span<const double> x,
                                         std::uint32_t tree_index) const {
    if (x.size() != dims_) {
        throw ShapeError("eif traverse: vector length differs from tree dimensionality");
    }
    TraversalRecord rec;
    rec.tree_index = tree_index;
    std::size_t idx = 0;
    while (!nodes_[idx].is_leaf()) {
        const EifNode& node = nodes_[idx];
        double side = 0.0;
        for (std::size_t j = 0; j < dims_; ++j) {
            side += (x[j] - node.intercept_point[j]) * node.normal_vector[j];
        }
        ++rec.path_length;
        idx = static_cast<std::size_t>(side <= 0.0 ? node.left : node.right);
    }
    rec.leaf_size = nodes_[idx].size;
    return rec;
}

namespace {

class EifTreeBuilder {
public:
    EifTreeBuilder(const Matrix& data, std::size_t depth_limit, RngStream& rng)
        : data_(data), depth_limit_(depth_limit), rng_(rng) {}

    std::int32_t grow(std::vector<std::uint32_t>& pool, std::uint64_t heap_id,
                      std::uint32_t depth, std::vector<EifNode>& nodes) {
        const std::int32_t index = static_cast<std::int32_t>(nodes.size());
        EifNode node;
        node.heap_id = heap_id;
        node.size = static_cast<std::uint32_t>(pool.size());
        node.depth = depth;
        nodes.push_back(std::move(node));

        if (pool.size() <= 1 || depth >= depth_limit_) return index;

        const std::size_t d = data_.cols();
        std::vector<double> mins(d, std::numeric_limits<double>::infinity());
        std::vector<double> maxs(d, -std::numeric_limits<double>::infinity());
        for (std::uint32_t row : pool) {
            const double* r = data_.data() + static_cast<std::size_t>(row) * d;
            for (std::size_t j = 0; j < d; ++j) {
                mins[j] = std::min(mins[j], r[j]);
                maxs[j] = std::max(maxs[j], r[j]);
            }
        }
        bool splittable = false;
        for (std::size_t j = 0; j < d; ++j) splittable |= maxs[j] > mins[j];
        if (!splittable) return index;

        std::vector<double> slope(d), intercept(d);
        for (std::size_t attempt = 0; attempt < d; ++attempt) {
            for (std::size_t j = 0; j < d; ++j) slope[j] = rng_.normal();
            for (std::size_t j = 0; j < d; ++j) intercept[j] = rng_.uniform(mins[j], maxs[j]);

            std::vector<std::uint32_t> left_pool, right_pool;
            for (std::uint32_t row : pool) {
                const double* r = data_.data() + static_cast<std::size_t>(row) * d;
                double side = 0.0;
                for (std::size_t j = 0; j < d; ++j) side += (r[j] - intercept[j]) * slope[j];
                if (side <= 0.0) {
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
            nodes[static_cast<std::size_t>(index)].normal_vector = slope;
            nodes[static_cast<std::size_t>(index)].intercept_point = intercept;
            nodes[static_cast<std::size_t>(index)].left = left;
            nodes[static_cast<std::size_t>(index)].right = right;
            return index;
        }
        return index;
    }

private:
    const Matrix& data_;
    std::size_t depth_limit_;
    RngStream& rng_;
};

}  // namespace

EifTree build_eif_tree(const Matrix& data, std::size_t n, std::size_t depth_limit,
                       RngStream rng) {
    if (data.rows() == 0) throw ShapeError("build_eif_tree: empty data");
    const std::size_t total = data.rows();
    const std::size_t take = std::min(n, total);

    std::vector<std::uint32_t> indices(total);
    for (std::size_t i = 0; i < total; ++i) indices[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(total - i);
        std::swap(indices[i], indices[j]);
    }
    indices.resize(take);

    EifTree tree;
    tree.subsample_rows_ = indices;
    tree.dims_ = data.cols();
    tree.depth_limit_ = depth_limit;

    std::vector<std::uint32_t> pool = indices;
    EifTreeBuilder builder(data, depth_limit, rng);
    builder.grow(pool, 1, 0, tree.nodes_);
    return tree;
}

EifModel EifModel::fit(const DataMatrix& data, const BaselineConfig& config) {
    if (data.rows() == 0) throw ShapeError("eif: empty dataset");
    if (config.trees == 0 || config.subsample == 0) {
        throw ConfigError("eif: trees and subsample must be >= 1");
    }
    EifModel model;
    model.config_ = config;
    const Matrix standardized = standardize(data.values, &model.stats_);
    model.effective_subsample_ = std::min(config.subsample, data.rows());
    model.depth_limit_used_ = resolve_depth_limit(config, model.effective_subsample_);
    model.trees_.resize(config.trees);
    const std::int64_t tt = static_cast<std::int64_t>(config.trees);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < tt; ++k) {
        model.trees_[static_cast<std::size_t>(k)] =
            build_eif_tree(standardized, config.subsample, model.depth_limit_used_,
                           tree_stream(config.seed, static_cast<std::size_t>(k)));
    }
    return model;
}

std::vector<double> EifModel::score(const DataMatrix& data) const {
    if (data.cols() != stats_.cols()) {
        throw ShapeError("eif: data has " + std::to_string(data.cols()) +
                         " features, model expects " + std::to_string(stats_.cols()));
    }
    const Matrix standardized = apply_standardize(data.values, stats_);
    return score_trees(trees_, standardized, effective_subsample_, config_.leaf_adjustment);
}

std::vector<double> iforest_fit_score(const DataMatrix& data, std::size_t trees,
                                      std::size_t subsample, std::uint64_t seed) {
    BaselineConfig config;
    config.trees = trees;
    config.subsample = subsample;
    config.seed = seed;
    return IsolationForestModel::fit(data, config).score(data);
}

std::vector<double> eif_fit_score(const DataMatrix& data, std::size_t trees,
                                  std::size_t subsample, std::uint64_t seed) {
    BaselineConfig config;
    config.trees = trees;
    config.subsample = subsample;
    config.seed = seed;
    return EifModel::fit(data, config).score(data);
}

IForestReductionReport verify_iforest_reduction(const DataMatrix& data, std::uint64_t seed,
                                                std::size_t trees, std::size_t subsample,
                                                bool inject_mismatch) {
    IForestReductionReport report;
    report.seed = seed;
    report.trees = trees;
    report.subsample = subsample;

    // DIF with a single identity linear layer, sharing per-tree streams with
    // the classic forest.
    ForestConfig dif_config;
    dif_config.r = 1;
    dif_config.t = trees;
    dif_config.subsample = subsample;
    dif_config.seed = seed;
    DeepForest dif_forest = [&] {
        if (!inject_mismatch) {
            return build_forest_with_network(data, dif_config,
                                             CereNetwork::identity(data.cols()));
        }
        // Self-test path: grow tree 0 from a corrupted stream so its splits
        // disagree with the baseline's.
        ColumnStats stats;
        const Matrix standardized = standardize(data.values, &stats);
        const std::size_t effective_n = std::min(subsample, data.rows());
        const std::size_t depth = default_depth_limit(effective_n);
        std::vector<IsolationTree> corrupt_trees(trees);
        for (std::size_t k = 0; k < trees; ++k) {
            RngStream stream = k == 0 ? RngStream(seed, 0).derive("corrupt", 0)
                                      : tree_stream(seed, k);
            corrupt_trees[k] = build_tree(standardized, subsample, depth, stream, 0);
        }
        return DeepForest(CereNetwork::identity(data.cols()), std::move(corrupt_trees),
                          dif_config, std::move(stats), effective_n, depth);
    }();

    BaselineConfig base_config;
    base_config.trees = trees;
    base_config.subsample = subsample;
    base_config.leaf_adjustment = false;  // match the depth-only convention exactly
    base_config.seed = seed;
    IsolationForestModel baseline = IsolationForestModel::fit(data, base_config);

    report.tree_equal.resize(trees);
    report.all_trees_equal = true;
    for (std::size_t k = 0; k < trees; ++k) {
        report.tree_equal[k] = dif_forest.trees()[k].structurally_equal(baseline.trees()[k]);
        report.all_trees_equal = report.all_trees_equal && report.tree_equal[k];
    }

    const std::vector<ScoreBreakdown> dif_breakdowns =
        score_dataset(dif_forest, data, ScoringMode::kPathOnly);
    const std::vector<double> base_scores = baseline.score(data);
    const std::vector<ScoreBreakdown> dif_deas =
        score_dataset(dif_forest, data, ScoringMode::kDeas);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        report.max_abs_score_diff = std::max(
            report.max_abs_score_diff,
            std::abs(dif_breakdowns[i].final_score - base_scores[i]));
        // Path-only scores are strictly positive, so the ratio is well defined.
        const double factor = dif_deas[i].final_score / dif_breakdowns[i].final_score;
        report.max_deviation_factor_diff =
            std::max(report.max_deviation_factor_diff,
                     std::abs(factor - dif_deas[i].mean_deviation));
    }
    return report;
}

EifReductionReport verify_eif_reduction(const DataMatrix& data, std::uint64_t seed,
                                        std::size_t triples, std::size_t trees) {
    EifReductionReport report;
    report.seed = seed;
    const std::size_t d = data.cols();

    // Route 1: random (o, k, p) triples, the one-column projection W = k with
    // threshold eta = p.k against the hyper-plane form.
    RngStream triple_rng = RngStream(seed, 0).derive("eif-triples");
    for (std::size_t i = 0; i < triples; ++i) {
        std::vector<double> o(d), k(d), p(d);
        for (double& v : o) v = triple_rng.normal();
        for (double& v : k) v = triple_rng.normal();
        for (double& v : p) v = triple_rng.normal();
        double ok = 0.0, eta = 0.0, side = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            ok += o[j] * k[j];
            eta += p[j] * k[j];
            side += (o[j] - p[j]) * k[j];
        }
        report.triples_checked++;
        if ((ok <= eta) == (side <= 0.0)) report.triples_agreeing++;
    }

    // Route 2: every branching decision of freshly built EIF trees, replayed
    // under the shared (k, p) of each node.
    ColumnStats stats;
    const Matrix standardized = standardize(data.values, &stats);
    const std::size_t effective_n = std::min<std::size_t>(256, data.rows());
    const std::size_t depth_limit = default_depth_limit(effective_n);
    for (std::size_t ti = 0; ti < trees; ++ti) {
        const EifTree tree =
            build_eif_tree(standardized, 256, depth_limit, tree_stream(seed, ti));
        // Walk pools down from the root, checking both predicate forms.
        struct Frame {
            std::size_t node;
            std::vector<std::uint32_t> pool;
        };
        std::vector<Frame> stack;
        stack.push_back({0, tree.subsample_rows()});
        while (!stack.empty()) {
            Frame frame = std::move(stack.back());
            stack.pop_back();
            const EifNode& node = tree.nodes()[frame.node];
            if (node.is_leaf()) continue;
            double eta = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                eta += node.intercept_point[j] * node.normal_vector[j];
            }
            std::vector<std::uint32_t> left_pool, right_pool;
            for (std::uint32_t row : frame.pool) {
                const double* r = standardized.data() + static_cast<std::size_t>(row) * d;
                double ok = 0.0, side = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    ok += r[j] * node.normal_vector[j];
                    side += (r[j] - node.intercept_point[j]) * node.normal_vector[j];
                }
                report.decisions_checked++;
                if ((ok <= eta) == (side <= 0.0)) report.decisions_agreeing++;
                if (side <= 0.0) {
                    left_pool.push_back(row);
                } else {
                    right_pool.push_back(row);
                }
            }
            stack.push_back({static_cast<std::size_t>(node.left), std::move(left_pool)});
            stack.push_back({static_cast<std::size_t>(node.right), std::move(right_pool)});
        }
    }
    return report;
}

}  // namespace deepif
