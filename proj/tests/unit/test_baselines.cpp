#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "deepif/baselines.hpp"
#include "deepif/data.hpp"
#include "deepif/metrics.hpp"
#include "deepif/rng.hpp"

using namespace deepif;

namespace {

DataMatrix far_point_toy() {
    DataMatrix d;
    d.values = Matrix::from_rows({{0.0}, {0.1}, {0.2}, {10.0}});
    return d;
}

// Two diagonal blobs plus anomalies in the axis-aligned "ghost" corners:
// the regions sharing one blob's x-range and the other's y-range, where
// axis-parallel partitions under-score by construction.
DataMatrix two_blob_with_ghost_anomalies(std::uint64_t seed) {
    const DataMatrix blobs = gen_blobs(BlobKind::kTwoBlob, 400, 0.5, seed);
    RngStream rng(seed, fnv1a64("ghost"));
    DataMatrix d;
    d.values = Matrix(blobs.rows() + 20, 2);
    d.labels.assign(blobs.rows() + 20, 0);
    for (std::size_t i = 0; i < blobs.rows(); ++i) {
        d.values(i, 0) = blobs.values(i, 0);
        d.values(i, 1) = blobs.values(i, 1);
    }
    for (std::size_t i = 0; i < 20; ++i) {
        const double cx = (i % 2) ? -2.0 : 2.0;
        d.values(blobs.rows() + i, 0) = cx + rng.normal() * 0.15;
        d.values(blobs.rows() + i, 1) = -cx + rng.normal() * 0.15;
        d.labels[blobs.rows() + i] = 1;
    }
    return d;
}

}  // namespace

TEST_CASE("baseline defaults match the standard ensemble settings") {
    const BaselineConfig config;
    CHECK(config.trees == 300);
    CHECK(config.subsample == 256);
    CHECK(config.leaf_adjustment);
}

TEST_CASE("classic iforest isolates the far point across seeds") {
    const DataMatrix toy = far_point_toy();
    int top1 = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::vector<double> scores = iforest_fit_score(toy, 100, 4, seed);
        const std::size_t argmax = static_cast<std::size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        top1 += argmax == 3;
    }
    CHECK(top1 >= 95);
}

TEST_CASE("eif isolates the far point across seeds") {
    const DataMatrix toy = far_point_toy();
    int top1 = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::vector<double> scores = eif_fit_score(toy, 100, 4, seed);
        const std::size_t argmax = static_cast<std::size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        top1 += argmax == 3;
    }
    CHECK(top1 >= 95);
}

TEST_CASE("identical seeds give identical baseline scores") {
    const DataMatrix toy = far_point_toy();
    CHECK(iforest_fit_score(toy, 50, 4, 9) == iforest_fit_score(toy, 50, 4, 9));
    CHECK(eif_fit_score(toy, 50, 4, 9) == eif_fit_score(toy, 50, 4, 9));
}

TEST_CASE("1-D eif splits degenerate to threshold cuts") {
    // With one dimension the hyper-plane predicate reduces to an ordering
    // comparison, so every split partitions the line into two intervals.
    const DataMatrix toy = far_point_toy();
    BaselineConfig config;
    config.trees = 20;
    config.subsample = 4;
    config.seed = 3;
    const EifModel model = EifModel::fit(toy, config);
    ColumnStats stats;
    const Matrix standardized = standardize(toy.values, &stats);
    for (const EifTree& tree : model.trees()) {
        for (const EifNode& node : tree.nodes()) {
            if (node.is_leaf()) continue;
            const double k = node.normal_vector[0];
            const double p = node.intercept_point[0];
            // Exactly the objects on one side of the point p branch left.
            for (std::size_t i = 0; i < standardized.rows(); ++i) {
                const double o = standardized(i, 0);
                const bool left = (o - p) * k <= 0.0;
                const bool ordered = k > 0.0 ? o <= p : o >= p;
                REQUIRE(left == ordered);
            }
        }
    }
}

TEST_CASE("eif beats classic iforest on two-blob ghost-region anomalies") {
    double eif_total = 0.0, iforest_total = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const DataMatrix d = two_blob_with_ghost_anomalies(seed);
        LabeledScores eif_ls{eif_fit_score(d, 100, 128, seed), d.labels};
        LabeledScores if_ls{iforest_fit_score(d, 100, 128, seed), d.labels};
        eif_total += auc_roc(eif_ls);
        iforest_total += auc_roc(if_ls);
    }
    CHECK(eif_total / 10.0 >= iforest_total / 10.0);
}

TEST_CASE("identity-network reduction reproduces classic iforest exactly") {
    const DataMatrix ring = gen_ring({}, 41);
    const IForestReductionReport report = verify_iforest_reduction(ring, 7, 60, 128);
    CHECK(report.max_abs_score_diff == 0.0);
    CHECK(report.all_trees_equal);
    REQUIRE(report.tree_equal.size() == 60);
    for (bool flag : report.tree_equal) REQUIRE(flag);
    // Dividing DEAS by the depth-only score recovers the mean deviation.
    CHECK(report.max_deviation_factor_diff <= 1e-12);
    CHECK(report.passed());
}

TEST_CASE("eif reduction predicates agree on triples and on tree decisions") {
    const DataMatrix gauss = gen_gaussian(400, 6, 23);
    const EifReductionReport report = verify_eif_reduction(gauss, 11);
    CHECK(report.triples_checked == 500);
    CHECK(report.triples_agreeing == 500);
    CHECK(report.decisions_checked > 0);
    CHECK(report.decisions_agreeing == report.decisions_checked);
    CHECK(report.predicate_agreement() == 1.0);
    CHECK(report.passed());
}

TEST_CASE("hyper-plane boundary routes left in both predicate forms") {
    // o placed exactly on the plane: o.k == p.k and (o-p).k == 0.
    RngStream rng(13, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> k(5), p(5);
        for (double& v : k) v = rng.normal();
        for (double& v : p) v = rng.normal();
        const std::vector<double>& o = p;
        double ok = 0.0, eta = 0.0, side = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            ok += o[j] * k[j];
            eta += p[j] * k[j];
            side += (o[j] - p[j]) * k[j];
        }
        REQUIRE(ok <= eta);
        REQUIRE(side <= 0.0);
    }
}

TEST_CASE("baseline trees satisfy the structural invariants") {
    const DataMatrix gauss = gen_gaussian(500, 4, 29);
    BaselineConfig config;
    config.trees = 30;
    config.subsample = 128;
    config.seed = 17;
    const IsolationForestModel model = IsolationForestModel::fit(gauss, config);
    CHECK(model.depth_limit_used() == 7);  // ceil(log2 128)
    for (const IsolationTree& tree : model.trees()) {
        CHECK(tree.subsample_rows().size() == 128);
        for (const TreeNode& node : tree.nodes()) REQUIRE(node.depth <= 7);
    }
    const EifModel eif = EifModel::fit(gauss, config);
    for (const EifTree& tree : eif.trees()) {
        for (const EifNode& node : tree.nodes()) {
            REQUIRE(node.depth <= 7);
            if (!node.is_leaf()) {
                const EifNode& left = tree.nodes()[static_cast<std::size_t>(node.left)];
                const EifNode& right = tree.nodes()[static_cast<std::size_t>(node.right)];
                REQUIRE(left.size + right.size == node.size);
                REQUIRE(left.size > 0);
                REQUIRE(right.size > 0);
            }
        }
    }
}
