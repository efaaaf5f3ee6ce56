#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "deepif/errors.hpp"
#include "deepif/metrics.hpp"
#include "deepif/rng.hpp"

using namespace deepif;

namespace {

// O(N^2) pairwise oracle with half credit for ties.
double auc_roc_oracle(const LabeledScores& ls) {
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < ls.scores.size(); ++i) {
        if (!ls.labels[i]) continue;
        for (std::size_t j = 0; j < ls.scores.size(); ++j) {
            if (ls.labels[j]) continue;
            ++pairs;
            if (ls.scores[i] > ls.scores[j]) {
                total += 1.0;
            } else if (ls.scores[i] == ls.scores[j]) {
                total += 0.5;
            }
        }
    }
    return total / static_cast<double>(pairs);
}

// Exhaustive threshold sweep over every distinct score.
double auc_pr_oracle(const LabeledScores& ls) {
    std::set<double, std::greater<double>> thresholds(ls.scores.begin(), ls.scores.end());
    std::size_t total_pos = 0;
    for (int l : ls.labels) total_pos += l != 0;
    double ap = 0.0;
    double prev_recall = 0.0;
    for (double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (std::size_t i = 0; i < ls.scores.size(); ++i) {
            if (ls.scores[i] >= t) {
                (ls.labels[i] ? tp : fp) += 1;
            }
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

LabeledScores random_instance(RngStream& rng, std::size_t n, bool with_ties) {
    LabeledScores ls;
    for (std::size_t i = 0; i < n; ++i) {
        double s = rng.uniform(0.0, 1.0);
        if (with_ties) s = std::floor(s * 8.0) / 8.0;
        ls.scores.push_back(s);
        ls.labels.push_back(rng.below(4) == 0 ? 1 : 0);
    }
    // Guarantee both classes.
    ls.labels[0] = 1;
    ls.labels[n - 1] = 0;
    return ls;
}

}  // namespace

TEST_CASE("auc_roc basics") {
    CHECK(auc_roc({{0.9, 0.8, 0.1}, {1, 1, 0}}) == 1.0);
    CHECK(auc_roc({{0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}}) == 0.5);
    CHECK(auc_roc({{0.1, 0.9}, {1, 0}}) == 0.0);
}

TEST_CASE("auc_roc rejects degenerate inputs") {
    CHECK_THROWS_AS(auc_roc({{0.1, 0.2}, {1, 1}}), MetricError);
    CHECK_THROWS_AS(auc_roc({{0.1, 0.2}, {0, 0}}), MetricError);
    CHECK_THROWS_AS(auc_roc({{0.1}, {1, 0}}), MetricError);
}

TEST_CASE("auc_roc matches the pairwise oracle, with and without ties") {
    RngStream rng(3, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const LabeledScores ls = random_instance(rng, 50, trial % 2 == 0);
        REQUIRE(std::abs(auc_roc(ls) - auc_roc_oracle(ls)) <= 1e-12);
    }
}

TEST_CASE("auc_roc is invariant under strictly monotone transforms") {
    RngStream rng(4, 0);
    const LabeledScores ls = random_instance(rng, 80, false);
    LabeledScores mapped = ls;
    for (double& s : mapped.scores) s = std::exp(3.0 * s) - 2.0;
    CHECK(auc_roc(mapped) == doctest::Approx(auc_roc(ls)).epsilon(1e-12));
}

TEST_CASE("auc_roc complements under score negation for tie-free scores") {
    RngStream rng(5, 0);
    LabeledScores ls = random_instance(rng, 60, false);
    LabeledScores neg = ls;
    for (double& s : neg.scores) s = -s;
    CHECK(auc_roc(ls) + auc_roc(neg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("auc_pr basics") {
    // Perfect ranking with 2 anomalies among 10.
    LabeledScores perfect;
    for (int i = 0; i < 10; ++i) {
        perfect.scores.push_back(1.0 - 0.05 * i);
        perfect.labels.push_back(i < 2 ? 1 : 0);
    }
    CHECK(auc_pr(perfect) == 1.0);

    // Single anomaly ranked last among N.
    LabeledScores worst;
    const int n = 8;
    for (int i = 0; i < n; ++i) {
        worst.scores.push_back(static_cast<double>(n - i));
        worst.labels.push_back(i == n - 1 ? 1 : 0);
    }
    CHECK(auc_pr(worst) == doctest::Approx(1.0 / n));
}

TEST_CASE("auc_pr matches the all-thresholds oracle") {
    RngStream rng(6, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const LabeledScores ls = random_instance(rng, 50, trial % 2 == 0);
        REQUIRE(std::abs(auc_pr(ls) - auc_pr_oracle(ls)) <= 1e-12);
    }
}

TEST_CASE("aii is 1 for far-separated anomalies") {
    RngStream rng(7, 0);
    const std::size_t normals = 300, anomalies = 12;
    Matrix rep(normals + anomalies, 3);
    std::vector<int> labels(normals + anomalies, 0);
    for (std::size_t i = 0; i < normals; ++i) {
        for (std::size_t j = 0; j < 3; ++j) rep(i, j) = rng.normal();
    }
    for (std::size_t i = 0; i < anomalies; ++i) {
        for (std::size_t j = 0; j < 3; ++j) rep(normals + i, j) = 100.0 + rng.normal();
        labels[normals + i] = 1;
    }
    CHECK(aii(rep, labels, RngStream(1, 0)) == 1.0);
}

TEST_CASE("aii is near one half when anomalies share the normal distribution") {
    double total = 0.0;
    int trials = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RngStream rng(seed, 0);
        const std::size_t normals = 400, anomalies = 24;
        Matrix rep(normals + anomalies, 2);
        std::vector<int> labels(normals + anomalies, 0);
        for (std::size_t i = 0; i < rep.rows(); ++i) {
            rep(i, 0) = rng.normal();
            rep(i, 1) = rng.normal();
        }
        for (std::size_t i = 0; i < anomalies; ++i) labels[normals + i] = 1;
        total += aii(rep, labels, RngStream(seed, 99));
        ++trials;
    }
    const double mean = total / trials;
    CHECK(mean > 0.35);
    CHECK(mean < 0.65);
}

TEST_CASE("aii is invariant under isometries of the representation") {
    RngStream rng(8, 0);
    const std::size_t normals = 200, anomalies = 10;
    Matrix rep(normals + anomalies, 2);
    std::vector<int> labels(normals + anomalies, 0);
    for (std::size_t i = 0; i < normals; ++i) {
        rep(i, 0) = rng.normal();
        rep(i, 1) = rng.normal();
    }
    for (std::size_t i = 0; i < anomalies; ++i) {
        rep(normals + i, 0) = 6.0 + rng.normal() * 0.2;
        rep(normals + i, 1) = -5.0 + rng.normal() * 0.2;
        labels[normals + i] = 1;
    }
    const double base = aii(rep, labels, RngStream(3, 3));

    const double angle = std::numbers::pi / 5.0;
    Matrix moved(rep.rows(), 2);
    for (std::size_t i = 0; i < rep.rows(); ++i) {
        const double x = rep(i, 0), y = rep(i, 1);
        moved(i, 0) = std::cos(angle) * x - std::sin(angle) * y + 11.0;
        moved(i, 1) = std::sin(angle) * x + std::cos(angle) * y - 4.0;
    }
    CHECK(aii(moved, labels, RngStream(3, 3)) == base);
}

TEST_CASE("aii requires both classes") {
    Matrix rep(5, 2);
    CHECK_THROWS_AS(aii(rep, {0, 0, 0, 0, 0}, RngStream(0, 0)), MetricError);
    CHECK_THROWS_AS(aii(rep, {1, 1, 1, 1, 1}, RngStream(0, 0)), MetricError);
}
