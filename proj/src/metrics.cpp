#include "deepif/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "deepif/errors.hpp"

namespace deepif {

namespace {

void validate(const LabeledScores& ls) {
    if (ls.scores.size() != ls.labels.size()) {
        throw MetricError("metrics: scores and labels differ in length");
    }
    if (ls.scores.empty()) throw MetricError("metrics: empty input");
    std::size_t pos = 0;
    for (int l : ls.labels) pos += l != 0;
    if (pos == 0 || pos == ls.labels.size()) {
        throw MetricError("metrics: both classes must be present");
    }
}

}  // namespace

double auc_roc(const LabeledScores& ls) {
    validate(ls);
    const std::size_t n = ls.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ls.scores[a] < ls.scores[b];
    });

    // Average 1-based ranks within tie groups.
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && ls.scores[order[j]] == ls.scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
        i = j;
    }

    double pos_rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (ls.labels[k]) {
            pos_rank_sum += rank[k];
            ++pos;
        }
    }
    const std::size_t neg = n - pos;
    const double u = pos_rank_sum - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double auc_pr(const LabeledScores& ls) {
    validate(ls);
    const std::size_t n = ls.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ls.scores[a] > ls.scores[b];
    });
    std::size_t total_pos = 0;
    for (int l : ls.labels) total_pos += l != 0;

    double ap = 0.0;
    std::size_t tp = 0, predicted = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t group_tp = 0;
        while (j < n && ls.scores[order[j]] == ls.scores[order[i]]) {
            group_tp += ls.labels[order[j]] != 0;
            ++j;
        }
        const std::size_t prev_tp = tp;
        tp += group_tp;
        predicted += j - i;
        if (group_tp > 0) {
            const double precision =
                static_cast<double>(tp) / static_cast<double>(predicted);
            const double recall_step =
                static_cast<double>(tp - prev_tp) / static_cast<double>(total_pos);
            ap += recall_step * precision;
        }
        i = j;
    }
    return ap;
}

namespace {

double euclidean(const Matrix& m, std::size_t a, std::size_t b) {
    double acc = 0.0;
    const double* ra = m.data() + a * m.cols();
    const double* rb = m.data() + b * m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double diff = ra[j] - rb[j];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// k draws from `pool`: without replacement when the pool is large enough,
// with replacement otherwise.
std::vector<std::size_t> sample_from(const std::vector<std::size_t>& pool, std::size_t k,
                                     RngStream& rng) {
    std::vector<std::size_t> out;
    out.reserve(k);
    if (pool.size() >= k) {
        std::vector<std::size_t> copy = pool;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + rng.below(copy.size() - i);
            std::swap(copy[i], copy[j]);
            out.push_back(copy[i]);
        }
    } else {
        for (std::size_t i = 0; i < k; ++i) out.push_back(pool[rng.below(pool.size())]);
    }
    return out;
}

}  // namespace

double aii(const Matrix& representation, const std::vector<int>& labels,
           const RngStream& rng, const AiiParams& params) {
    if (labels.size() != representation.rows()) {
        throw MetricError("aii: label count differs from representation rows");
    }
    std::vector<std::size_t> anomalies, normals;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] ? anomalies : normals).push_back(i);
    }
    if (anomalies.empty()) throw MetricError("aii: no anomalies in the labels");
    if (normals.empty()) throw MetricError("aii: no normal objects in the labels");

    const std::int64_t n_anoms = static_cast<std::int64_t>(anomalies.size());
    std::vector<int> isolated(anomalies.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ai = 0; ai < n_anoms; ++ai) {
        RngStream stream = rng.derive("aii-anomaly", static_cast<std::uint64_t>(ai));
        const std::vector<std::size_t> anchors =
            sample_from(normals, params.anchors, stream);
        const std::vector<std::size_t> references =
            sample_from(normals, params.references, stream);

        const std::size_t a = anomalies[static_cast<std::size_t>(ai)];
        double anomaly_mean = 0.0;
        for (std::size_t c : anchors) anomaly_mean += euclidean(representation, a, c);
        anomaly_mean /= static_cast<double>(anchors.size());

        std::vector<double> margins;
        margins.reserve(references.size());
        for (std::size_t ref : references) {
            double ref_mean = 0.0;
            for (std::size_t c : anchors) ref_mean += euclidean(representation, ref, c);
            ref_mean /= static_cast<double>(anchors.size());
            margins.push_back(anomaly_mean - ref_mean);
        }
        std::sort(margins.begin(), margins.end());
        const std::size_t m = margins.size();
        const double median = m % 2 == 1
                                  ? margins[m / 2]
                                  : 0.5 * (margins[m / 2 - 1] + margins[m / 2]);
        isolated[static_cast<std::size_t>(ai)] = median > 0.0 ? 1 : 0;
    }
    std::size_t count = 0;
    for (int flag : isolated) count += flag;
    return static_cast<double>(count) / static_cast<double>(anomalies.size());
}

}  // namespace deepif
