// Benchmark of the OpenMP kernels against their serial reference
// implementations: dense matmul, the batched ensemble forward pass, forest
// construction, and dataset scoring. Results are checked for equality while
// timing, so this doubles as a consistency smoke test.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "deepif/data.hpp"
#include "deepif/forest.hpp"
#include "deepif/matrix.hpp"
#include "deepif/representation.hpp"
#include "deepif/rng.hpp"
#include "deepif/scoring.hpp"

using namespace deepif;

namespace {

template <typename F>
double time_ms(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-22s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "results identical" : "RESULTS DIFFER");
}

double max_rel_diff(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double worst = 0.0;
    for (std::size_t u = 0; u < a.size(); ++u) {
        for (std::size_t i = 0; i < a[u].size(); ++i) {
            const double scale = std::max(1.0, std::abs(b[u].data()[i]));
            worst = std::max(worst, std::abs(a[u].data()[i] - b[u].data()[i]) / scale);
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) quick |= std::strcmp(argv[i], "--quick") == 0;

    const std::size_t mat_n = quick ? 128 : 512;
    const std::size_t rows = quick ? 500 : 4000;
    const std::size_t dims = quick ? 16 : 64;
    const std::size_t r = quick ? 10 : 50;

    std::printf("threads: %d\n", omp_get_max_threads());

    {
        RngStream rng(1, 0);
        const Matrix a = sample_matrix(rng, mat_n, mat_n, Distribution::standard_normal());
        const Matrix b = sample_matrix(rng, mat_n, mat_n, Distribution::standard_normal());
        Matrix serial_out, parallel_out;
        const double ts = time_ms([&] { serial_out = serial::matmul(a, b); });
        const double tp = time_ms([&] { parallel_out = matmul(a, b); });
        report("matmul", ts, tp, serial_out == parallel_out);
    }

    {
        RngStream rng(2, 0);
        const Matrix x = sample_matrix(rng, rows, dims, Distribution::standard_normal());
        NetworkConfig net_config;
        net_config.hidden_dims = default_hidden_dims(dims);
        const CereNetwork net = CereNetwork::random(dims, net_config, r, RngStream(3, 0));
        RepresentationSet member_wise, batched;
        const double ts = time_ms([&] { member_wise = serial::forward_ensemble(net, x); });
        const double tp = time_ms([&] { batched = net.forward_ensemble(x, 64); });
        report("ensemble forward", ts, tp,
               max_rel_diff(batched.members, member_wise.members) <= 1e-10);
    }

    DataMatrix data = gen_gaussian(rows, dims, 4);
    ForestConfig config;
    config.r = r;
    config.t = 6;
    config.seed = 5;
    {
        DeepForest* serial_forest = nullptr;
        DeepForest* parallel_forest = nullptr;
        const double ts =
            time_ms([&] { serial_forest = new DeepForest(serial::build_forest(data, config)); });
        const double tp =
            time_ms([&] { parallel_forest = new DeepForest(build_forest(data, config)); });
        bool identical = serial_forest->trees().size() == parallel_forest->trees().size();
        for (std::size_t k = 0; identical && k < serial_forest->trees().size(); ++k) {
            identical = serial_forest->trees()[k].structurally_equal(parallel_forest->trees()[k]);
        }
        report("forest build", ts, tp, identical);

        std::vector<ScoreBreakdown> serial_scores, parallel_scores;
        const double ss = time_ms(
            [&] { serial_scores = serial::score_dataset(*parallel_forest, data, ScoringMode::kDeas); });
        const double sp = time_ms(
            [&] { parallel_scores = score_dataset(*parallel_forest, data, ScoringMode::kDeas); });
        bool same = serial_scores.size() == parallel_scores.size();
        for (std::size_t i = 0; same && i < serial_scores.size(); ++i) {
            same = serial_scores[i].final_score == parallel_scores[i].final_score;
        }
        report("dataset scoring", ss, sp, same);
        delete serial_forest;
        delete parallel_forest;
    }
    return 0;
}
