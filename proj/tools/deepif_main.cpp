// deepif: deep isolation forest anomaly detection CLI.
//
// Subcommands: gen, fit, score, eval, benchmark, scaling, score-map, verify.
// Exit codes: 0 ok, 2 parse error, 3 config/usage error, 4 dimension error,
// 5 metric error, 6 verification failure, 7 io error.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deepif/baselines.hpp"
#include "deepif/data.hpp"
#include "deepif/errors.hpp"
#include "deepif/forest.hpp"
#include "deepif/metrics.hpp"
#include "deepif/model_io.hpp"
#include "deepif/rng.hpp"
#include "deepif/run_config.hpp"
#include "deepif/scoring.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace deepif;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;
constexpr int kExitShape = 4;
constexpr int kExitMetric = 5;
constexpr int kExitVerify = 6;
constexpr int kExitIo = 7;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

// Config-flag block shared by the model-running subcommands. Values are
// gathered as strings and applied over the config file so flags win.
struct ConfigFlags {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> entries;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "flat key=value config file");
        auto capture = [this](const std::string& key) {
            return [this, key](const std::string& value) {
                entries.emplace_back(key, value);
            };
        };
        cmd->add_option_function<std::string>("--algo", capture("algo"),
                                              "dif|iforest|eif");
        cmd->add_option_function<std::string>("--r", capture("r"), "representations");
        cmd->add_option_function<std::string>("--t", capture("t"),
                                              "trees per representation");
        cmd->add_option_function<std::string>("--n", capture("n"), "subsample size");
        cmd->add_option_function<std::string>("--depth", capture("depth"),
                                              "depth limit (0 = auto)");
        cmd->add_option_function<std::string>("--hidden", capture("hidden"),
                                              "hidden widths: auto|none|w1,w2,...");
        cmd->add_option_function<std::string>("--out-dim", capture("out_dim"),
                                              "representation dimension");
        cmd->add_option_function<std::string>("--activation", capture("activation"),
                                              "tanh|relu|leaky-relu");
        cmd->add_option_function<std::string>("--batch", capture("batch"),
                                              "mini-batch size");
        cmd->add_option_function<std::string>("--mode", capture("mode"),
                                              "deas|path-only");
        cmd->add_option_function<std::string>("--seed", capture("seed"), "master seed");
    }

    RunConfig resolve() const {
        RunConfig config;
        if (!config_file.empty()) config = parse_config_file(config_file);
        for (const auto& [key, value] : entries) apply_config_entry(config, key, value);
        return config;
    }
};

void apply_threads(int threads) {
    if (threads > 0) {
        omp_set_num_threads(threads);
        return;
    }
    if (const char* env = std::getenv("DEEPIF_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
}

std::string provenance_comment(const RunConfig& config) {
    return "deepif config_hash=" + config_hash_hex(config) +
           " seed=" + std::to_string(config.seed);
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::string kind = "ring";
    std::size_t n = 800;
    std::size_t anomalies = 30;
    double radius = 1.0;
    double thickness = 0.05;
    double noise = 1.0;
    std::size_t dims = 8;
    std::uint64_t seed = 42;
    std::string out;
};

int run_gen(const GenArgs& args) {
    DataMatrix data;
    if (args.kind == "ring") {
        RingParams params;
        params.n_normal = args.n;
        params.n_anomaly = args.anomalies;
        params.radius = args.radius;
        params.thickness = args.thickness;
        data = gen_ring(params, args.seed);
    } else if (args.kind == "single-blob") {
        data = gen_blobs(BlobKind::kSingleBlob, args.n, args.noise, args.seed);
    } else if (args.kind == "two-blob") {
        data = gen_blobs(BlobKind::kTwoBlob, args.n, args.noise, args.seed);
    } else if (args.kind == "sinusoid") {
        data = gen_blobs(BlobKind::kSinusoid, args.n, args.noise, args.seed);
    } else if (args.kind == "gauss") {
        data = gen_gaussian(args.n, args.dims, args.seed);
    } else {
        throw ConfigError("gen: unknown kind '" + args.kind + "'");
    }
    save_csv(data, args.out, ',', "deepif " + data.source);
    std::cout << "wrote " << data.rows() << "x" << data.cols() << " dataset to "
              << args.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

int run_fit(const ConfigFlags& flags, const std::string& train_csv,
            const std::string& label_col, const std::string& out_path) {
    const RunConfig config = flags.resolve();
    CsvOptions csv;
    csv.label_column = label_col;
    const DataMatrix train = load_csv(train_csv, csv);
    const Model model = fit_model(train, config);
    save_model(model, out_path);
    std::cout << "fitted " << to_string(config.algorithm) << " on " << train.rows() << "x"
              << train.cols() << ", " << model.tree_count() << " trees, config_hash="
              << config_hash_hex(config) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// score

int run_score(const std::string& model_path, const std::string& test_csv,
              const std::string& label_col, const std::string& mode_flag,
              const std::string& out_path, const std::string& jsonl_path,
              const std::string& rep_out, std::size_t rep_member) {
    const Model model = load_model(model_path);
    RunConfig config = model.config;
    if (!mode_flag.empty()) config.mode = scoring_mode_from_string(mode_flag);

    CsvOptions csv;
    csv.label_column = label_col;
    const DataMatrix test = load_csv(test_csv, csv);

    const std::vector<ScoreBreakdown> breakdowns = model.score_breakdown(test, config.mode);

    const std::string comment = provenance_comment(config) + " mode=" + to_string(config.mode);
    {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << "# " << comment << '\n';
        out << "object_id,score,mean_path,mean_deviation\n";
        for (std::size_t i = 0; i < breakdowns.size(); ++i) {
            out << i << ',' << format_double(breakdowns[i].final_score) << ','
                << format_double(breakdowns[i].mean_path) << ','
                << format_double(breakdowns[i].mean_deviation) << '\n';
        }
        if (!out) throw IoError("failed writing " + out_path);
    }
    if (!jsonl_path.empty()) {
        std::ofstream out(jsonl_path);
        if (!out) throw IoError("cannot write " + jsonl_path);
        for (std::size_t i = 0; i < breakdowns.size(); ++i) {
            json line;
            line["object_id"] = i;
            line["score"] = breakdowns[i].final_score;
            line["mean_path"] = breakdowns[i].mean_path;
            line["mean_deviation"] = breakdowns[i].mean_deviation;
            line["config_hash"] = config_hash_hex(config);
            line["seed"] = config.seed;
            out << line.dump() << '\n';
        }
    }
    if (!rep_out.empty()) {
        if (!model.dif) {
            throw ConfigError("score: --rep-out requires a DIF model");
        }
        const Matrix standardized = apply_standardize(test.values, model.dif->stats());
        const RepresentationSet reps = model.dif->network().forward_ensemble(
            standardized, model.dif->config().batch_size);
        if (rep_member >= reps.members.size()) {
            throw ConfigError("score: --rep-member out of range");
        }
        DataMatrix rep;
        rep.values = reps.members[rep_member];
        rep.labels = test.labels;
        for (std::size_t j = 0; j < rep.values.cols(); ++j) {
            rep.feature_names.push_back("rep_" + std::to_string(j));
        }
        save_csv(rep, rep_out, ',', comment + " member=" + std::to_string(rep_member));
    }
    std::cout << "scored " << breakdowns.size() << " objects -> " << out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct ScoresFile {
    std::vector<double> scores;
    std::string config_hash;
    std::string seed;
};

ScoresFile read_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    ScoresFile out;
    std::string line;
    bool header_seen = false;
    std::size_t score_col = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            // Provenance comment: harvest config_hash= and seed= fields.
            std::istringstream ss(line.substr(1));
            std::string token;
            while (ss >> token) {
                if (token.rfind("config_hash=", 0) == 0) out.config_hash = token.substr(12);
                if (token.rfind("seed=", 0) == 0) out.seed = token.substr(5);
            }
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!header_seen) {
            header_seen = true;
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (fields[c] == "score") score_col = c;
            }
            continue;
        }
        if (score_col >= fields.size()) {
            throw ParseError("scores csv: missing score column in " + path);
        }
        out.scores.push_back(std::stod(fields[score_col]));
    }
    if (out.scores.empty()) throw ParseError("scores csv: no rows in " + path);
    return out;
}

int run_eval(const std::string& scores_path, const std::string& data_csv,
             const std::string& label_col, const std::string& rep_csv,
             std::uint64_t seed, const std::string& out_path) {
    const ScoresFile scores = read_scores_csv(scores_path);
    CsvOptions csv;
    csv.label_column = label_col;
    const DataMatrix labeled = load_csv(data_csv, csv);
    if (!labeled.has_labels()) {
        throw MetricError("eval: data file carries no label column");
    }
    if (labeled.rows() != scores.scores.size()) {
        throw ShapeError("eval: scores and labels differ in length");
    }
    LabeledScores ls{scores.scores, labeled.labels};
    json report;
    report["auc_roc"] = auc_roc(ls);
    report["auc_pr"] = auc_pr(ls);
    if (!rep_csv.empty()) {
        CsvOptions rep_options;
        rep_options.label_column = label_col;
        const DataMatrix rep = load_csv(rep_csv, rep_options);
        if (!rep.has_labels()) throw MetricError("eval: representation dump is unlabeled");
        report["aii"] = aii(rep.values, rep.labels, RngStream(seed, fnv1a64("aii")));
    }
    report["seed"] = seed;
    report["config_hash"] = scores.config_hash;
    write_json(out_path, report);
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchEntry {
    std::string method;
    std::string setting;
    std::uint64_t seed;
    double auc_roc_value;
    double auc_pr_value;
};

void run_methods(const RunConfig& config, const DataMatrix& train, const DataMatrix& test,
                 const std::string& setting, std::uint64_t seed,
                 std::vector<BenchEntry>& entries) {
    for (const char* method : {"dif", "iforest", "eif"}) {
        RunConfig run = config;
        run.algorithm = algorithm_from_string(method);
        run.seed = seed;
        const Model model = fit_model(train, run);
        const std::vector<double> scores = model.score(test, run.mode);
        LabeledScores ls{scores, test.labels};
        entries.push_back({method, setting, seed, auc_roc(ls), auc_pr(ls)});
    }
}

int run_benchmark(const ConfigFlags& flags, const std::string& suite, std::size_t n_seeds,
                  const std::string& out_path) {
    const RunConfig config = flags.resolve();
    std::vector<BenchEntry> entries;
    const RngStream master(config.seed, fnv1a64("benchmark"));

    for (std::size_t si = 0; si < n_seeds; ++si) {
        const std::uint64_t run_seed = config.seed + si;
        const std::uint64_t data_seed = master.derive("data", si).stream_id();
        if (suite == "ring") {
            const DataMatrix ring = gen_ring({}, data_seed);
            run_methods(config, ring, ring, "ring", run_seed, entries);
        } else if (suite == "blobs") {
            // Labeled variants of the three cloud geometries.
            RngStream rng(data_seed, fnv1a64("blob-anoms"));
            const struct {
                BlobKind kind;
                const char* name;
                double noise;
            } kinds[] = {{BlobKind::kSingleBlob, "single-blob", 1.0},
                         {BlobKind::kTwoBlob, "two-blob", 0.5},
                         {BlobKind::kSinusoid, "sinusoid", 0.15}};
            for (const auto& spec : kinds) {
                const DataMatrix base = gen_blobs(spec.kind, 400, spec.noise, data_seed);
                DataMatrix labeled;
                labeled.values = Matrix(base.rows() + 20, 2);
                labeled.labels.assign(base.rows() + 20, 0);
                for (std::size_t i = 0; i < base.rows(); ++i) {
                    labeled.values(i, 0) = base.values(i, 0);
                    labeled.values(i, 1) = base.values(i, 1);
                }
                for (std::size_t i = 0; i < 20; ++i) {
                    double x = 0.0, y = 0.0;
                    if (spec.kind == BlobKind::kSingleBlob) {
                        // Far halo around the blob.
                        const double angle = rng.uniform(0.0, 6.283185307179586);
                        const double rad = rng.uniform(4.0, 6.0);
                        x = rad * std::cos(angle);
                        y = rad * std::sin(angle);
                    } else if (spec.kind == BlobKind::kTwoBlob) {
                        // Axis-aligned ghost corners.
                        const double cx = (i % 2) ? -2.0 : 2.0;
                        x = cx + rng.normal() * 0.15;
                        y = -cx + rng.normal() * 0.15;
                    } else {
                        // Vertically displaced off the curve.
                        x = rng.uniform(0.0, 6.283185307179586);
                        y = std::sin(x) + (i % 2 ? 1.0 : -1.0) * rng.uniform(1.0, 2.0);
                    }
                    labeled.values(base.rows() + i, 0) = x;
                    labeled.values(base.rows() + i, 1) = y;
                    labeled.labels[base.rows() + i] = 1;
                }
                run_methods(config, labeled, labeled, spec.name, run_seed, entries);
            }
        } else if (suite == "contamination") {
            const DataMatrix ring = gen_ring({}, data_seed);
            for (double rho : {0.00, 0.02, 0.04, 0.06, 0.08, 0.10}) {
                const DataMatrix train =
                    adjust_contamination(ring, rho, master.derive("rho", si).stream_id());
                char setting[16];
                std::snprintf(setting, sizeof(setting), "rho=%.2f", rho);
                run_methods(config, train, ring, setting, run_seed, entries);
            }
        } else {
            throw ConfigError("benchmark: unknown suite '" + suite +
                              "' (expected ring|blobs|contamination)");
        }
    }

    json report;
    report["suite"] = suite;
    report["config_hash"] = config_hash_hex(config);
    report["master_seed"] = config.seed;
    report["n_seeds"] = n_seeds;
    json entry_list = json::array();
    for (const BenchEntry& e : entries) {
        entry_list.push_back({{"method", e.method},
                              {"setting", e.setting},
                              {"seed", e.seed},
                              {"auc_roc", e.auc_roc_value},
                              {"auc_pr", e.auc_pr_value}});
    }
    report["entries"] = entry_list;

    // Per (method, setting) means and standard deviations over seeds.
    json summary = json::array();
    std::vector<std::pair<std::string, std::string>> keys;
    for (const BenchEntry& e : entries) {
        const auto key = std::make_pair(e.method, e.setting);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [method, setting] : keys) {
        std::vector<double> rocs, prs;
        for (const BenchEntry& e : entries) {
            if (e.method == method && e.setting == setting) {
                rocs.push_back(e.auc_roc_value);
                prs.push_back(e.auc_pr_value);
            }
        }
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        auto stddev = [&](const std::vector<double>& v, double m) {
            double s = 0.0;
            for (double x : v) s += (x - m) * (x - m);
            return std::sqrt(s / static_cast<double>(v.size()));
        };
        const double roc_mean = mean(rocs);
        const double pr_mean = mean(prs);
        summary.push_back({{"method", method},
                           {"setting", setting},
                           {"mean_auc_roc", roc_mean},
                           {"std_auc_roc", stddev(rocs, roc_mean)},
                           {"mean_auc_pr", pr_mean},
                           {"std_auc_pr", stddev(prs, pr_mean)}});
    }
    report["summary"] = summary;
    write_json(out_path, report);
    std::cout << "benchmark '" << suite << "': " << entries.size() << " entries -> "
              << out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// scaling

int run_scaling(const ConfigFlags& flags, std::vector<std::size_t> sizes,
                std::vector<std::size_t> dims, std::size_t repeats,
                const std::string& out_path) {
    RunConfig config = flags.resolve();
    // Fixed-width network for timing runs: the default data-dependent width
    // would conflate network growth with data growth.
    bool hidden_overridden = false;
    for (const auto& [key, value] : flags.entries) hidden_overridden |= key == "hidden";
    if (!hidden_overridden && !config.hidden_dims) {
        config.hidden_dims = std::vector<std::size_t>{128};
    }

    if (dims.empty()) {
        for (std::size_t d = 16; d <= 4096; d *= 2) dims.push_back(d);
    }
    if (sizes.empty()) {
        for (std::size_t n = 1000; n <= 256000; n *= 2) sizes.push_back(n);
    }

    struct Row {
        std::size_t n, d;
        std::vector<double> seconds;
        double median;
    };
    std::vector<Row> rows;
    const RngStream master(config.seed, fnv1a64("scaling"));
    std::uint64_t index = 0;
    auto time_fit = [&](std::size_t n, std::size_t d) {
        const DataMatrix data = gen_gaussian(n, d, master.derive("data", index).stream_id());
        ++index;
        Row row{n, d, {}, 0.0};
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            const Model model = fit_model(data, config);
            const auto stop = std::chrono::steady_clock::now();
            (void)model;
            row.seconds.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::vector<double> sorted = row.seconds;
        std::sort(sorted.begin(), sorted.end());
        row.median = sorted[sorted.size() / 2];
        rows.push_back(row);
        std::cout << "N=" << n << " D=" << d << " median " << row.median << " s\n";
    };
    for (std::size_t d : dims) time_fit(5000, d);
    for (std::size_t n : sizes) time_fit(n, 32);

    json report;
    report["config_hash"] = config_hash_hex(config);
    report["master_seed"] = config.seed;
    report["repeats"] = repeats;
    json row_list = json::array();
    for (const Row& row : rows) {
        row_list.push_back({{"n", row.n},
                            {"d", row.d},
                            {"seconds", row.seconds},
                            {"median_seconds", row.median}});
    }
    report["rows"] = row_list;
    write_json(out_path, report);
    std::cout << "scaling sweep: " << rows.size() << " datasets -> " << out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// score-map

int run_score_map(const std::string& model_path, const std::string& train_csv,
                  const std::string& label_col, const std::string& bounds_str,
                  std::size_t resolution, const std::string& mode_flag,
                  const std::string& out_path) {
    const Model model = load_model(model_path);
    RunConfig config = model.config;
    if (!mode_flag.empty()) config.mode = scoring_mode_from_string(mode_flag);
    if (model.input_dim() != 2) {
        throw ConfigError("score-map: model must be trained on 2-D data");
    }
    CsvOptions csv;
    csv.label_column = label_col;
    const DataMatrix train = load_csv(train_csv, csv);
    const std::vector<double> train_scores = model.score(train, config.mode);

    Bounds2D bounds;
    if (bounds_str.empty()) {
        // Data bounding box plus a 20% margin.
        bounds.x_min = bounds.x_max = train.values(0, 0);
        bounds.y_min = bounds.y_max = train.values(0, 1);
        for (std::size_t i = 0; i < train.rows(); ++i) {
            bounds.x_min = std::min(bounds.x_min, train.values(i, 0));
            bounds.x_max = std::max(bounds.x_max, train.values(i, 0));
            bounds.y_min = std::min(bounds.y_min, train.values(i, 1));
            bounds.y_max = std::max(bounds.y_max, train.values(i, 1));
        }
        const double mx = 0.2 * (bounds.x_max - bounds.x_min);
        const double my = 0.2 * (bounds.y_max - bounds.y_min);
        bounds.x_min -= mx;
        bounds.x_max += mx;
        bounds.y_min -= my;
        bounds.y_max += my;
    } else {
        if (std::sscanf(bounds_str.c_str(), "%lf:%lf:%lf:%lf", &bounds.x_min, &bounds.x_max,
                        &bounds.y_min, &bounds.y_max) != 4) {
            throw ConfigError("score-map: --bounds must be xmin:xmax:ymin:ymax");
        }
    }

    auto scorer = [&](const Matrix& points) {
        DataMatrix d;
        d.values = points;
        return model.score(d, config.mode);
    };
    const ScoreMap map = score_map_grid(scorer, bounds, resolution, train_scores);

    {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << "# " << provenance_comment(config) << '\n';
        out << "x,y,score\n";
        for (std::size_t i = 0; i < map.scores.size(); ++i) {
            out << format_double(map.xs[i]) << ',' << format_double(map.ys[i]) << ','
                << format_double(map.scores[i]) << '\n';
        }
    }
    json sidecar;
    sidecar["contour_threshold"] = map.contour_threshold;
    sidecar["resolution"] = resolution;
    sidecar["bounds"] = {bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max};
    sidecar["mode"] = to_string(config.mode);
    sidecar["config_hash"] = config_hash_hex(config);
    sidecar["seed"] = config.seed;
    write_json(out_path + ".json", sidecar);
    std::cout << "score map " << resolution << "x" << resolution << " -> " << out_path
              << " (threshold " << map.contour_threshold << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const std::string& data_csv, const std::string& label_col,
               std::uint64_t seed, std::size_t trees, bool inject_mismatch,
               const std::string& out_path) {
    DataMatrix data;
    if (data_csv.empty()) {
        data = gen_ring({}, seed);
    } else {
        CsvOptions csv;
        csv.label_column = label_col;
        data = load_csv(data_csv, csv);
    }

    const IForestReductionReport iforest_report =
        verify_iforest_reduction(data, seed, trees, 256, inject_mismatch);
    const EifReductionReport eif_report = verify_eif_reduction(data, seed);

    json report;
    report["seed"] = seed;
    report["data"] = data_csv.empty() ? data.source : data_csv;
    report["trees"] = trees;
    report["inject_mismatch"] = inject_mismatch;
    report["iforest_max_diff"] = iforest_report.max_abs_score_diff;
    report["iforest_trees_equal"] = iforest_report.all_trees_equal;
    report["iforest_deviation_factor_diff"] = iforest_report.max_deviation_factor_diff;
    report["eif_predicate_agreement"] = eif_report.predicate_agreement();
    report["eif_triples_checked"] = eif_report.triples_checked;
    report["eif_decisions_checked"] = eif_report.decisions_checked;
    const bool pass = iforest_report.passed() && eif_report.passed();
    report["pass"] = pass;
    if (!out_path.empty()) write_json(out_path, report);
    std::cout << report.dump(2) << "\n";
    if (!pass) {
        std::cerr << "verification failed\n";
        return kExitVerify;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deepif: deep isolation forest anomaly detection"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: DEEPIF_THREADS or cores)");

    // gen
    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    gen->add_option("--kind", gen_args.kind, "ring|single-blob|two-blob|sinusoid|gauss");
    gen->add_option("--n", gen_args.n, "normal/object count");
    gen->add_option("--anomalies", gen_args.anomalies, "anomaly count (ring)");
    gen->add_option("--radius", gen_args.radius, "ring radius");
    gen->add_option("--thickness", gen_args.thickness, "ring thickness");
    gen->add_option("--noise", gen_args.noise, "blob/sinusoid noise");
    gen->add_option("--dims", gen_args.dims, "dimensions (gauss)");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--out", gen_args.out, "output CSV path")->required();

    // fit
    ConfigFlags fit_flags;
    std::string fit_train, fit_label, fit_out = "model.bin";
    CLI::App* fit = app.add_subcommand("fit", "fit a model and write the model file");
    fit_flags.add_to(fit);
    fit->add_option("train_csv", fit_train, "training data CSV")->required();
    fit->add_option("--label-col", fit_label, "label column to strip from features");
    fit->add_option("--out", fit_out, "output model path");

    // score
    std::string score_model, score_test, score_label, score_mode, score_out = "scores.csv";
    std::string score_jsonl, score_rep_out;
    std::size_t score_rep_member = 0;
    CLI::App* score = app.add_subcommand("score", "score a dataset with a fitted model");
    score->add_option("test_csv", score_test, "data to score")->required();
    score->add_option("--model", score_model, "model file")->required();
    score->add_option("--label-col", score_label, "label column to strip from features");
    score->add_option("--mode", score_mode, "deas|path-only (default: model config)");
    score->add_option("--out", score_out, "scores CSV path");
    score->add_option("--jsonl", score_jsonl, "also write JSON-lines scores here");
    score->add_option("--rep-out", score_rep_out, "dump one projected representation CSV");
    score->add_option("--rep-member", score_rep_member, "which member to dump");

    // eval
    std::string eval_scores, eval_data, eval_label = "label", eval_rep, eval_out = "metrics.json";
    std::uint64_t eval_seed = 42;
    CLI::App* eval = app.add_subcommand("eval", "compute metrics from scores and labels");
    eval->add_option("--scores", eval_scores, "scores CSV from `score`")->required();
    eval->add_option("--data", eval_data, "labeled data CSV")->required();
    eval->add_option("--label-col", eval_label, "label column name");
    eval->add_option("--rep", eval_rep, "labeled representation dump (enables AII)");
    eval->add_option("--seed", eval_seed, "AII sampling seed");
    eval->add_option("--out", eval_out, "metrics JSON path");

    // benchmark
    ConfigFlags bench_flags;
    std::string bench_suite = "ring", bench_out = "benchmark.json";
    std::size_t bench_seeds = 5;
    CLI::App* bench = app.add_subcommand("benchmark", "run a synthetic suite end to end");
    bench_flags.add_to(bench);
    bench->add_option("--suite", bench_suite, "ring|blobs|contamination");
    bench->add_option("--seeds", bench_seeds, "number of seeds");
    bench->add_option("--out", bench_out, "report JSON path");

    // scaling
    ConfigFlags scaling_flags;
    std::vector<std::size_t> scaling_sizes, scaling_dims;
    std::size_t scaling_repeats = 3;
    std::string scaling_out = "scaling.json";
    CLI::App* scaling = app.add_subcommand("scaling", "time fits over a size/dimension grid");
    scaling_flags.add_to(scaling);
    scaling->add_option("--sizes", scaling_sizes, "row counts (default 1000..256000 doubling)");
    scaling->add_option("--dims", scaling_dims, "dimensions (default 16..4096 doubling)");
    scaling->add_option("--repeats", scaling_repeats, "timed repetitions per dataset");
    scaling->add_option("--out", scaling_out, "report JSON path");

    // score-map
    std::string map_model, map_train, map_label, map_bounds, map_mode, map_out = "scoremap.csv";
    std::size_t map_resolution = 50;
    CLI::App* score_map = app.add_subcommand("score-map", "evaluate a model over a 2-D lattice");
    score_map->add_option("--model", map_model, "model file")->required();
    score_map->add_option("--train", map_train, "training CSV (for the contour threshold)")
        ->required();
    score_map->add_option("--label-col", map_label, "label column to strip");
    score_map->add_option("--bounds", map_bounds, "xmin:xmax:ymin:ymax (default: data box)");
    score_map->add_option("--resolution", map_resolution, "lattice resolution");
    score_map->add_option("--mode", map_mode, "deas|path-only");
    score_map->add_option("--out", map_out, "grid CSV path (sidecar .json added)");

    // verify
    std::string verify_data, verify_label, verify_out;
    std::uint64_t verify_seed = 42;
    std::size_t verify_trees = 100;
    bool verify_inject = false;
    CLI::App* verify = app.add_subcommand("verify", "run the reduction equivalence checks");
    verify->add_option("--data", verify_data, "dataset CSV (default: generated ring)");
    verify->add_option("--label-col", verify_label, "label column to strip");
    verify->add_option("--seed", verify_seed, "verification seed");
    verify->add_option("--trees", verify_trees, "trees for the iforest reduction");
    verify->add_flag("--inject-mismatch", verify_inject,
                     "self-test: corrupt one tree and expect failure");
    verify->add_option("--out", verify_out, "report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        apply_threads(threads);
        if (gen->parsed()) return run_gen(gen_args);
        if (fit->parsed()) return run_fit(fit_flags, fit_train, fit_label, fit_out);
        if (score->parsed()) {
            return run_score(score_model, score_test, score_label, score_mode, score_out,
                             score_jsonl, score_rep_out, score_rep_member);
        }
        if (eval->parsed()) {
            return run_eval(eval_scores, eval_data, eval_label, eval_rep, eval_seed, eval_out);
        }
        if (bench->parsed()) {
            return run_benchmark(bench_flags, bench_suite, bench_seeds, bench_out);
        }
        if (scaling->parsed()) {
            return run_scaling(scaling_flags, scaling_sizes, scaling_dims, scaling_repeats,
                               scaling_out);
        }
        if (score_map->parsed()) {
            return run_score_map(map_model, map_train, map_label, map_bounds, map_resolution,
                                 map_mode, map_out);
        }
        if (verify->parsed()) {
            return run_verify(verify_data, verify_label, verify_seed, verify_trees,
                              verify_inject, verify_out);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ShapeError& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return kExitShape;
    } catch (const MetricError& e) {
        std::cerr << "metric error: " << e.what() << "\n";
        return kExitMetric;
    } catch (const VerificationError& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return kExitVerify;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
