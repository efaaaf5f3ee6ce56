#include "deepif/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "deepif/errors.hpp"
#include "deepif/rng.hpp"

namespace deepif {

std::size_t DataMatrix::anomaly_count() const {
    std::size_t c = 0;
    for (int l : labels) c += l != 0;
    return c;
}

namespace {

// One CSV record, honoring quoted fields ("" escapes a quote).
std::vector<std::string> split_record(const std::string& line, char delimiter,
                                      std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw ParseError("csv: unterminated quote on line " + std::to_string(line_no));
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

DataMatrix load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    std::size_t line_no = 0;
    // Leading '#' lines carry provenance comments; skip them.
    do {
        if (!std::getline(in, line)) throw ParseError("csv: " + path + " is empty");
        ++line_no;
    } while (!line.empty() && line[0] == '#');
    std::vector<std::string> header = split_record(line, options.delimiter, line_no);
    for (std::string& h : header) h = trimmed(h);

    std::size_t label_idx = header.size();
    if (!options.label_column.empty()) {
        auto it = std::find(header.begin(), header.end(), options.label_column);
        if (it == header.end()) {
            throw ParseError("csv: label column '" + options.label_column +
                             "' not found in " + path);
        }
        label_idx = static_cast<std::size_t>(it - header.begin());
    }
    const std::size_t n_features = header.size() - (label_idx < header.size() ? 1 : 0);
    if (n_features == 0) throw ParseError("csv: no feature columns in " + path);

    std::vector<double> flat;
    std::vector<int> labels;
    // Missing-cell coordinates recorded for optional mean imputation.
    std::vector<std::pair<std::size_t, std::size_t>> missing;  // (flat row, feature col)
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields = split_record(line, options.delimiter, line_no);
        if (fields.size() != header.size()) {
            throw ParseError("csv: row " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        std::size_t feat = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string cell = trimmed(fields[c]);
            if (c == label_idx) {
                if (cell != "0" && cell != "1") {
                    throw ParseError("csv: row " + std::to_string(line_no) + " column " +
                                     std::to_string(c + 1) + ": label must be 0 or 1, got '" +
                                     cell + "'");
                }
                labels.push_back(cell == "1" ? 1 : 0);
                continue;
            }
            double value = 0.0;
            bool bad = cell.empty();
            if (!bad) {
                const char* first = cell.data();
                const char* last = cell.data() + cell.size();
                auto [ptr, ec] = std::from_chars(first, last, value);
                bad = ec != std::errc() || ptr != last;
            }
            if (!bad && !std::isfinite(value)) bad = true;
            if (bad) {
                if (options.impute_missing) {
                    missing.emplace_back(n_rows, feat);
                    flat.push_back(0.0);
                } else {
                    throw ParseError("csv: row " + std::to_string(line_no) + " column " +
                                     std::to_string(c + 1) + ": cannot parse '" + cell +
                                     "' as a finite number");
                }
            } else {
                flat.push_back(value);
            }
            ++feat;
        }
        ++n_rows;
    }
    if (n_rows == 0) throw ParseError("csv: " + path + " has no data rows");

    DataMatrix out;
    out.values = Matrix(n_rows, n_features);
    std::copy(flat.begin(), flat.end(), out.values.data());
    if (!missing.empty()) {
        // Column means over present cells.
        std::vector<double> sums(n_features, 0.0);
        std::vector<std::size_t> counts(n_features, 0);
        std::vector<std::vector<bool>> is_missing(n_rows, std::vector<bool>(n_features, false));
        for (auto [r, c] : missing) is_missing[r][c] = true;
        for (std::size_t i = 0; i < n_rows; ++i) {
            for (std::size_t j = 0; j < n_features; ++j) {
                if (!is_missing[i][j]) {
                    sums[j] += out.values(i, j);
                    ++counts[j];
                }
            }
        }
        for (auto [r, c] : missing) {
            out.values(r, c) = counts[c] > 0 ? sums[c] / static_cast<double>(counts[c]) : 0.0;
        }
    }
    out.labels = std::move(labels);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_idx) out.feature_names.push_back(header[c]);
    }
    out.source = path;
    return out;
}

void save_csv(const DataMatrix& data, const std::string& path, char delimiter,
              const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    if (!comment.empty()) out << "# " << comment << '\n';
    for (std::size_t j = 0; j < data.cols(); ++j) {
        if (j) out << delimiter;
        out << (j < data.feature_names.size() ? data.feature_names[j]
                                              : "f" + std::to_string(j));
    }
    if (data.has_labels()) out << delimiter << "label";
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            if (j) out << delimiter;
            std::snprintf(buf, sizeof(buf), "%.17g", data.values(i, j));
            out << buf;
        }
        if (data.has_labels()) out << delimiter << data.labels[i];
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

DataMatrix gen_ring(const RingParams& params, std::uint64_t seed) {
    if (params.n_normal == 0 || params.n_anomaly == 0) {
        throw ConfigError("gen_ring: counts must be >= 1");
    }
    RngStream rng(seed, fnv1a64("ring"));
    DataMatrix out;
    out.values = Matrix(params.n_normal + params.n_anomaly, 2);
    out.labels.assign(params.n_normal + params.n_anomaly, 0);
    for (std::size_t i = 0; i < params.n_normal; ++i) {
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double offset;
        do {
            offset = rng.normal() * params.thickness;
        } while (std::abs(offset) > 3.0 * params.thickness);
        const double rad = params.radius + offset;
        out.values(i, 0) = rad * std::cos(angle);
        out.values(i, 1) = rad * std::sin(angle);
    }
    // Central cluster kept strictly inside the ring's inner envelope.
    const double limit = params.radius - 4.0 * params.thickness;
    const double spread = params.radius / 10.0;
    for (std::size_t i = 0; i < params.n_anomaly; ++i) {
        double x, y;
        do {
            x = rng.normal() * spread;
            y = rng.normal() * spread;
        } while (std::hypot(x, y) >= limit);
        out.values(params.n_normal + i, 0) = x;
        out.values(params.n_normal + i, 1) = y;
        out.labels[params.n_normal + i] = 1;
    }
    out.feature_names = {"x", "y"};
    std::ostringstream src;
    src << "ring(n_normal=" << params.n_normal << ",n_anomaly=" << params.n_anomaly
        << ",radius=" << params.radius << ",thickness=" << params.thickness
        << ",seed=" << seed << ")";
    out.source = src.str();
    return out;
}

DataMatrix gen_blobs(BlobKind kind, std::size_t n, double noise, std::uint64_t seed) {
    if (n == 0) throw ConfigError("gen_blobs: n must be >= 1");
    RngStream rng(seed, fnv1a64("blobs"));
    DataMatrix out;
    out.values = Matrix(n, 2);
    out.feature_names = {"x", "y"};
    switch (kind) {
        case BlobKind::kSingleBlob:
            for (std::size_t i = 0; i < n; ++i) {
                out.values(i, 0) = rng.normal() * noise;
                out.values(i, 1) = rng.normal() * noise;
            }
            out.source = "single-blob";
            break;
        case BlobKind::kTwoBlob: {
            const double c = 2.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double sign = i < n / 2 ? -1.0 : 1.0;
                out.values(i, 0) = sign * c + rng.normal() * noise;
                out.values(i, 1) = sign * c + rng.normal() * noise;
            }
            out.source = "two-blob";
            break;
        }
        case BlobKind::kSinusoid:
            for (std::size_t i = 0; i < n; ++i) {
                const double x = rng.uniform(0.0, 2.0 * std::numbers::pi);
                out.values(i, 0) = x;
                out.values(i, 1) = std::sin(x) + rng.normal() * noise;
            }
            out.source = "sinusoid";
            break;
        default:
            throw ConfigError("gen_blobs: unknown kind");
    }
    out.source += "(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")";
    return out;
}

DataMatrix gen_gaussian(std::size_t n, std::size_t dims, std::uint64_t seed) {
    if (n == 0 || dims == 0) throw ConfigError("gen_gaussian: shape must be >= 1x1");
    RngStream rng(seed, fnv1a64("gaussian"));
    DataMatrix out;
    out.values = sample_matrix(rng, n, dims, Distribution::standard_normal());
    out.source = "gaussian(" + std::to_string(n) + "x" + std::to_string(dims) +
                 ",seed=" + std::to_string(seed) + ")";
    return out;
}

std::vector<DataMatrix> gen_scaling_suite(std::vector<std::size_t> sizes,
                                          std::vector<std::size_t> dims,
                                          std::uint64_t seed) {
    if (dims.empty()) {
        for (std::size_t d = 16; d <= 4096; d *= 2) dims.push_back(d);
    }
    if (sizes.empty()) {
        for (std::size_t n = 1000; n <= 256000; n *= 2) sizes.push_back(n);
    }
    std::vector<DataMatrix> suite;
    suite.reserve(dims.size() + sizes.size());
    std::uint64_t index = 0;
    for (std::size_t d : dims) {
        suite.push_back(gen_gaussian(5000, d, RngStream(seed, 0).derive("scaling", index).stream_id()));
        ++index;
    }
    for (std::size_t n : sizes) {
        suite.push_back(gen_gaussian(n, 32, RngStream(seed, 0).derive("scaling", index).stream_id()));
        ++index;
    }
    return suite;
}

DataMatrix adjust_contamination(const DataMatrix& data, double rho, std::uint64_t seed) {
    if (!data.has_labels()) throw ConfigError("adjust_contamination: data must be labeled");
    if (!(rho >= 0.0 && rho <= 0.10)) {
        throw ConfigError("adjust_contamination: rho must lie in [0, 0.10]");
    }
    std::vector<std::size_t> anomaly_rows;
    std::size_t n_normal = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        if (data.labels[i]) {
            anomaly_rows.push_back(i);
        } else {
            ++n_normal;
        }
    }
    const std::size_t target =
        static_cast<std::size_t>(std::llround(rho / (1.0 - rho) * static_cast<double>(n_normal)));
    if (target > anomaly_rows.size() && anomaly_rows.empty()) {
        throw ConfigError("adjust_contamination: cannot inject, no anomalies to duplicate");
    }

    RngStream rng(seed, fnv1a64("contamination"));
    std::vector<bool> keep(data.rows(), true);
    if (anomaly_rows.size() > target) {
        // Random subset of anomalies survives; order-preserving removal.
        std::vector<std::size_t> pool = anomaly_rows;
        for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
            const std::size_t j = i + rng.below(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        for (std::size_t i = target; i < pool.size(); ++i) keep[pool[i]] = false;
    }

    std::size_t n_extra = anomaly_rows.size() < target ? target - anomaly_rows.size() : 0;

    // Jitter scale: 1% of each feature's spread.
    std::vector<double> jitter(data.cols(), 0.0);
    if (n_extra > 0) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < data.rows(); ++i) mean += data.values(i, j);
            mean /= static_cast<double>(data.rows());
            double var = 0.0;
            for (std::size_t i = 0; i < data.rows(); ++i) {
                const double dev = data.values(i, j) - mean;
                var += dev * dev;
            }
            jitter[j] = 0.01 * std::sqrt(var / static_cast<double>(data.rows()));
        }
    }

    DataMatrix out;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) kept += keep[i];
    out.values = Matrix(kept + n_extra, data.cols());
    out.labels.reserve(kept + n_extra);
    std::size_t row = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        if (!keep[i]) continue;
        std::copy(data.values.row(i).begin(), data.values.row(i).end(),
                  out.values.row(row).begin());
        out.labels.push_back(data.labels[i]);
        ++row;
    }
    for (std::size_t e = 0; e < n_extra; ++e) {
        const std::size_t src = anomaly_rows[rng.below(anomaly_rows.size())];
        for (std::size_t j = 0; j < data.cols(); ++j) {
            out.values(row, j) = data.values(src, j) + rng.normal() * jitter[j];
        }
        out.labels.push_back(1);
        ++row;
    }
    out.feature_names = data.feature_names;
    std::ostringstream src_desc;
    src_desc << data.source << ";contamination(rho=" << rho << ",seed=" << seed << ")";
    out.source = src_desc.str();
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ScoreMap score_map_grid(const std::function<std::vector<double>(const Matrix&)>& scorer,
                        const Bounds2D& bounds, std::size_t resolution,
                        const std::vector<double>& training_scores) {
    if (resolution < 2) throw ConfigError("score_map_grid: resolution must be >= 2");
    ScoreMap map;
    map.resolution = resolution;
    Matrix lattice(resolution * resolution, 2);
    for (std::size_t yi = 0; yi < resolution; ++yi) {
        const double y = bounds.y_min + (bounds.y_max - bounds.y_min) *
                                            static_cast<double>(yi) /
                                            static_cast<double>(resolution - 1);
        for (std::size_t xi = 0; xi < resolution; ++xi) {
            const double x = bounds.x_min + (bounds.x_max - bounds.x_min) *
                                                static_cast<double>(xi) /
                                                static_cast<double>(resolution - 1);
            const std::size_t idx = yi * resolution + xi;
            lattice(idx, 0) = x;
            lattice(idx, 1) = y;
            map.xs.push_back(x);
            map.ys.push_back(y);
        }
    }
    map.scores = scorer(lattice);
    if (map.scores.size() != lattice.rows()) {
        throw ShapeError("score_map_grid: scorer returned wrong count");
    }
    map.contour_threshold = percentile(training_scores, 0.99);
    return map;
}

}  // namespace deepif
