#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "deepif/matrix.hpp"

namespace deepif {

/// N x D table of real features with optional binary anomaly labels.
struct DataMatrix {
    Matrix values;
    std::vector<int> labels;  // empty when unlabeled; otherwise one {0,1} per row
    std::vector<std::string> feature_names;
    std::string source;

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
    bool has_labels() const { return !labels.empty(); }
    std::size_t anomaly_count() const;
};

struct CsvOptions {
    char delimiter = ',';
    std::string label_column;    // empty => no label extraction
    bool impute_missing = false; // false => reject NaN / empty cells
};

/// Parse a headered CSV of numeric columns. Lines starting with '#' are
/// provenance comments and are skipped. The label column, when named, is
/// removed from the features and parsed as {0,1}. Ragged rows, non-numeric or
/// non-finite cells raise ParseError with 1-based row/column coordinates
/// (unless impute_missing is set, in which case missing cells take the
/// column mean).
DataMatrix load_csv(const std::string& path, const CsvOptions& options = {});

/// Write values (and the label column, when present) with enough digits to
/// round-trip doubles exactly. A non-empty comment becomes a leading '#' line.
void save_csv(const DataMatrix& data, const std::string& path, char delimiter = ',',
              const std::string& comment = "");

struct RingParams {
    std::size_t n_normal = 800;
    std::size_t n_anomaly = 30;
    double radius = 1.0;
    double thickness = 0.05;
};

/// 2-D labeled dataset: normal points on a ring of the given radius (radial
/// noise truncated at 3 sigma), anomalies clustered at the centre, strictly
/// inside radius - 3*thickness. No single axis-parallel cut separates the
/// anomalies from the normals.
DataMatrix gen_ring(const RingParams& params, std::uint64_t seed);

enum class BlobKind { kSingleBlob, kTwoBlob, kSinusoid };

/// 2-D unlabeled point clouds: one isotropic Gaussian at the origin, two
/// separated Gaussians at (-2,-2) and (2,2), or one sine period with
/// vertical noise.
DataMatrix gen_blobs(BlobKind kind, std::size_t n, double noise, std::uint64_t seed);

/// Unlabeled standard-normal dataset of the given shape.
DataMatrix gen_gaussian(std::size_t n, std::size_t dims, std::uint64_t seed);

/// Gaussian datasets at each grid point: one per dim at n_at_dims rows, then
/// one per size at d_at_sizes columns. Defaults follow the scalability
/// protocol: dims 16..4096 doubling at N=5000, sizes 1000..256000 doubling
/// at D=32 (18 datasets).
std::vector<DataMatrix> gen_scaling_suite(std::vector<std::size_t> sizes = {},
                                          std::vector<std::size_t> dims = {},
                                          std::uint64_t seed = 42);

/// Re-target the anomaly ratio to rho (0..0.10): surplus anomalies are
/// removed at random; missing ones are appended as jittered duplicates of
/// random existing anomalies. Normal rows are never touched.
DataMatrix adjust_contamination(const DataMatrix& data, double rho, std::uint64_t seed);

struct Bounds2D {
    double x_min = -1.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;
};

struct ScoreMap {
    std::size_t resolution = 0;
    std::vector<double> xs;      // resolution^2 entries, row-major over (y, x)
    std::vector<double> ys;
    std::vector<double> scores;
    double contour_threshold = 0.0;  // 99th percentile of the training scores
};

/// Evaluate a scorer over a resolution x resolution lattice spanning bounds.
/// The scorer maps a k x 2 matrix of points to k scores.
ScoreMap score_map_grid(const std::function<std::vector<double>(const Matrix&)>& scorer,
                        const Bounds2D& bounds, std::size_t resolution,
                        const std::vector<double>& training_scores);

/// Linear-interpolation percentile of a sample, q in [0, 1].
double percentile(std::vector<double> values, double q);

}  // namespace deepif
