#include "deepif/representation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "deepif/errors.hpp"

namespace deepif {

Matrix standardize(const Matrix& x, ColumnStats* out_stats) {
    if (x.empty()) throw ShapeError("standardize: empty matrix");
    const std::size_t n = x.rows(), d = x.cols();
    ColumnStats stats;
    stats.mean.assign(d, 0.0);
    stats.stddev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) stats.mean[j] += x(i, j);
    }
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = x(i, j) - stats.mean[j];
            stats.stddev[j] += dev * dev;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        stats.stddev[j] = std::sqrt(stats.stddev[j] / static_cast<double>(n));
    }
    if (out_stats) *out_stats = stats;
    return apply_standardize(x, stats);
}

Matrix apply_standardize(const Matrix& x, const ColumnStats& stats) {
    if (x.cols() != stats.cols()) {
        throw ShapeError("apply_standardize: column count differs from stats");
    }
    Matrix z(x.rows(), x.cols());
    const std::int64_t n = static_cast<std::int64_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double s = stats.stddev[j];
            z(static_cast<std::size_t>(i), j) =
                s > 0.0 ? (x(static_cast<std::size_t>(i), j) - stats.mean[j]) / s : 0.0;
        }
    }
    return z;
}

Matrix destandardize(const Matrix& z, const ColumnStats& stats) {
    if (z.cols() != stats.cols()) {
        throw ShapeError("destandardize: column count differs from stats");
    }
    Matrix x(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        for (std::size_t j = 0; j < z.cols(); ++j) {
            x(i, j) = z(i, j) * stats.stddev[j] + stats.mean[j];
        }
    }
    return x;
}

std::vector<std::size_t> default_hidden_dims(std::size_t input_dim) {
    return {std::max<std::size_t>(16, std::min<std::size_t>(500, input_dim))};
}

CereNetwork CereNetwork::random(std::size_t input_dim, const NetworkConfig& config,
                                std::size_t ensemble_size, const RngStream& master) {
    if (input_dim == 0 || config.output_dim == 0 || ensemble_size == 0) {
        throw ConfigError("network: dimensions and ensemble size must be >= 1");
    }
    for (std::size_t h : config.hidden_dims) {
        if (h == 0) throw ConfigError("network: hidden width must be >= 1");
    }

    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
    dims.push_back(config.output_dim);

    CereNetwork net;
    const std::size_t n_layers = dims.size() - 1;
    net.layers_.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        CereLayer layer;
        RngStream base_rng = master.derive("cere-base", l);
        layer.base_weights = sample_matrix(base_rng, dims[l], dims[l + 1], config.init);
        const RngStream layer_rng = master.derive("cere-layer", l);
        layer.p_vectors.resize(ensemble_size);
        layer.q_vectors.resize(ensemble_size);
        for (std::size_t i = 0; i < ensemble_size; ++i) {
            RngStream member_rng = layer_rng.derive("cere-member", i);
            layer.p_vectors[i].resize(dims[l]);
            for (double& v : layer.p_vectors[i]) {
                v = config.init.kind == Distribution::Kind::kStandardNormal
                        ? member_rng.normal()
                        : member_rng.uniform(-config.init.half_width, config.init.half_width);
            }
            layer.q_vectors[i].resize(dims[l + 1]);
            for (double& v : layer.q_vectors[i]) {
                v = config.init.kind == Distribution::Kind::kStandardNormal
                        ? member_rng.normal()
                        : member_rng.uniform(-config.init.half_width, config.init.half_width);
            }
        }
        layer.activation = config.activation;
        layer.apply_activation = l + 1 < n_layers;  // never after the last layer
        net.layers_.push_back(std::move(layer));
    }
    net.input_dim_ = input_dim;
    net.output_dim_ = config.output_dim;
    net.ensemble_size_ = ensemble_size;
    net.source_seed_ = master.seed();
    return net;
}

CereNetwork CereNetwork::from_layers(std::vector<CereLayer> layers,
                                     std::size_t ensemble_size,
                                     std::uint64_t source_seed) {
    if (layers.empty()) throw ConfigError("network: at least one layer required");
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        if (layers[l].out_dim() != layers[l + 1].in_dim()) {
            throw ShapeError("network: layer widths do not chain");
        }
    }
    for (const CereLayer& layer : layers) {
        if (layer.p_vectors.size() != ensemble_size ||
            layer.q_vectors.size() != ensemble_size) {
            throw ShapeError("network: member vector count differs from ensemble size");
        }
        for (const auto& p : layer.p_vectors) {
            if (p.size() != layer.in_dim()) throw ShapeError("network: p vector length");
        }
        for (const auto& q : layer.q_vectors) {
            if (q.size() != layer.out_dim()) throw ShapeError("network: q vector length");
        }
    }
    CereNetwork net;
    net.input_dim_ = layers.front().in_dim();
    net.output_dim_ = layers.back().out_dim();
    net.ensemble_size_ = ensemble_size;
    net.source_seed_ = source_seed;
    net.layers_ = std::move(layers);
    return net;
}

CereNetwork CereNetwork::identity(std::size_t dim) {
    CereLayer layer;
    layer.base_weights = Matrix::identity(dim);
    layer.p_vectors = {std::vector<double>(dim, 1.0)};
    layer.q_vectors = {std::vector<double>(dim, 1.0)};
    layer.apply_activation = false;
    return from_layers({std::move(layer)}, 1, 0);
}

namespace {

// Rows of x scaled elementwise by v (one vector broadcast down the rows).
Matrix scale_rows(const Matrix& x, const std::vector<double>& v) {
    Matrix y(x.rows(), x.cols());
    const std::int64_t n = static_cast<std::int64_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* src = x.data() + static_cast<std::size_t>(i) * x.cols();
        double* dst = y.data() + static_cast<std::size_t>(i) * x.cols();
        for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j] * v[j];
    }
    return y;
}

}  // namespace

Matrix CereNetwork::forward_member(const Matrix& x, std::size_t member) const {
    if (x.cols() != input_dim_) throw ShapeError("forward_member: input width mismatch");
    if (member >= ensemble_size_) {
        throw ShapeError("forward_member: member index " + std::to_string(member) +
                         " out of range (r=" + std::to_string(ensemble_size_) + ")");
    }
    Matrix h = x;
    for (const CereLayer& layer : layers_) {
        h = scale_rows(h, layer.p_vectors[member]);
        h = matmul(h, layer.base_weights);
        h = scale_rows(h, layer.q_vectors[member]);
        if (layer.apply_activation) h = apply_activation(h, layer.activation);
    }
    return h;
}

RepresentationSet CereNetwork::forward_ensemble(const Matrix& x,
                                                std::size_t batch_size) const {
    if (x.cols() != input_dim_) throw ShapeError("forward_ensemble: input width mismatch");
    if (batch_size == 0) throw ConfigError("forward_ensemble: batch size must be >= 1");

    RepresentationSet out;
    out.members.assign(ensemble_size_, Matrix(x.rows(), output_dim_));
    out.source_seed = source_seed_;
    out.n_rows = x.rows();
    out.input_dim = input_dim_;
    out.output_dim = output_dim_;
    out.ensemble_size = ensemble_size_;

    const std::size_t r = ensemble_size_;
    for (std::size_t start = 0; start < x.rows(); start += batch_size) {
        const std::size_t len = std::min(batch_size, x.rows() - start);

        // Tile the batch r times: block u holds the rows for member u.
        Matrix stacked(r * len, input_dim_);
        for (std::size_t u = 0; u < r; ++u) {
            for (std::size_t i = 0; i < len; ++i) {
                auto src = x.row(start + i);
                std::copy(src.begin(), src.end(), stacked.row(u * len + i).begin());
            }
        }

        for (const CereLayer& layer : layers_) {
            // Stacked Hadamard with the member p vectors, one shared matmul,
            // stacked Hadamard with the member q vectors.
            Matrix scaled(stacked.rows(), stacked.cols());
            const std::int64_t total_rows = static_cast<std::int64_t>(stacked.rows());
#pragma omp parallel for schedule(static)
            for (std::int64_t row = 0; row < total_rows; ++row) {
                const std::size_t u = static_cast<std::size_t>(row) / len;
                const std::vector<double>& p = layer.p_vectors[u];
                const double* src = stacked.data() + static_cast<std::size_t>(row) * stacked.cols();
                double* dst = scaled.data() + static_cast<std::size_t>(row) * stacked.cols();
                for (std::size_t j = 0; j < stacked.cols(); ++j) dst[j] = src[j] * p[j];
            }
            Matrix mapped = matmul(scaled, layer.base_weights);
            const std::int64_t mapped_rows = static_cast<std::int64_t>(mapped.rows());
#pragma omp parallel for schedule(static)
            for (std::int64_t row = 0; row < mapped_rows; ++row) {
                const std::size_t u = static_cast<std::size_t>(row) / len;
                const std::vector<double>& q = layer.q_vectors[u];
                double* dst = mapped.data() + static_cast<std::size_t>(row) * mapped.cols();
                for (std::size_t j = 0; j < mapped.cols(); ++j) dst[j] *= q[j];
            }
            if (layer.apply_activation) mapped = apply_activation(mapped, layer.activation);
            stacked = std::move(mapped);
        }

        for (std::size_t u = 0; u < r; ++u) {
            for (std::size_t i = 0; i < len; ++i) {
                auto src = stacked.row(u * len + i);
                std::copy(src.begin(), src.end(), out.members[u].row(start + i).begin());
            }
        }
    }
    return out;
}

RepresentationSet serial::forward_ensemble(const CereNetwork& net, const Matrix& x) {
    RepresentationSet out;
    out.members.reserve(net.ensemble_size());
    for (std::size_t u = 0; u < net.ensemble_size(); ++u) {
        out.members.push_back(net.forward_member(x, u));
    }
    out.source_seed = net.source_seed();
    out.n_rows = x.rows();
    out.input_dim = net.input_dim();
    out.output_dim = net.output_dim();
    out.ensemble_size = net.ensemble_size();
    return out;
}

}  // namespace deepif
