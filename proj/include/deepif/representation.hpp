#pragma once

#include <cstdint>
#include <vector>

#include "deepif/matrix.hpp"
#include "deepif/rng.hpp"

namespace deepif {

/// Per-column standardization statistics (population mean / stddev).
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // 0 for constant columns

    std::size_t cols() const { return mean.size(); }
};

/// Compute per-column stats of x and return the standardized matrix.
/// Constant columns map to all-zero columns.
Matrix standardize(const Matrix& x, ColumnStats* out_stats);

/// Transform held-out data with previously computed training stats.
Matrix apply_standardize(const Matrix& x, const ColumnStats& stats);

/// Inverse of apply_standardize (constant columns are restored to their mean).
Matrix destandardize(const Matrix& z, const ColumnStats& stats);

/// One fully-connected layer shared by all r ensemble members.
///
/// The member weight W_i = base ∘ (p_i q_iᵀ) is never materialised; forward
/// passes use the rank-one factored form instead.
struct CereLayer {
    Matrix base_weights;                         // m x n
    std::vector<std::vector<double>> p_vectors;  // r vectors of length m
    std::vector<std::vector<double>> q_vectors;  // r vectors of length n
    ActivationSpec activation;
    bool apply_activation = true;  // activation after this layer's output

    std::size_t in_dim() const { return base_weights.rows(); }
    std::size_t out_dim() const { return base_weights.cols(); }
};

/// The r projected datasets produced by one ensemble forward pass.
struct RepresentationSet {
    std::vector<Matrix> members;  // r matrices, each N x d
    std::uint64_t source_seed = 0;
    std::size_t n_rows = 0;
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::size_t ensemble_size = 0;
};

struct NetworkConfig {
    std::vector<std::size_t> hidden_dims;  // empty => single linear layer
    std::size_t output_dim = 16;
    ActivationSpec activation;  // applied between layers, never after the last
    Distribution init = Distribution::standard_normal();
};

/// Default hidden layout for tabular data: one layer of width
/// max(16, min(500, input_dim)).
std::vector<std::size_t> default_hidden_dims(std::size_t input_dim);

/// Ensemble of r random feature maps sharing base weights per layer and
/// differing by per-member rank-one perturbations. Parameters are frozen at
/// construction; all methods are const and safe to call concurrently.
class CereNetwork {
public:
    /// Randomly initialised network. Base weights draw from the stream
    /// derived as (master, "cere-base", layer); member vectors from
    /// (master, "cere-layer", layer) -> ("cere-member", member), so adding
    /// members never perturbs earlier members' parameters.
    static CereNetwork random(std::size_t input_dim, const NetworkConfig& config,
                              std::size_t ensemble_size, const RngStream& master);

    /// Network with explicitly supplied layers (reduction harnesses, tests).
    static CereNetwork from_layers(std::vector<CereLayer> layers,
                                   std::size_t ensemble_size,
                                   std::uint64_t source_seed);

    /// Single linear layer with identity weights and all-ones perturbations:
    /// the configuration whose output equals its input exactly.
    static CereNetwork identity(std::size_t dim);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    std::size_t ensemble_size() const { return ensemble_size_; }
    std::uint64_t source_seed() const { return source_seed_; }
    const std::vector<CereLayer>& layers() const { return layers_; }

    /// Sequential reference pass for a single ensemble member: per layer,
    /// rows map through baseᵀ(x ∘ p_i) ∘ q_i with the configured activation
    /// between layers. This is the oracle the batched path must reproduce.
    Matrix forward_member(const Matrix& x, std::size_t member) const;

    /// Batched ensemble pass: per mini-batch the input is tiled r times,
    /// Hadamard-scaled by the stacked p vectors, multiplied once by the
    /// shared base weights, then Hadamard-scaled by the stacked q vectors.
    /// Member-wise results equal forward_member for every member.
    RepresentationSet forward_ensemble(const Matrix& x, std::size_t batch_size) const;

private:
    CereNetwork() = default;

    std::vector<CereLayer> layers_;
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::size_t ensemble_size_ = 0;
    std::uint64_t source_seed_ = 0;
};

namespace serial {

/// Reference ensemble pass: r independent forward_member calls.
RepresentationSet forward_ensemble(const CereNetwork& net, const Matrix& x);

}  // namespace serial

}  // namespace deepif
