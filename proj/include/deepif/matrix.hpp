#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "deepif/rng.hpp"

namespace deepif {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Activation { kTanh, kRelu, kLeakyRelu };

struct ActivationSpec {
    Activation kind = Activation::kTanh;
    double alpha = 0.01;  // leaky-relu slope for x < 0
};

struct Distribution {
    enum class Kind { kStandardNormal, kUniform };
    Kind kind = Kind::kStandardNormal;
    double half_width = 1.0;  // uniform support is (-half_width, half_width)

    static Distribution standard_normal() { return {Kind::kStandardNormal, 1.0}; }
    static Distribution uniform(double a) { return {Kind::kUniform, a}; }
};

/// a (m x k) times b (k x n). Parallelized over output rows; every output
/// element accumulates over k in ascending order, so results are bitwise
/// independent of the thread count and identical to serial::matmul.
Matrix matmul(const Matrix& a, const Matrix& b);

/// Elementwise product; shapes must match.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Elementwise activation; output shape equals input shape.
Matrix apply_activation(const Matrix& x, const ActivationSpec& act);

/// Matrix of i.i.d. draws from dist; deterministic given the stream.
Matrix sample_matrix(RngStream& rng, std::size_t rows, std::size_t cols,
                     const Distribution& dist);

namespace serial {

/// Plain triple-loop reference kept for testing and benchmarking the
/// parallel kernel against.
Matrix matmul(const Matrix& a, const Matrix& b);

}  // namespace serial

}  // namespace deepif
