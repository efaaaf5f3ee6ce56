#include "deepif/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "deepif/errors.hpp"

namespace deepif {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("from_rows: ragged initializer");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

void check_matmul_shapes(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ (" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b);
    Matrix c(a.rows(), b.cols());
    const std::int64_t m = static_cast<std::int64_t>(a.rows());
    const std::size_t k_dim = a.cols();
    const std::size_t n = b.cols();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        double* ci = c.data() + static_cast<std::size_t>(i) * n;
        const double* ai = a.data() + static_cast<std::size_t>(i) * k_dim;
        for (std::size_t k = 0; k < k_dim; ++k) {
            const double aik = ai[k];
            const double* bk = b.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix serial::matmul(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b);
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("hadamard: shapes differ");
    Matrix c(a.rows(), a.cols());
    const std::int64_t total = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) {
        c.data()[i] = a.data()[i] * b.data()[i];
    }
    return c;
}

Matrix apply_activation(const Matrix& x, const ActivationSpec& act) {
    Matrix y(x.rows(), x.cols());
    const std::int64_t total = static_cast<std::int64_t>(x.size());
    switch (act.kind) {
        case Activation::kTanh:
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < total; ++i) y.data()[i] = std::tanh(x.data()[i]);
            break;
        case Activation::kRelu:
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < total; ++i) {
                const double v = x.data()[i];
                y.data()[i] = v > 0.0 ? v : 0.0;
            }
            break;
        case Activation::kLeakyRelu:
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < total; ++i) {
                const double v = x.data()[i];
                y.data()[i] = v > 0.0 ? v : act.alpha * v;
            }
            break;
    }
    return y;
}

Matrix sample_matrix(RngStream& rng, std::size_t rows, std::size_t cols,
                     const Distribution& dist) {
    Matrix m(rows, cols);
    // Draw order is row-major and sequential on the caller's stream.
    if (dist.kind == Distribution::Kind::kStandardNormal) {
        for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    } else {
        for (std::size_t i = 0; i < m.size(); ++i) {
            m.data()[i] = rng.uniform(-dist.half_width, dist.half_width);
        }
    }
    return m;
}

}  // namespace deepif
