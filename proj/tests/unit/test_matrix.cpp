#include <doctest.h>

#include <cmath>

#include "deepif/errors.hpp"
#include "deepif/matrix.hpp"
#include "deepif/rng.hpp"

using namespace deepif;

namespace {

// Independent triple-loop oracle (ijk order, explicit accumulator).
Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
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

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.same_shape(b));
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    return sample_matrix(rng, rows, cols, Distribution::standard_normal());
}

}  // namespace

TEST_CASE("matmul identity and 1x1 basics") {
    const Matrix i2 = Matrix::identity(2);
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(matmul(i2, a) == a);

    const Matrix row = Matrix::from_rows({{1, 2}});
    const Matrix col = Matrix::from_rows({{3}, {4}});
    const Matrix prod = matmul(row, col);
    CHECK(prod.rows() == 1);
    CHECK(prod.cols() == 1);
    CHECK(prod(0, 0) == 11.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
    RngStream rng(11, 0);
    const Matrix a = random_matrix(5, 7, rng);
    const Matrix b = random_matrix(7, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), matmul_oracle(a, b)) <= 1e-12);
}

TEST_CASE("matmul oracle property holds up to 64x64") {
    RngStream rng(12, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng.below(64);
        const std::size_t k = 1 + rng.below(64);
        const std::size_t n = 1 + rng.below(64);
        const Matrix a = random_matrix(m, k, rng);
        const Matrix b = random_matrix(k, n, rng);
        const Matrix fast = matmul(a, b);
        const Matrix slow = matmul_oracle(a, b);
        double scale = 0.0;
        for (std::size_t i = 0; i < slow.size(); ++i) {
            scale = std::max(scale, std::abs(slow.data()[i]));
        }
        REQUIRE(max_abs_diff(fast, slow) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("parallel matmul equals the serial reference bit for bit") {
    RngStream rng(13, 0);
    const Matrix a = random_matrix(33, 21, rng);
    const Matrix b = random_matrix(21, 17, rng);
    CHECK(matmul(a, b) == serial::matmul(a, b));
}

TEST_CASE("matmul rejects mismatched shapes") {
    const Matrix a(2, 3);
    const Matrix b(2, 3);
    CHECK_THROWS_AS(matmul(a, b), ShapeError);
}

TEST_CASE("hadamard basics and commutativity") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix ones = Matrix::from_rows({{1, 1}, {1, 1}});
    CHECK(hadamard(a, ones) == a);

    const Matrix u = Matrix::from_rows({{2, 0}});
    const Matrix v = Matrix::from_rows({{3, 5}});
    CHECK(hadamard(u, v) == Matrix::from_rows({{6, 0}}));

    RngStream rng(14, 0);
    const Matrix x = random_matrix(4, 4, rng);
    const Matrix y = random_matrix(4, 4, rng);
    const Matrix xy = hadamard(x, y);
    CHECK(xy == hadamard(y, x));
    // Elementwise oracle, exact.
    for (std::size_t i = 0; i < x.size(); ++i) {
        REQUIRE(xy.data()[i] == x.data()[i] * y.data()[i]);
    }
    CHECK_THROWS_AS(hadamard(x, Matrix(4, 5)), ShapeError);
}

TEST_CASE("activation examples") {
    const Matrix x = Matrix::from_rows({{-1, 2}});
    const Matrix r = apply_activation(x, {Activation::kRelu});
    CHECK(r == Matrix::from_rows({{0, 2}}));

    const Matrix z = apply_activation(Matrix::from_rows({{0}}), {Activation::kTanh});
    CHECK(z(0, 0) == 0.0);

    const Matrix leaky =
        apply_activation(Matrix::from_rows({{-100}}), {Activation::kLeakyRelu, 0.01});
    CHECK(leaky(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("activations are monotone non-decreasing") {
    RngStream rng(15, 0);
    for (ActivationSpec spec : {ActivationSpec{Activation::kTanh},
                                ActivationSpec{Activation::kRelu},
                                ActivationSpec{Activation::kLeakyRelu, 0.01}}) {
        Matrix x(1, 200);
        double v = -10.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            v += rng.uniform(0.0, 0.2);
            x(0, j) = v;
        }
        const Matrix y = apply_activation(x, spec);
        for (std::size_t j = 1; j < y.cols(); ++j) REQUIRE(y(0, j) >= y(0, j - 1));
    }
}

TEST_CASE("sample_matrix determinism and support") {
    RngStream a(7, 0), b(7, 0);
    CHECK(sample_matrix(a, 2, 2, Distribution::standard_normal()) ==
          sample_matrix(b, 2, 2, Distribution::standard_normal()));

    RngStream u(8, 0);
    const Matrix m = sample_matrix(u, 100, 10, Distribution::uniform(1.0));
    for (std::size_t i = 0; i < m.size(); ++i) {
        REQUIRE(m.data()[i] >= -1.0);
        REQUIRE(m.data()[i] <= 1.0);
    }
}

TEST_CASE("sample mean of many standard-normal draws is near zero") {
    RngStream rng(9, 0);
    const Matrix m = sample_matrix(rng, 1000, 1000, Distribution::standard_normal());
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) sum += m.data()[i];
    CHECK(std::abs(sum / static_cast<double>(m.size())) < 0.01);
}
