#pragma once

#include <cstddef>
#include <vector>

namespace post {

// Dense row-major matrix of doubles.  Just enough for gate schedules and
// scan inputs; heavy linear algebra goes through Eigen where needed.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

// L x N x d tensor, row-major over (i, j, k).
struct Tensor3 {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t a, std::size_t b, std::size_t c, double fill = 0.0)
        : n0(a), n1(b), n2(c), data(a * b * c, fill) {}

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * n1 + j) * n2 + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * n1 + j) * n2 + k];
    }
};

}  // namespace post
