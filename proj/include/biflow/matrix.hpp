#pragma once

#include <cstddef>
#include <vector>

namespace biflow {

/// Dense row-major matrix of doubles. All numerics in this library are
/// 64-bit; rows/cols are fixed at construction.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, length rows*cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    bool all_finite() const;

    static Matrix zeros_like(const Matrix& m) { return Matrix(m.rows, m.cols); }
};

// C = A * B^T, A: m x k, B: n x k  ->  m x n.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// C = A * B, A: m x k, B: k x n  ->  m x n.
Matrix matmul_nn(const Matrix& a, const Matrix& b);

// C = A^T * B, A: m x k, B: m x n  ->  k x n.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

}  // namespace biflow
