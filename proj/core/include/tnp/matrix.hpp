#pragma once

#include <cstddef>
#include <vector>

namespace tnp {

/// Dense column-major matrix of doubles. Thin container shared by the tensor
/// and linear-algebra layers; heavier decompositions live in linalg.hpp.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    /// Pointer to the start of column j (columns are contiguous).
    double* col(std::size_t j) { return data_.data() + j * rows_; }
    const double* col(std::size_t j) const { return data_.data() + j * rows_; }

    bool same_size(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

/// a * a^T, returned exactly symmetric.
Matrix gram_left(const Matrix& a);

/// a^T * a, returned exactly symmetric.
Matrix gram_right(const Matrix& a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// y += alpha * x over n contiguous doubles.
inline void axpy(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace tnp
