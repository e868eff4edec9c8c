#include "tnp/matrix.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tnp {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("matrix data length does not match rows*cols");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix multiply: inner dimensions differ");
    }
    Matrix c(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    for (std::size_t j = 0; j < n; ++j) {
        double* cj = c.col(j);
        for (std::size_t t = 0; t < k; ++t) {
            axpy(cj, b(t, j), a.col(t), m);
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_size(b)) throw std::invalid_argument("matrix add: size mismatch");
    Matrix c = a;
    const double* bp = b.data();
    double* cp = c.data();
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) cp[i] += bp[i];
    return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    if (!a.same_size(b)) throw std::invalid_argument("matrix subtract: size mismatch");
    Matrix c = a;
    const double* bp = b.data();
    double* cp = c.data();
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) cp[i] -= bp[i];
    return c;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix c = a;
    double* cp = c.data();
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) cp[i] *= factor;
    return c;
}

Matrix gram_left(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Matrix g(m, m);
    for (std::size_t t = 0; t < n; ++t) {
        const double* at = a.col(t);
        for (std::size_t j = 0; j < m; ++j) {
            const double ajt = at[j];
            if (ajt == 0.0) continue;
            double* gj = g.col(j);
            for (std::size_t i = j; i < m; ++i) gj[i] += at[i] * ajt;
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = j + 1; i < m; ++i) g(j, i) = g(i, j);
    return g;
}

Matrix gram_right(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Matrix g(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* aj = a.col(j);
        for (std::size_t i = j; i < n; ++i) {
            const double* ai = a.col(i);
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t) s += ai[t] * aj[t];
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) s += p[i] * p[i];
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double s = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) s = std::max(s, std::fabs(p[i]));
    return s;
}

}  // namespace tnp
