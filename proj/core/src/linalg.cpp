#include "tnp/linalg.hpp"

#include "tnp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tnp {

SpdMatrix::SpdMatrix(Matrix entries) : mat_(std::move(entries)) {
    if (mat_.rows() != mat_.cols()) {
        throw std::invalid_argument("SpdMatrix: matrix must be square");
    }
    const double scale = std::max(1.0, max_abs(mat_));
    for (std::size_t j = 0; j < mat_.cols(); ++j) {
        for (std::size_t i = j + 1; i < mat_.rows(); ++i) {
            if (std::fabs(mat_(i, j) - mat_(j, i)) > 1e-12 * scale) {
                throw std::invalid_argument("SpdMatrix: matrix is not symmetric");
            }
        }
    }
}

SpdMatrix SpdMatrix::identity(std::size_t n) { return SpdMatrix(Matrix::identity(n)); }

double SpdMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < order(); ++i) t += mat_(i, i);
    return t;
}

bool SpdMatrix::is_identity() const {
    for (std::size_t j = 0; j < order(); ++j) {
        for (std::size_t i = 0; i < order(); ++i) {
            if (mat_(i, j) != (i == j ? 1.0 : 0.0)) return false;
        }
    }
    return true;
}

Matrix cholesky(const SpdMatrix& s) {
    const std::size_t n = s.order();
    const double pivot_floor = 1e-12 * s.trace() / static_cast<double>(n);
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = s(j, j);
        for (std::size_t t = 0; t < j; ++t) diag -= l(j, t) * l(j, t);
        if (diag <= pivot_floor) {
            throw NotPositiveDefinite("cholesky pivot " + std::to_string(j) +
                                      " is not positive");
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t t = 0; t < j; ++t) v -= l(i, t) * l(j, t);
            l(i, j) = v / ljj;
        }
    }
    return l;
}

void solve_lower(const Matrix& l, std::vector<double>& b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t t = 0; t < i; ++t) v -= l(i, t) * b[t];
        b[i] = v / l(i, i);
    }
}

void solve_lower_transposed(const Matrix& l, std::vector<double>& b) {
    const std::size_t n = l.rows();
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t t = ii + 1; t < n; ++t) v -= l(t, ii) * b[t];
        b[ii] = v / l(ii, ii);
    }
}

SpdMatrix invert_spd(const SpdMatrix& s) {
    const std::size_t n = s.order();
    const Matrix l = cholesky(s);
    Matrix inv(n, n);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        solve_lower(l, col);
        solve_lower_transposed(l, col);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    // Symmetrize away the last-bit asymmetry from the two triangular solves.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j + 1; i < n; ++i) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    }
    return SpdMatrix(std::move(inv));
}

namespace {

void apply_sign_convention(Matrix& v) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double a = std::fabs(v(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (v(arg, j) < 0.0) {
            for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
        }
    }
}

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("sym_eigen: matrix must be square");
    const std::size_t n = s.rows();
    const double scale = std::max(1.0, max_abs(s));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j + 1; i < n; ++i) {
            if (std::fabs(s(i, j) - s(j, i)) > 1e-10 * scale) {
                throw std::invalid_argument("sym_eigen: matrix is not symmetric");
            }
        }
    }

    Matrix a = s;
    // Work on the exactly symmetrized copy.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    Matrix v = Matrix::identity(n);

    const double fro = frobenius_norm(a);
    const double tol = 1e-15 * std::max(fro, 1e-300);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_diagonal_norm(a) > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= tol / static_cast<double>(n)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - sn * aiq;
                    a(i, q) = sn * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - sn * aqi;
                    a(q, i) = sn * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - sn * viq;
                    v(i, q) = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition result;
    result.values.resize(n);
    result.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        result.values[j] = a(idx[j], idx[j]);
        for (std::size_t i = 0; i < n; ++i) result.vectors(i, j) = v(i, idx[j]);
    }
    apply_sign_convention(result.vectors);
    return result;
}

Matrix top_left_singular_vectors(const Matrix& a, std::size_t rank) {
    const std::size_t p = a.rows(), q = a.cols();
    if (rank < 1 || rank > std::min(p, q)) {
        throw std::out_of_range("top_left_singular_vectors: rank out of range");
    }
    const EigenDecomposition eig = sym_eigen(gram_left(a));
    Matrix u(p, rank);
    for (std::size_t j = 0; j < rank; ++j)
        for (std::size_t i = 0; i < p; ++i) u(i, j) = eig.vectors(i, j);
    return u;
}

double spectral_norm(const Matrix& s) {
    const EigenDecomposition eig = sym_eigen(s);
    double best = 0.0;
    for (double v : eig.values) best = std::max(best, std::fabs(v));
    return best;
}

}  // namespace tnp
