#pragma once

#include "tnp/matrix.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tnp {

/// Symmetric positive (semi-)definite matrix. Symmetry is validated at
/// construction (1e-12 relative per entry); definiteness is only checked
/// when a factorization is requested.
class SpdMatrix {
public:
    SpdMatrix() = default;
    explicit SpdMatrix(Matrix entries);

    static SpdMatrix identity(std::size_t n);

    std::size_t order() const { return mat_.rows(); }
    const Matrix& mat() const { return mat_; }
    double operator()(std::size_t i, std::size_t j) const { return mat_(i, j); }

    double trace() const;
    bool is_identity() const;

private:
    Matrix mat_;
};

/// Lower-triangular L with L L^T = S. Throws NotPositiveDefinite when a
/// pivot falls at or below 1e-12 * trace(S)/n.
Matrix cholesky(const SpdMatrix& s);

/// Inverse via the Cholesky factor; residual ||S S^{-1} - I||_F <= 1e-8 n.
SpdMatrix invert_spd(const SpdMatrix& s);

/// Solves L y = b (forward) or L^T x = y (backward) in place.
void solve_lower(const Matrix& l, std::vector<double>& b);
void solve_lower_transposed(const Matrix& l, std::vector<double>& b);

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // orthonormal columns, matching order
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
/// returned in descending order; each eigenvector's largest-magnitude entry
/// is made positive so results are deterministic.
EigenDecomposition sym_eigen(const Matrix& s);

/// Leading r left singular vectors of A, computed from the d x d Gram matrix
/// A A^T (unfoldings here are short and wide, so the Gram route keeps the
/// eigenproblem tiny). Same sign convention as sym_eigen.
Matrix top_left_singular_vectors(const Matrix& a, std::size_t rank);

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm(const Matrix& s);

}  // namespace tnp
