#pragma once

#include "tnp/linalg.hpp"
#include "tnp/rng.hpp"
#include "tnp/tensor.hpp"

#include <cstddef>
#include <vector>

namespace tnp {

/// Two-class tensor-normal mixture: class means, one covariance per mode,
/// and the class-1 prior. vec(X | Y=y) is Gaussian with covariance
/// Sigma_M (x) ... (x) Sigma_1.
struct TgmmParams {
    DenseTensor mean0;
    DenseTensor mean1;
    std::vector<SpdMatrix> covariances;
    double prior1 = 0.5;

    TgmmParams(DenseTensor m0, DenseTensor m1, std::vector<SpdMatrix> covs, double p1);

    const Shape& shape() const { return mean0.shape(); }
};

/// Closed-form oracle classifier for a known model: score <X, B> against a
/// threshold chosen so the class-0 exceedance probability is exactly alpha.
struct OracleRule {
    DenseTensor discriminant;  // B
    double snr = 0.0;          // sqrt(<B, D>)
    DenseTensor mid_mean;      // (M0 + M1) / 2
    double threshold = 0.0;
    double alpha = 0.0;

    double score(const DenseTensor& x) const { return inner(x, discriminant); }
    int predict(const DenseTensor& x) const { return score(x) > threshold ? 1 : 0; }
};

/// Draws n samples of class `label`: mean_y + Z x_1 L_1 ... x_M L_M with Z
/// standard normal and L_m the Cholesky factor of Sigma_m.
std::vector<DenseTensor> sample_class(const TgmmParams& params, int label, std::size_t n,
                                      RandomSource& rng);

/// Tensor-t analogue: a zero-mean tensor-normal draw scaled by sqrt(f / W)
/// with one W ~ chi^2_f per sample, shifted by the class mean.
std::vector<DenseTensor> sample_class_t(const TgmmParams& params, int dof, int label,
                                        std::size_t n, RandomSource& rng);

/// B = (M1 - M0) x_1 Sigma_1^{-1} ... x_M Sigma_M^{-1}; equivalently
/// vec(B) = Sigma_v^{-1} vec(D).
DenseTensor discriminant_tensor(const TgmmParams& params);

OracleRule oracle_rule(const TgmmParams& params, double alpha);

/// Type II error of the oracle rule under the same model.
double oracle_type2(const OracleRule& rule, const TgmmParams& params);

/// Random discriminant with exact multilinear rank (r_1, ..., r_M) and
/// Frobenius norm equal to target_snr: i.i.d. normal core, orthonormalized
/// Gaussian factors, rescaled.
DenseTensor random_tucker_signal(const Shape& shape, const std::vector<std::size_t>& ranks,
                                 double target_snr, RandomSource& rng);

}  // namespace tnp
