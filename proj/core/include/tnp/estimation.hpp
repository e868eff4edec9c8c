#pragma once

#include "tnp/linalg.hpp"
#include "tnp/tensor.hpp"

#include <cstddef>
#include <vector>

namespace tnp {

struct LabeledSample {
    DenseTensor tensor;
    int label = 0;  // 0 or 1
};

struct ClassMeans {
    DenseTensor mean0;
    DenseTensor mean1;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
};

/// Entrywise class averages. Throws EmptyClass if either class is absent.
ClassMeans class_means(const std::vector<LabeledSample>& data);

/// Mode-wise covariance estimates: for each mode m,
/// (n d_{-m})^{-1} sum_y sum_i mat_m(X_i - mean_y) mat_m^T(X_i - mean_y).
std::vector<SpdMatrix> mode_covariances(const std::vector<LabeledSample>& data,
                                        const ClassMeans& means);

/// Spectral initialization (mean difference hit with every mode-covariance
/// inverse). Near-singular covariances are retried with escalating diagonal
/// loading before giving up with UnrecoverableSingularCovariance.
DenseTensor initial_discriminant(const ClassMeans& means, const std::vector<SpdMatrix>& mode_covs);

struct DtipResult {
    TuckerFactors tucker;  // core = b_init contracted with U_m^T, plus the factors
    DenseTensor b_hat;     // b_init projected onto the fitted subspaces
    std::size_t iterations_used = 0;
};

/// Iterative projection refinement of a Tucker low-rank discriminant:
/// per-mode truncated SVD initialization, then alternating updates of each
/// mode's factor with all other modes projected out, stopping when the
/// largest projector movement (spectral norm) drops to epsilon or after
/// max_iter sweeps.
DtipResult dtip(const DenseTensor& b_init, const std::vector<std::size_t>& ranks, double epsilon,
                std::size_t max_iter);

struct LdaEstimates {
    DenseTensor mean0;
    DenseTensor mean1;
    std::vector<SpdMatrix> mode_covs;
    DenseTensor b_init;
    DenseTensor b_hat;
    TuckerFactors tucker;
    double prior1_hat = 0.5;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::size_t iterations_used = 0;
};

/// Full estimation pipeline: means, covariances, spectral initialization,
/// and the low-rank refinement.
LdaEstimates estimate_lda(const std::vector<LabeledSample>& data,
                          const std::vector<std::size_t>& ranks, double epsilon,
                          std::size_t max_iter);

}  // namespace tnp
