#include "tnp/estimation.hpp"

#include "tnp/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tnp {

ClassMeans class_means(const std::vector<LabeledSample>& data) {
    std::size_t n0 = 0, n1 = 0;
    for (const auto& s : data) {
        if (s.label == 0)
            ++n0;
        else if (s.label == 1)
            ++n1;
        else
            throw std::invalid_argument("class_means: labels must be 0 or 1");
    }
    if (n0 == 0) throw EmptyClass("class_means: no class-0 samples");
    if (n1 == 0) throw EmptyClass("class_means: no class-1 samples");

    const Shape& shape = data.front().tensor.shape();
    DenseTensor mean0(shape), mean1(shape);
    for (const auto& s : data) {
        if (s.tensor.shape() != shape) {
            throw std::invalid_argument("class_means: samples must share a shape");
        }
        DenseTensor& acc = s.label == 0 ? mean0 : mean1;
        const double* p = s.tensor.data();
        double* a = acc.data();
        for (std::size_t i = 0; i < acc.size(); ++i) a[i] += p[i];
    }
    for (std::size_t i = 0; i < mean0.size(); ++i) mean0[i] /= static_cast<double>(n0);
    for (std::size_t i = 0; i < mean1.size(); ++i) mean1[i] /= static_cast<double>(n1);
    return ClassMeans{std::move(mean0), std::move(mean1), n0, n1};
}

std::vector<SpdMatrix> mode_covariances(const std::vector<LabeledSample>& data,
                                        const ClassMeans& means) {
    const std::size_t n = means.n0 + means.n1;
    if (n < 2) throw std::invalid_argument("mode_covariances: need at least 2 samples");
    const Shape& shape = means.mean0.shape();
    const std::size_t order = shape.order();

    std::vector<Matrix> acc;
    acc.reserve(order);
    for (std::size_t m = 0; m < order; ++m) acc.emplace_back(shape.dim(m), shape.dim(m));

    for (const auto& s : data) {
        const DenseTensor centered =
            subtract(s.tensor, s.label == 0 ? means.mean0 : means.mean1);
        for (std::size_t m = 0; m < order; ++m) {
            const Matrix unf = unfold(centered, m);
            const std::size_t dm = unf.rows(), cols = unf.cols();
            Matrix& g = acc[m];
            for (std::size_t c = 0; c < cols; ++c) {
                const double* col = unf.col(c);
                for (std::size_t j = 0; j < dm; ++j) {
                    const double v = col[j];
                    if (v == 0.0) continue;
                    for (std::size_t i = j; i < dm; ++i) g(i, j) += col[i] * v;
                }
            }
        }
    }

    std::vector<SpdMatrix> covs;
    covs.reserve(order);
    for (std::size_t m = 0; m < order; ++m) {
        const double denom = static_cast<double>(n) * static_cast<double>(shape.total_except(m));
        Matrix& g = acc[m];
        for (std::size_t j = 0; j < g.cols(); ++j) {
            for (std::size_t i = j; i < g.rows(); ++i) {
                const double v = g(i, j) / denom;
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        covs.emplace_back(std::move(g));
    }
    return covs;
}

namespace {

// Inversion with the diagonal-loading ladder: bare attempt, then ridge
// 1e-8 * trace/d escalating by x100 up to 1e-2 * trace/d.
SpdMatrix invert_with_ridge(const SpdMatrix& cov, std::size_t mode) {
    try {
        return invert_spd(cov);
    } catch (const NotPositiveDefinite&) {
    }
    const std::size_t d = cov.order();
    const double base = cov.trace() / static_cast<double>(d);
    for (double factor = 1e-8; factor <= 1e-2 * 1.0000001; factor *= 100.0) {
        Matrix loaded = cov.mat();
        for (std::size_t i = 0; i < d; ++i) loaded(i, i) += factor * base;
        try {
            return invert_spd(SpdMatrix(std::move(loaded)));
        } catch (const NotPositiveDefinite&) {
        }
    }
    throw UnrecoverableSingularCovariance(
        "mode " + std::to_string(mode) +
        " covariance stayed singular after diagonal loading up to 1e-2*trace/d");
}

}  // namespace

DenseTensor initial_discriminant(const ClassMeans& means,
                                 const std::vector<SpdMatrix>& mode_covs) {
    DenseTensor b = subtract(means.mean1, means.mean0);
    for (std::size_t m = 0; m < mode_covs.size(); ++m) {
        if (mode_covs[m].is_identity()) continue;
        b = mode_product(b, invert_with_ridge(mode_covs[m], m).mat(), m);
    }
    return b;
}

DtipResult dtip(const DenseTensor& b_init, const std::vector<std::size_t>& ranks, double epsilon,
                std::size_t max_iter) {
    const Shape& shape = b_init.shape();
    const std::size_t order = shape.order();
    if (ranks.size() != order) throw std::invalid_argument("dtip: one rank per mode required");
    for (std::size_t m = 0; m < order; ++m) {
        const std::size_t cap = std::min(shape.dim(m), shape.total_except(m));
        if (ranks[m] < 1 || ranks[m] > cap) {
            throw std::invalid_argument("dtip: rank for mode " + std::to_string(m) +
                                        " out of range");
        }
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("dtip: epsilon must be positive");
    if (max_iter < 1) throw std::invalid_argument("dtip: max_iter must be >= 1");

    std::vector<Matrix> factors(order);
    for (std::size_t m = 0; m < order; ++m) {
        factors[m] = top_left_singular_vectors(unfold(b_init, m), ranks[m]);
    }

    std::size_t iterations = 0;
    for (std::size_t t = 1; t <= max_iter; ++t) {
        iterations = t;
        std::vector<Matrix> previous = factors;
        for (std::size_t m = 0; m < order; ++m) {
            // Modes before m already hold this sweep's factors; modes after m
            // still hold last sweep's.
            std::vector<Matrix> transposed(order);
            std::vector<const Matrix*> maps(order, nullptr);
            for (std::size_t j = 0; j < order; ++j) {
                if (j == m) continue;
                transposed[j] = transpose(factors[j]);
                maps[j] = &transposed[j];
            }
            const DenseTensor z = multi_mode_product(b_init, maps);
            factors[m] = top_left_singular_vectors(unfold(z, m), ranks[m]);
        }
        double movement = 0.0;
        for (std::size_t m = 0; m < order; ++m) {
            const Matrix diff = subtract(multiply(factors[m], transpose(factors[m])),
                                         multiply(previous[m], transpose(previous[m])));
            movement = std::max(movement, spectral_norm(diff));
        }
        if (movement <= epsilon) break;
    }

    std::vector<Matrix> transposed(order);
    std::vector<const Matrix*> maps(order, nullptr);
    for (std::size_t m = 0; m < order; ++m) {
        transposed[m] = transpose(factors[m]);
        maps[m] = &transposed[m];
    }
    DenseTensor core = multi_mode_product(b_init, maps);
    TuckerFactors tucker(std::move(core), std::move(factors));
    DenseTensor b_hat = tucker_reconstruct(tucker);
    return DtipResult{std::move(tucker), std::move(b_hat), iterations};
}

LdaEstimates estimate_lda(const std::vector<LabeledSample>& data,
                          const std::vector<std::size_t>& ranks, double epsilon,
                          std::size_t max_iter) {
    ClassMeans means = class_means(data);
    std::vector<SpdMatrix> covs = mode_covariances(data, means);
    DenseTensor b_init = initial_discriminant(means, covs);
    DtipResult refined = dtip(b_init, ranks, epsilon, max_iter);
    const double n = static_cast<double>(means.n0 + means.n1);
    return LdaEstimates{std::move(means.mean0),
                        std::move(means.mean1),
                        std::move(covs),
                        std::move(b_init),
                        std::move(refined.b_hat),
                        std::move(refined.tucker),
                        static_cast<double>(means.n1) / n,
                        means.n0,
                        means.n1,
                        refined.iterations_used};
}

}  // namespace tnp
