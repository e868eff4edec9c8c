#include "tnp/tgmm.hpp"

#include "tnp/errors.hpp"
#include "tnp/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tnp {

TgmmParams::TgmmParams(DenseTensor m0, DenseTensor m1, std::vector<SpdMatrix> covs, double p1)
    : mean0(std::move(m0)), mean1(std::move(m1)), covariances(std::move(covs)), prior1(p1) {
    if (mean0.shape() != mean1.shape()) {
        throw std::invalid_argument("TgmmParams: class means must share a shape");
    }
    if (covariances.size() != mean0.order()) {
        throw std::invalid_argument("TgmmParams: one covariance per mode required");
    }
    for (std::size_t m = 0; m < covariances.size(); ++m) {
        if (covariances[m].order() != mean0.shape().dim(m)) {
            throw std::invalid_argument("TgmmParams: covariance " + std::to_string(m) +
                                        " order does not match mode size");
        }
    }
    if (!(prior1 > 0.0 && prior1 < 1.0)) {
        throw std::invalid_argument("TgmmParams: prior1 must lie in (0, 1)");
    }
}

namespace {

struct CholFactors {
    std::vector<Matrix> lower;     // empty slot when the covariance is exactly I
    std::vector<bool> is_identity;
};

CholFactors factorize(const TgmmParams& params) {
    CholFactors f;
    f.lower.resize(params.covariances.size());
    f.is_identity.resize(params.covariances.size());
    for (std::size_t m = 0; m < params.covariances.size(); ++m) {
        f.is_identity[m] = params.covariances[m].is_identity();
        if (!f.is_identity[m]) f.lower[m] = cholesky(params.covariances[m]);
    }
    return f;
}

DenseTensor correlated_draw(const Shape& shape, const CholFactors& f, RandomSource& rng) {
    DenseTensor z(shape);
    double* p = z.data();
    for (std::size_t i = 0; i < z.size(); ++i) p[i] = rng.standard_normal();
    for (std::size_t m = 0; m < shape.order(); ++m) {
        if (!f.is_identity[m]) z = mode_product(z, f.lower[m], m);
    }
    return z;
}

const DenseTensor& class_mean(const TgmmParams& params, int label) {
    if (label != 0 && label != 1) throw std::invalid_argument("class label must be 0 or 1");
    return label == 0 ? params.mean0 : params.mean1;
}

}  // namespace

std::vector<DenseTensor> sample_class(const TgmmParams& params, int label, std::size_t n,
                                      RandomSource& rng) {
    if (n < 1) throw std::invalid_argument("sample_class: n must be >= 1");
    const DenseTensor& mean = class_mean(params, label);
    const CholFactors f = factorize(params);
    std::vector<DenseTensor> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DenseTensor x = correlated_draw(params.shape(), f, rng);
        double* p = x.data();
        const double* mp = mean.data();
        for (std::size_t t = 0; t < x.size(); ++t) p[t] += mp[t];
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<DenseTensor> sample_class_t(const TgmmParams& params, int dof, int label,
                                        std::size_t n, RandomSource& rng) {
    if (dof < 1) throw std::invalid_argument("sample_class_t: dof must be >= 1");
    if (n < 1) throw std::invalid_argument("sample_class_t: n must be >= 1");
    const DenseTensor& mean = class_mean(params, label);
    const CholFactors f = factorize(params);
    std::vector<DenseTensor> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DenseTensor x = correlated_draw(params.shape(), f, rng);
        const double w = rng.chi_square(dof);
        const double lift = std::sqrt(static_cast<double>(dof) / w);
        double* p = x.data();
        const double* mp = mean.data();
        for (std::size_t t = 0; t < x.size(); ++t) p[t] = mp[t] + p[t] * lift;
        out.push_back(std::move(x));
    }
    return out;
}

DenseTensor discriminant_tensor(const TgmmParams& params) {
    DenseTensor b = subtract(params.mean1, params.mean0);
    for (std::size_t m = 0; m < params.covariances.size(); ++m) {
        if (params.covariances[m].is_identity()) continue;
        b = mode_product(b, invert_spd(params.covariances[m]).mat(), m);
    }
    return b;
}

OracleRule oracle_rule(const TgmmParams& params, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("oracle_rule: alpha must lie in (0, 1)");
    }
    OracleRule rule;
    rule.discriminant = discriminant_tensor(params);
    const DenseTensor diff = subtract(params.mean1, params.mean0);
    const double delta_sq = inner(rule.discriminant, diff);
    if (!(delta_sq > 0.0)) {
        throw std::invalid_argument("oracle_rule: class means must differ");
    }
    rule.snr = std::sqrt(delta_sq);
    rule.mid_mean = scale(add(params.mean0, params.mean1), 0.5);
    rule.alpha = alpha;
    rule.threshold =
        rule.snr * std_normal_quantile(1.0 - alpha) + inner(rule.discriminant, params.mean0);
    return rule;
}

double oracle_type2(const OracleRule& rule, const TgmmParams& params) {
    // Under class 1 the score is N(<B, M1>, snr^2).
    const double mean1_score = inner(rule.discriminant, params.mean1);
    return std_normal_cdf((rule.threshold - mean1_score) / rule.snr);
}

DenseTensor random_tucker_signal(const Shape& shape, const std::vector<std::size_t>& ranks,
                                 double target_snr, RandomSource& rng) {
    if (ranks.size() != shape.order()) {
        throw std::invalid_argument("random_tucker_signal: one rank per mode required");
    }
    if (!(target_snr > 0.0)) {
        throw std::invalid_argument("random_tucker_signal: target_snr must be positive");
    }
    for (std::size_t m = 0; m < ranks.size(); ++m) {
        if (ranks[m] < 1 || ranks[m] > shape.dim(m)) {
            throw std::invalid_argument("random_tucker_signal: rank for mode " +
                                        std::to_string(m) + " out of range");
        }
    }

    DenseTensor core{Shape(ranks)};
    for (std::size_t i = 0; i < core.size(); ++i) core[i] = rng.standard_normal();

    std::vector<Matrix> factors;
    factors.reserve(shape.order());
    for (std::size_t m = 0; m < shape.order(); ++m) {
        const std::size_t d = shape.dim(m), r = ranks[m];
        Matrix u(d, r);
        for (std::size_t j = 0; j < r; ++j) {
            double* uj = u.col(j);
            double norm = 0.0;
            while (norm < 1e-8) {
                for (std::size_t i = 0; i < d; ++i) uj[i] = rng.standard_normal();
                // Two modified Gram-Schmidt passes keep the columns orthonormal
                // to machine precision.
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::size_t t = 0; t < j; ++t) {
                        const double* ut = u.col(t);
                        double dot = 0.0;
                        for (std::size_t i = 0; i < d; ++i) dot += uj[i] * ut[i];
                        for (std::size_t i = 0; i < d; ++i) uj[i] -= dot * ut[i];
                    }
                }
                norm = 0.0;
                for (std::size_t i = 0; i < d; ++i) norm += uj[i] * uj[i];
                norm = std::sqrt(norm);
            }
            for (std::size_t i = 0; i < d; ++i) uj[i] /= norm;
        }
        factors.push_back(std::move(u));
    }

    DenseTensor signal = tucker_reconstruct(TuckerFactors(std::move(core), std::move(factors)));
    const double norm = frobenius_norm(signal);
    return scale(signal, target_snr / norm);
}

}  // namespace tnp
