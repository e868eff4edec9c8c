#pragma once

namespace tnp {

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Standard normal density.
double std_normal_pdf(double x);

/// Standard normal quantile, accurate to about 1e-15 absolute for
/// p in [1e-12, 1 - 1e-12]. Throws std::domain_error outside (0, 1).
double std_normal_quantile(double p);

}  // namespace tnp
