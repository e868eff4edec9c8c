#pragma once

#include <cstddef>
#include <vector>

namespace tnp {

/// Type I error target alpha and violation tolerance delta, both in (0, 1).
struct NpLevels {
    double alpha = 0.05;
    double delta = 0.1;

    NpLevels() = default;
    NpLevels(double a, double d);
};

struct CalibrationResult {
    std::size_t k_star = 0;   // 1-based order-statistic index
    double threshold = 0.0;   // the k*-th smallest calibration score
    std::size_t n_calib = 0;
    double tail_at_k = 0.0;   // binomial tail bound achieved at k*
};

/// Pr(Binomial(n, 1 - alpha) >= k), exact to ~1e-14 relative, computed from
/// the largest term outward so it neither overflows nor cancels up to n = 1e6.
double binomial_tail(std::size_t n, std::size_t k, double alpha);

/// Smallest calibration-set size for which a feasible order-statistic index
/// exists, i.e. minimal n with (1 - alpha)^n <= delta.
std::size_t min_calibration_size(const NpLevels& levels);

/// Order-statistic threshold rule on held-out class-0 scores: pick the
/// minimal k whose binomial tail bound is at most delta and return the k-th
/// smallest score. The classifier 1{s > threshold} then exceeds type I
/// error alpha with probability at most delta. Throws CalibrationSetTooSmall
/// when no feasible k exists.
CalibrationResult umbrella_threshold(std::vector<double> scores, const NpLevels& levels);

/// Fraction of per-repetition type I errors strictly exceeding alpha.
double violation_rate(const std::vector<double>& type1_errors, double alpha);

}  // namespace tnp
