#include "tnp/calibration.hpp"

#include "tnp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnp {

NpLevels::NpLevels(double a, double d) : alpha(a), delta(d) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("NpLevels: alpha must lie in (0, 1)");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("NpLevels: delta must lie in (0, 1)");
    }
}

double binomial_tail(std::size_t n, std::size_t k, double alpha) {
    if (k < 1 || k > n) throw std::out_of_range("binomial_tail: k must lie in [1, n]");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("binomial_tail: alpha must lie in (0, 1)");
    }
    const double p = 1.0 - alpha;  // success probability
    const double log_p = std::log1p(-alpha);
    const double log_q = std::log(alpha);
    const long double nd = static_cast<long double>(n);

    // Largest term of the sum, clamped into [k, n].
    std::size_t peak = static_cast<std::size_t>((nd + 1.0L) * p);
    peak = std::min(n, std::max(k, peak));

    const double log_peak = std::lgamma(static_cast<double>(n) + 1.0) -
                            std::lgamma(static_cast<double>(peak) + 1.0) -
                            std::lgamma(static_cast<double>(n - peak) + 1.0) +
                            static_cast<double>(peak) * log_p +
                            static_cast<double>(n - peak) * log_q;
    if (log_peak < -746.0) return 0.0;  // entire tail is below double range

    const long double term_peak = std::exp(static_cast<long double>(log_peak));
    long double sum = term_peak;

    // Terms fall off monotonically on each side of the peak; stop once they
    // stop contributing at long-double precision.
    long double term = term_peak;
    for (std::size_t j = peak; j > k; --j) {
        // T_{j-1} = T_j * (j q) / ((n - j + 1) p)
        term *= static_cast<long double>(j) * alpha /
                (static_cast<long double>(n - j + 1) * p);
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    term = term_peak;
    for (std::size_t j = peak + 1; j <= n; ++j) {
        // T_j = T_{j-1} * ((n - j + 1) p) / (j q)
        term *= static_cast<long double>(n - j + 1) * p /
                (static_cast<long double>(j) * alpha);
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    return std::min(1.0, static_cast<double>(sum));
}

std::size_t min_calibration_size(const NpLevels& levels) {
    const double log_p = std::log1p(-levels.alpha);
    const double log_delta = std::log(levels.delta);
    std::size_t n = static_cast<std::size_t>(std::max(1.0, std::ceil(log_delta / log_p - 1e-9)));
    // Settle ties and rounding against the exact condition n log(1-a) <= log d.
    while (static_cast<double>(n) * log_p > log_delta) ++n;
    while (n > 1 && static_cast<double>(n - 1) * log_p <= log_delta) --n;
    return n;
}

CalibrationResult umbrella_threshold(std::vector<double> scores, const NpLevels& levels) {
    const std::size_t n = scores.size();
    const std::size_t required = min_calibration_size(levels);
    if (n < required) throw CalibrationSetTooSmall(required, n);
    std::sort(scores.begin(), scores.end());

    // binomial_tail is strictly decreasing in k, so binary-search the first
    // index whose tail bound drops to delta.
    std::size_t lo = 1, hi = n;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (binomial_tail(n, mid, levels.alpha) <= levels.delta) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    CalibrationResult result;
    result.k_star = lo;
    result.threshold = scores[lo - 1];
    result.n_calib = n;
    result.tail_at_k = binomial_tail(n, lo, levels.alpha);
    return result;
}

double violation_rate(const std::vector<double>& type1_errors, double alpha) {
    if (type1_errors.empty()) {
        throw std::invalid_argument("violation_rate: empty input");
    }
    std::size_t count = 0;
    for (double e : type1_errors) {
        if (e > alpha) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(type1_errors.size());
}

}  // namespace tnp
