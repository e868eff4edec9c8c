#include "tnp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tnp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream_key(std::uint64_t key, std::uint64_t stream_id) {
    return mix(mix(key + kGolden) ^ (stream_id * 0xD1B54A32D192ED03ull + kGolden));
}

std::uint64_t RandomSource::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double RandomSource::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // Box-Muller; 1 - uniform() keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.28318530717958647692528676655900577 * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double RandomSource::chi_square(int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square: degrees of freedom must be >= 1");
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
        const double z = standard_normal();
        s += z * z;
    }
    return s;
}

}  // namespace tnp
