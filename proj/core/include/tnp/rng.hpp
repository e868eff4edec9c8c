#pragma once

#include <cstdint>

namespace tnp {

/// Derives the stream key used by RandomSource::split, exposed so callers
/// can pre-compute per-configuration or per-repetition seeds.
std::uint64_t derive_stream_key(std::uint64_t key, std::uint64_t stream_id);

/// Counter-based seeded generator. The output at position i is a fixed mix
/// of (key, i), so the deviate stream depends only on the seed, never on
/// platform or thread count. split(id) derives a statistically independent
/// child stream keyed by (seed, id); parallel code must split, never share.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : key_(seed) {}

    /// Independent child stream for (key, stream_id). Does not advance this
    /// source; distinct ids give distinct streams.
    RandomSource split(std::uint64_t stream_id) const {
        return RandomSource(derive_stream_key(key_, stream_id));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double uniform();

    double standard_normal();

    /// Chi-square with integer degrees of freedom f >= 1 (sum of f squared
    /// standard normals).
    double chi_square(int dof);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tnp
