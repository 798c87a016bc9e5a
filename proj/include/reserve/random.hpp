#pragma once

#include <cstdint>

namespace reserve {

/// Deterministic uniform stream (splitmix64). The same seed always yields the
/// same variate sequence. `substream(i)` derives an independent child stream
/// from the original seed, so trial i sees the same variates no matter how
/// trials are batched across threads.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    RandomStream substream(std::uint64_t index) const {
        std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return RandomStream(z ^ (z >> 31));
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace reserve
