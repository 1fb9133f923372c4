#pragma once

#include <cstdint>
#include <cstddef>

namespace sata {

/// SplitMix64 (Steele, Lea, Flood 2014). The output sequence is fixed by the
/// published algorithm, so masks generated from a seed are identical on every
/// platform and in any port that reimplements it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). Rejection sampling on the low residue
    /// keeps the draw unbiased; bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace sata
