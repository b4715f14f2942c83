#pragma once

#include <cstdint>
#include <random>

namespace eusn {

/// Seedable, splittable generator: mt19937_64 streams whose seeds are
/// derived through SplitMix64. Reproducible within one standard library
/// implementation; not meant to match other implementations bit-for-bit.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }
    engine_type& engine() noexcept { return engine_; }

    /// Uniform over [lo, hi).
    double uniform(double lo, double hi);

    /// scale * U[-1, 1). Always consumes one draw, also when scale == 0.
    double symmetric(double scale) { return scale * uniform(-1.0, 1.0); }

    std::uint64_t next_u64() { return engine_(); }

    /// Independent child stream; does not advance this generator.
    Rng split(std::uint64_t stream) const { return Rng(derive(seed_, stream)); }

    /// Seed of child `stream` of `seed`.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t seed_;
    engine_type engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace eusn
