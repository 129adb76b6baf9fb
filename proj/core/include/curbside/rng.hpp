#pragma once

#include <cstdint>
#include <random>

namespace curbside {

// Seeded RNG stream. std::mt19937_64 output is fully specified by the
// standard; the helpers below avoid std::uniform_*_distribution, whose
// results are implementation-defined, so traces stay byte-identical
// across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). Uses 64-bit modulo; the bias is negligible for the
    // small n used here and the result is platform-stable.
    std::uint64_t next_index(std::uint64_t n) { return engine_() % n; }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::mt19937_64 engine_;
};

} // namespace curbside
