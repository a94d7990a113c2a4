#pragma once

#include <cstdint>
#include <string_view>

namespace slimconv {

// Deterministic splittable PRNG (splitmix64). Every random quantity in the
// project flows from one root seed; independent streams are derived by name
// so that generation order never changes results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    // Derives an independent stream from this stream's seed and a label.
    // Splitting does not advance this stream.
    Rng split(std::string_view name) const {
        std::uint64_t h = 1469598103934665603ull; // FNV-1a 64
        for (unsigned char ch : name) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return Rng(mix(seed_ ^ h));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [lo, hi) with 24 bits of resolution.
    float uniform(float lo, float hi) {
        float u = static_cast<float>(next_u64() >> 40) * (1.0f / 16777216.0f);
        return lo + (hi - lo) * u;
    }

    // Uniform in [lo, hi) with 53 bits of resolution.
    double uniform_double(double lo, double hi) {
        double u = static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
        return lo + (hi - lo) * u;
    }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;   // stream identity, fixed at construction
    std::uint64_t state_;  // advances with each draw
};

} // namespace slimconv
