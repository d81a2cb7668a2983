#pragma once

#include <cmath>
#include <cstdint>

namespace qkan {

// SplitMix64 (Steele, Lea & Flood 2014): one 64-bit word of state advanced by
// the golden-ratio increment, output through a two-round mix. All randomness
// in this project flows through this generator so that seeded runs reproduce
// bit-for-bit on any platform:
//   - next_double() maps the top 53 bits to [0, 1),
//   - normal() is Box-Muller on two such uniforms (std::normal_distribution
//     is implementation-defined and would break reproducibility),
//   - split(k) derives the k-th child stream from the current state without
//     advancing the parent; child streams are used for restarts, dataset
//     generation and parameter initialization.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal, Box-Muller. Second value of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // Child stream k. Distinct k give independent streams; the parent state
    // is not advanced.
    SplitMix64 split(std::uint64_t k) const {
        return SplitMix64(state_ ^ (0xD1B54A32D192ED03ULL * (k + 1)));
    }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace qkan
