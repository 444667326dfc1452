#pragma once

#include <cstdint>

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so refinement and parallel sampling are
// reproducible regardless of evaluation order.

namespace rnlab::rng {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += kGoldenGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

// Uniform in (0,1), 53-bit mantissa, never exactly 0 or 1.
inline double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

// Acklam's rational approximation to the inverse normal CDF, refined by one
// Halley step; |relative error| < 1e-15 over (0,1).
double inverse_normal_cdf(double p);

// Standard normal draw addressed by (seed, stream, index).
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return inverse_normal_cdf(uniform01(mix(seed, stream, index)));
}

}  // namespace rnlab::rng
