#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dkm {

// Stateless counter-based random streams.  Every draw is a pure function of
// (seed, stream, counter), so batch construction can be replayed or fanned out
// in any order without changing a single bit of the result.
struct RngKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Derives an unrelated key for a named purpose (tag).
    [[nodiscard]] RngKey child(std::uint64_t tag) const;
    // Same key, shifted stream.
    [[nodiscard]] RngKey with_stream(std::uint64_t s) const { return {seed, s}; }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t bits(RngKey key, std::uint64_t counter) {
    std::uint64_t h = mix64(key.seed);
    h = mix64(h ^ key.stream);
    h = mix64(h ^ counter);
    return h;
}

// Acklam's rational approximation of the standard normal quantile,
// antisymmetric about 1/2; max relative error 1.15e-9.
double normal_quantile(double u);

} // namespace detail

inline RngKey RngKey::child(std::uint64_t tag) const {
    return {detail::mix64(detail::mix64(seed ^ 0xd6e8feb86659fd93ULL) ^ tag), 0};
}

// Uniform in the open interval (0, 1).
inline double uniform01(RngKey key, std::uint64_t counter) {
    return (static_cast<double>(detail::bits(key, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw for a given coordinate index, via the inverse CDF so
// each coordinate costs one counter and stays an isolated pure function.
inline double normal(RngKey key, std::uint64_t counter) {
    return detail::normal_quantile(uniform01(key, counter));
}

// Fills out[0..n) with standard normals at counters base..base+n.
inline void normal_fill(RngKey key, std::uint64_t base, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = normal(key, base + i);
}

// Uniform in (lo, hi).
inline double uniform_in(RngKey key, std::uint64_t counter, double lo, double hi) {
    return lo + (hi - lo) * uniform01(key, counter);
}

} // namespace dkm
