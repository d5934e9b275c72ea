#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fpprace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from (base, tags...). Used for replica seeds and for
/// giving independent streams to the two weight families of a race.
inline std::uint64_t derive_seed(std::uint64_t base) { return splitmix64(base); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, Rest... rest) {
    return derive_seed(splitmix64(base ^ splitmix64(tag)), rest...);
}

/// mt19937_64 wrapper with explicit inversion-friendly uniform helpers.
/// All sampling in the project goes through quantile transforms of these
/// uniforms, so a run is reproducible from its seed alone.
class rng {
  public:
    explicit rng(std::uint64_t seed) : eng_(splitmix64(seed)) { eng_.discard(8); }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0,1), 53-bit resolution.
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0,1); safe to pass through log or pow.
    double u01_open() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection-free enough for simulation purposes; the
        // modulo bias at n << 2^64 is far below Monte Carlo noise, but we
        // keep the widening multiply exact anyway.
        unsigned __int128 m = static_cast<unsigned __int128>(eng_()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace fpprace
