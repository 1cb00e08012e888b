#pragma once

#include <cstdint>

namespace forkbound {

// Counter-based generator built on the splitmix64 finalizer. A draw is a pure
// function of (key, counter), so streams never share state: replications,
// servers and stages each derive their own key and coupled experiments can
// reuse a stream bit-for-bit (e.g. the shared servers of a (k,l) and a
// (k+1,l) run).

inline constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class CounterRng {
  public:
    // Streams are addressed as (context, a, b); see simulator.cpp for the
    // layout used by the simulations.
    explicit CounterRng(std::uint64_t seed, std::uint64_t context = 0, std::uint64_t a = 0,
                        std::uint64_t b = 0)
        : key_(derive_key(seed, context, a, b)) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kSplitmixGamma); }

    // Uniform on the open interval (0,1); endpoints are never returned, so
    // inverse-cdf transforms stay finite.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

  private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t context, std::uint64_t a,
                                    std::uint64_t b) {
        std::uint64_t k = mix64(seed ^ 0x243F6A8885A308D3ULL);
        k = mix64(k + context * 0xD1342543DE82EF95ULL + 1);
        k = mix64(k + a * 0x9E6C63D0876A9A43ULL + 1);
        k = mix64(k + b * 0xB5AD4ECEDA1CE2A9ULL + 1);
        return k;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace forkbound
