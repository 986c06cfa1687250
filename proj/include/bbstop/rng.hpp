// Deterministic normal variate source. Uses inverse-transform sampling so
// that streams are reproducible bit-for-bit regardless of platform or
// standard-library vendor.
#pragma once

#include <cstdint>
#include <random>

#include "bbstop/normal.hpp"

namespace bbstop {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Mixes a base seed with a stream index so independent streams (paths,
// replications) can be drawn in any order or in parallel.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

class NormalRng {
public:
    explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw strictly inside (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gauss() { return norm_quantile(uniform()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace bbstop
