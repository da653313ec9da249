#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>
#include <vector>

namespace growthlab {

/// splitmix64 step; the workhorse for seed derivation and shift generation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed mixing: stream index = hash of (seed, salts...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (salt << 6) + (salt >> 2));
    splitmix64(s);
    return splitmix64(s);
}

inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline double uniform01(std::uint64_t& state) {
    return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

/// Incremental Halton sequence with a Cranley-Patterson rotation per dimension.
/// Replicated estimates use one shifted stream per replicate; the reported
/// standard error comes from the spread of the replicate means.
class HaltonSampler {
public:
    /// dim <= 8; shift_seed selects the rotation (one stream per replicate).
    HaltonSampler(int dim, std::uint64_t shift_seed);

    /// Fill SoA buffers with the next n points mapped to [lo, hi)^dim.
    /// coords[d] must each hold n doubles.
    void fill(double* const* coords, std::size_t n, double lo, double hi);

    int dimension() const { return dim_; }

private:
    struct DimState {
        int base;
        double shift;
        std::vector<int> digits;   // little-endian base-b counter
        double value;              // radical inverse of the counter
    };
    void advance(DimState& d);

    int dim_;
    std::vector<DimState> dims_;
};

}  // namespace growthlab
