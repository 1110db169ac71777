#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace amsim {

// splitmix64 finalizer; decorrelates nearby seeds before feeding mt19937_64.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over an ASCII stage name. Stage-keyed seed derivation keeps each
// pipeline stage's randomness independent of the others: adding a stage
// never perturbs the streams of existing stages.
inline std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage) {
    return mix64(global_seed ^ hash_name(stage));
}

inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage,
                                 std::uint64_t index) {
    return mix64(derive_seed(global_seed, stage) ^ mix64(index));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(mix64(seed));
}

}  // namespace amsim
