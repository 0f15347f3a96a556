#pragma once

#include <cstdint>
#include <string_view>

namespace omni {

// Frozen 64-bit keyed hash. Signatures and fingerprints persisted by this
// project depend on these exact mixing constants; do not change them.

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Byte-order independent: consumes input byte by byte (FNV-1a style walk
// seeded through splitmix64, with a splitmix64 finalizer).
constexpr uint64_t hash64(std::string_view bytes, uint64_t seed = 0) {
    uint64_t h = splitmix64(seed ^ 0xa0761d6478bd642fULL);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

// Family of independent hash functions indexed by `index`, all derived from
// one seed. Used for minhash permutations and Bloom probes.
constexpr uint64_t hash64_indexed(uint64_t seed, uint64_t index, std::string_view bytes) {
    return hash64(bytes, splitmix64(seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
}

}  // namespace omni
