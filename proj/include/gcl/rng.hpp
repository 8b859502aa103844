#pragma once

#include <cstdint>
#include <random>

namespace gcl {

// splitmix64 finalizer; used to derive independent stream seeds from
// (master_seed, stream_id) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(mix64(master) ^ mix64(stream + 0x51'7c'c1'b7'27'22'0a'95ull));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream) {
    return std::mt19937_64(derive_seed(master, stream));
}

}  // namespace gcl
