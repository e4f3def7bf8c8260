#pragma once

#include <cstdint>
#include <random>

namespace phi4lab {

/// Counter-based stream derivation: stream c of master seed s is seeded by
/// splitmix64 applied to s xor (c+1)*golden. Chunk results are reduced in
/// chunk order, so outputs are independent of how chunks map onto workers.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t stream_seed(uint64_t master, uint64_t stream) {
    return splitmix64(master ^ (stream + 1) * 0x9e3779b97f4a7c15ULL);
}

inline std::mt19937_64 make_engine(uint64_t master, uint64_t stream) {
    return std::mt19937_64(stream_seed(master, stream));
}

}  // namespace phi4lab
