#pragma once

#include <cstdint>
#include <string_view>

namespace vtpseg {

// Counter-free splitmix64 mix step. All randomness in the project is derived
// through these helpers so that runs are bit-identical for a given seed,
// independent of platform and standard-library version.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Maps a hash to [0, 1).
inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return to_unit(next_u64()); }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Inclusive integer range.
    int next_int(int lo, int hi) {
        if (hi <= lo) return lo;
        const int span = hi - lo + 1;
        int v = lo + static_cast<int>(next_unit() * span);
        return v > hi ? hi : v;
    }

  private:
    std::uint64_t state_;
};

}  // namespace vtpseg
