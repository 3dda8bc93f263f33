#pragma once

#include <cstdint>
#include <random>

namespace aoiss {

/// Mixes a base seed with a stream index; used to derive independent,
/// reproducible substreams (one per sweep row, restart, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// mt19937_64 with hand-rolled mappings. The engine's output sequence is
/// pinned by the standard; std::uniform_real_distribution is not, so the
/// mappings below keep streams identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {  // [0, 1) with 53-bit resolution
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::uint64_t next_u64() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

}  // namespace aoiss
