#pragma once

#include <cstdint>

namespace ncauth {

// Deterministic 64-bit generator (splitmix64). Used everywhere a seed is
// accepted so that identical seeds give identical artifacts across platforms;
// std::uniform_int_distribution is implementation-defined and would not.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) by rejection, bias-free.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // Derives an independent stream; children of distinct labels never collide
  // with the parent sequence.
  Rng fork(std::uint64_t label) {
    Rng child(next_u64() ^ (label * 0xd6e8feb86659fd93ULL));
    return child;
  }

private:
  std::uint64_t state_;
};

}  // namespace ncauth
