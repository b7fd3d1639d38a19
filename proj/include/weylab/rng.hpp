#pragma once

// Counter-based random streams: every draw is a pure function of
// (seed, index, word), so parallel workers can split an index range and
// still reproduce a serial run bit for bit.

#include <cstdint>

namespace weylab::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64 random bits for (seed, index, word).
constexpr std::uint64_t keyed(std::uint64_t seed, std::uint64_t index, std::uint64_t word = 0) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index * 0xd1342543de82ef95ULL + word));
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double keyed_unit(std::uint64_t seed, std::uint64_t index, std::uint64_t word = 0) {
  return static_cast<double>(keyed(seed, index, word) >> 11) * 0x1.0p-53;
}

/// Sequential generator over one key, for hot loops that need many draws.
class Stream {
 public:
  constexpr Stream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {}
  constexpr std::uint64_t next() { return keyed(seed_, index_, word_++); }
  constexpr double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t word_ = 0;
};

}  // namespace weylab::rng
