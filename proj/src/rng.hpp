#pragma once

#include <array>
#include <cstdint>

// Counter-based random number generation (Philox4x32-10).
//
// Every random object in the library is addressed, not streamed: a draw is a
// pure function of (seed, stream tag, two stream ids, draw index). Matrix
// entry (i,j) always sees the same stream regardless of sampling order or
// thread count, which is what makes minors, resumed runs and parallel drivers
// reproducible.

namespace rmt::rng {

// Stream tags partition the counter space so that unrelated samplers keyed by
// the same ids can never collide.
enum class Tag : std::uint64_t {
  MatrixEntry = 1,
  VectorEntry = 2,
  SubsetEntry = 3,
  Trial = 4,
  Derive = 5,
  Heuristic = 6,
  Aux = 7,
};

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t c0,
                                        std::uint64_t c1);

// One addressed stream: key = seed, counter prefix = (tag, id0, id1).
// id0 and id1 must fit in 28 bits each (plenty for matrix indices and trial
// counters at the scales this library runs).
class Stream {
 public:
  Stream(std::uint64_t seed, Tag tag, std::uint64_t id0, std::uint64_t id1);

  // Uniform double in [0,1) with 53 random bits.
  double u01();
  // Uniform double in (0,1], safe as a log() argument.
  double u01_open0();
  std::uint64_t u64();
  // Standard normal via Box-Muller; draws are pairwise cached.
  double gaussian();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t prefix_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int avail_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

// Derives an independent sub-seed, e.g. per-trial seeds hash(seed, trial).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0);

}  // namespace rmt::rng
