#include "rng.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmt::rng {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t* lo,
                      std::uint32_t* hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *lo = static_cast<std::uint32_t>(p);
  *hi = static_cast<std::uint32_t>(p >> 32);
}

inline void round_once(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0,
                       std::uint32_t k1) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM4x32A, ctr[0], &lo0, &hi0);
  mul_hi_lo(kPhiloxM4x32B, ctr[2], &lo1, &hi1);
  ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t c0,
                                        std::uint64_t c1) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
      static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c1 >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(ctr, k0, k1);
    k0 += kPhiloxW32A;
    k1 += kPhiloxW32B;
  }
  return ctr;
}

Stream::Stream(std::uint64_t seed, Tag tag, std::uint64_t id0,
               std::uint64_t id1)
    : seed_(seed) {
  constexpr std::uint64_t kIdMask = (std::uint64_t{1} << 28) - 1;
  if (id0 > kIdMask || id1 > kIdMask) {
    throw std::invalid_argument("rng::Stream id out of 28-bit range");
  }
  prefix_ = (static_cast<std::uint64_t>(tag) << 56) | (id0 << 28) | id1;
}

void Stream::refill() {
  buf_ = philox4x32(seed_, block_++, prefix_);
  avail_ = 4;
}

std::uint64_t Stream::u64() {
  if (avail_ < 2) refill();
  const std::uint64_t hi = buf_[--avail_];
  const std::uint64_t lo = buf_[--avail_];
  return (hi << 32) | lo;
}

double Stream::u01() {
  return static_cast<double>(u64() >> 11) * 0x1.0p-53;
}

double Stream::u01_open0() {
  return static_cast<double>((u64() >> 11) + 1) * 0x1.0p-53;
}

double Stream::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = u01_open0();
  const double u2 = u01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = r * std::sin(a);
  has_cached_gaussian_ = true;
  return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b) {
  const std::uint64_t c1 =
      (static_cast<std::uint64_t>(Tag::Derive) << 56) ^ b;
  const auto w = philox4x32(seed, a, c1);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

}  // namespace rmt::rng
