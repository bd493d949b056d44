#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>

namespace ncl {

// SipHash-2-4. All lazily sampled oracle values are pure functions of
// (seed, tag, index), so an instance never stores tables and two instances
// built from the same parameters answer identically.
inline uint64_t siphash24(uint64_t k0, uint64_t k1, const uint8_t* data, size_t len) {
  auto rotl = [](uint64_t x, int b) { return (x << b) | (x >> (64 - b)); };
  uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
  uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
  uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
  uint64_t v3 = 0x7465646279746573ULL ^ k1;
  auto sipround = [&] {
    v0 += v1; v1 = rotl(v1, 13); v1 ^= v0; v0 = rotl(v0, 32);
    v2 += v3; v3 = rotl(v3, 16); v3 ^= v2;
    v0 += v3; v3 = rotl(v3, 21); v3 ^= v0;
    v2 += v1; v1 = rotl(v1, 17); v1 ^= v2; v2 = rotl(v2, 32);
  };
  size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    uint64_t m = 0;
    for (int b = 0; b < 8; ++b) m |= uint64_t(data[i + b]) << (8 * b);
    v3 ^= m;
    sipround(); sipround();
    v0 ^= m;
  }
  uint64_t b = uint64_t(len & 0xff) << 56;
  for (size_t j = 0; i + j < len; ++j) b |= uint64_t(data[i + j]) << (8 * j);
  v3 ^= b;
  sipround(); sipround();
  v0 ^= b;
  v2 ^= 0xff;
  sipround(); sipround(); sipround(); sipround();
  return v0 ^ v1 ^ v2 ^ v3;
}

// One word of the keyed stream for (seed, tag) at position (index, counter).
inline uint64_t keyed_word(uint64_t seed, uint64_t tag, uint64_t index, uint64_t counter = 0) {
  uint8_t msg[16];
  for (int b = 0; b < 8; ++b) msg[b] = uint8_t(index >> (8 * b));
  for (int b = 0; b < 8; ++b) msg[8 + b] = uint8_t(counter >> (8 * b));
  return siphash24(seed, tag, msg, sizeof msg);
}

// Uniform draw from [0, range). Non-power-of-two ranges go through rejection
// sampling on the counter so the result stays exactly uniform.
inline uint64_t keyed_uniform(uint64_t seed, uint64_t tag, uint64_t index, uint64_t range) {
  if (range == 0) throw std::invalid_argument("keyed_uniform: empty range");
  if ((range & (range - 1)) == 0) return keyed_word(seed, tag, index) & (range - 1);
  const uint64_t limit = range * (~uint64_t{0} / range);
  for (uint64_t ctr = 0;; ++ctr) {
    uint64_t w = keyed_word(seed, tag, index, ctr);
    if (w < limit) return w % range;
  }
}

// Tags separating the independent value streams hanging off one seed.
namespace tag {
inline constexpr uint64_t point_oracle = 0x68;   // H values
inline constexpr uint64_t tuple_oracle = 0x67;   // G values
inline constexpr uint64_t flip_reply = 0x66;     // write-only memory replies
inline constexpr uint64_t trial_seed = 0x74;     // per-trial instance seeds
}  // namespace tag

// Stable derivation of per-trial seeds inside sweeps.
inline uint64_t derive_seed(uint64_t base, uint64_t salt) {
  return keyed_word(base, tag::trial_seed, salt);
}

}  // namespace ncl
