#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace freqwarm {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
/// block index and a 64-bit stream id, so independent streams (one per image,
/// one per training run) never overlap and can be drawn in any order.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Stable 64-bit tag for naming derived streams (FNV-1a).
std::uint64_t stream_tag(std::string_view name);

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open_zero();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via Box-Muller on one Philox block: the first 64 bits
  /// give u1 in (0,1], the second 64 bits give u2 in [0,1), and the cosine
  /// branch sqrt(-2 ln u1) cos(2 pi u2) is returned.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t block() const { return block_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace freqwarm
