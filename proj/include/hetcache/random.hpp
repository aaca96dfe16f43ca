#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hetcache {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Uniform random bit generator for one (seed, trial, stream) triple. The key
/// carries the seed; the counter is (block, trial lo, trial hi, stream).
/// Usable with <random> distributions.
class KeyedStream {
 public:
  using result_type = std::uint32_t;

  KeyedStream(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trial_{static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 4) {
      refill();
    }
    return buffer_[used_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t a = (*this)() >> 5;
    const std::uint64_t b = (*this)() >> 6;
    return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * 0x1.0p-53;
  }

  std::uint32_t stream() const { return stream_; }

 private:
  void refill() {
    const Philox4x32::Counter ctr{block_, trial_[0], trial_[1], stream_};
    buffer_ = Philox4x32::block(ctr, key_);
    ++block_;
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::array<std::uint32_t, 2> trial_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace hetcache
