#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace descent {

/// Philox4x32-10 counter-based generator.
struct Philox4x32 {
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Block generate(Block ctr, Key key) noexcept {
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0;
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2;
      const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
      const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
      c1 = static_cast<std::uint32_t>(p1);
      c3 = static_cast<std::uint32_t>(p0);
      c0 = n0;
      c2 = n2;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return {c0, c1, c2, c3};
  }
};

/// Stream of uniforms and standard normals keyed by (seed, stream id). The
/// n-th block of a stream is a pure function of (seed, stream, n), so paths
/// can be generated in any order or on any thread.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    if (cached_uniforms_ == 0) refill_uniforms();
    return uniforms_[--cached_uniforms_];
  }

  /// Standard normal by the Marsaglia polar method.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  std::uint64_t blocks_used() const noexcept { return counter_; }

 private:
  // Four counters per refill give the core independent multiply chains.
  void refill_uniforms() noexcept {
    for (int b = 0; b < kBlocks; ++b) {
      const std::uint64_t n = counter_ + static_cast<std::uint64_t>(b);
      const Philox4x32::Block ctr{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                                  static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(stream_ >> 32)};
      const auto out = Philox4x32::generate(ctr, key_);
      const std::uint64_t lo = (std::uint64_t{out[0]} << 32) | out[1];
      const std::uint64_t hi = (std::uint64_t{out[2]} << 32) | out[3];
      // Stored in reverse so that uniform() yields them in counter order.
      uniforms_[2 * kBlocks - 1 - 2 * b] = (static_cast<double>(lo >> 11) + 0.5) * 0x1.0p-53;
      uniforms_[2 * kBlocks - 2 - 2 * b] = (static_cast<double>(hi >> 11) + 0.5) * 0x1.0p-53;
    }
    counter_ += kBlocks;
    cached_uniforms_ = 2 * kBlocks;
  }

  static constexpr int kBlocks = 4;
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double uniforms_[2 * kBlocks] = {};
  int cached_uniforms_ = 0;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace descent
