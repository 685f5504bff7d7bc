#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace obstacle {

/// Philox4x32-10 counter-based generator. Every (key, counter) pair maps to
/// an independent block of four 32-bit words, so draws can be addressed by
/// (path, step) without sequential state.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(Block counter) const {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * counter[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                 static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Uniform in (0, 1) from 64 random bits.
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 21) ^ (lo >> 11);  // 53 bits
  return (static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) + 0.5) * 0x1.0p-53;
}

/// Two standard normals for (path, pair, stream) via Box-Muller.
inline std::array<double, 2> normal_pair(const Philox4x32& gen, std::uint64_t path,
                                         std::uint32_t pair, std::uint32_t stream) {
  const auto b = gen({static_cast<std::uint32_t>(path), pair, stream,
                      static_cast<std::uint32_t>(path >> 32)});
  const double u1 = open_unit(b[0], b[1]);
  const double u2 = open_unit(b[2], b[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return {radius * std::cos(kTwoPi * u2), radius * std::sin(kTwoPi * u2)};
}

/// Standard normal number `step` of path `path` in a given stream.
class NormalStream {
 public:
  NormalStream(const Philox4x32& gen, std::uint64_t path, std::uint32_t stream)
      : gen_(gen), path_(path), stream_(stream) {}

  double operator()(std::uint32_t step) {
    const std::uint32_t pair = step / 2;
    if (pair != cached_pair_) {
      cache_ = normal_pair(gen_, path_, pair, stream_);
      cached_pair_ = pair;
    }
    return cache_[step % 2];
  }

 private:
  const Philox4x32& gen_;
  std::uint64_t path_;
  std::uint32_t stream_;
  std::uint32_t cached_pair_ = 0xFFFFFFFFu;
  std::array<double, 2> cache_{};
};

}  // namespace obstacle
