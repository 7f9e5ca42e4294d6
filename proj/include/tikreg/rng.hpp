#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace tikreg {

/// Philox4x32-10 counter-based generator (Salmon et al.). Stateless: every
/// output block is a pure function of (key, counter).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Independent random streams, one per purpose, so observation noise never
/// shares draws with prior samples or weight perturbations.
enum class StreamDomain : std::uint32_t {
  observation_noise = 1,
  prior_sample = 2,
  weight_perturbation = 3,
  tail_bound_check = 4,
};

/// Random-access standard normals addressed by (seed, domain, stream, index).
/// The value at a given address does not depend on evaluation order, so
/// Monte Carlo loops can be split across any number of workers.
class NormalField {
 public:
  NormalField(std::uint64_t seed, StreamDomain domain) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        domain_(static_cast<std::uint32_t>(domain)) {}

  /// Standard normal for coordinate `index` (0-based) of stream `stream`.
  double normal(std::uint64_t stream, std::uint64_t index) const noexcept {
    const auto pair = normal_pair(stream, index / 2);
    return (index % 2 == 0) ? pair[0] : pair[1];
  }

  /// Two normals sharing one Philox block (Box-Muller).
  std::array<double, 2> normal_pair(std::uint64_t stream, std::uint64_t pair_index) const noexcept {
    const auto block = raw(stream, pair_index);
    const double u1 = to_open_unit(block[0], block[1]);
    const double u2 = to_open_unit(block[2], block[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Uniform on (0, 1].
  double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    const auto block = raw(stream, index);
    return to_open_unit(block[0], block[1]);
  }

  /// Fills `out` with normals for indices 0..out.size()-1 of `stream`.
  template <typename Range>
  void fill(std::uint64_t stream, Range& out) const noexcept {
    const std::size_t n = out.size();
    for (std::size_t p = 0; 2 * p < n; ++p) {
      const auto pair = normal_pair(stream, p);
      out[2 * p] = pair[0];
      if (2 * p + 1 < n) out[2 * p + 1] = pair[1];
    }
  }

 private:
  Philox4x32::Block raw(std::uint64_t stream, std::uint64_t counter) const noexcept {
    // counter layout: (counter lo, counter hi ^ domain, stream lo, stream hi)
    const Philox4x32::Block ctr{
        static_cast<std::uint32_t>(counter),
        static_cast<std::uint32_t>(counter >> 32) ^ (domain_ << 24),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32)};
    return Philox4x32::generate(ctr, key_);
  }

  // 53 random bits mapped to (0, 1].
  static double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t domain_;
};

}  // namespace tikreg
