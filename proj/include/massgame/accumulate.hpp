#pragma once

// Summation utilities.
//
// neumaier_sum: compensated running sum, error O(eps) independent of n.
//
// exact_positive_sum: fixed-point superaccumulator for positive doubles.
// It represents the running sum exactly over the entire double range
// (subnormals included), so prefix sums of mass sequences that mix
// magnitudes like 1 and 2^-900 stay strictly increasing in exact
// arithmetic and each reported prefix is the correctly rounded double.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace massgame {

class neumaier_sum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }
  void reset() noexcept { sum_ = comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class exact_positive_sum {
  // Bit i of the accumulator (limb i/64, position i%64) has value
  // 2^(i - kBias).  The span covers 2^-1152 .. 2^1150, enough for any
  // finite positive double plus carry headroom.
  static constexpr int kLimbs = 36;
  static constexpr int kBias = 1152;

 public:
  void add(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("exact_positive_sum: value must be positive and finite");
    }
    int e = 0;
    const double fr = std::frexp(x, &e);  // x = fr * 2^e, fr in [0.5, 1)
    const auto mant = static_cast<std::uint64_t>(std::ldexp(fr, 53));  // exact
    const int bitpos = e - 53 + kBias;    // position of mantissa bit 0
    const int limb = bitpos >> 6;
    const int shift = bitpos & 63;
    add_at(limb, shift ? (mant << shift) : mant);
    if (shift) add_at(limb + 1, mant >> (64 - shift));
  }

  bool empty() const noexcept {
    for (int i = 0; i < kLimbs; ++i)
      if (limbs_[i]) return false;
    return true;
  }

  // Correctly rounded (nearest-even) double value of the exact sum.
  // Throws on overflow past the double range.
  double round_to_double() const {
    int top = kLimbs - 1;
    while (top >= 0 && limbs_[top] == 0) --top;
    if (top < 0) return 0.0;
    const int msb = 63 - countl_zero(limbs_[top]);
    const long b = static_cast<long>(top) * 64 + msb;  // global index of MSB
    if (b - kBias >= 1024) {
      throw std::overflow_error("exact_positive_sum: sum exceeds double range");
    }
    // Correct rounding below assumes a normal-range result; the library
    // never accumulates sums smaller than the first mass, which is
    // well above this floor for every shipped construction.
    if (b - kBias < -1000) {
      throw std::runtime_error("exact_positive_sum: sum below supported range");
    }
    std::uint64_t m54 = extract_bits(b - 53, 54);  // 53 kept bits + round bit
    const bool sticky = any_bits_below(b - 53);
    std::uint64_t keep = m54 >> 1;
    const bool round_bit = (m54 & 1) != 0;
    if (round_bit && (sticky || (keep & 1))) {
      ++keep;
      if (keep == (1ull << 53)) {  // carry into the next binade
        return std::ldexp(static_cast<double>(1ull << 52), static_cast<int>(b - 51 - kBias));
      }
    }
    return std::ldexp(static_cast<double>(keep), static_cast<int>(b - 52 - kBias));
  }

  void reset() noexcept { limbs_.fill(0); }

 private:
  void add_at(int limb, std::uint64_t v) {
    if (v == 0) return;
    while (true) {
      if (limb >= kLimbs) throw std::overflow_error("exact_positive_sum: overflow");
      const std::uint64_t before = limbs_[limb];
      limbs_[limb] = before + v;
      if (limbs_[limb] >= before) return;  // no carry
      v = 1;  // propagate carry into the next limb
      ++limb;
    }
  }

  // Bits [lo, lo+n) as an unsigned value, n <= 54; bits below index 0 read as 0.
  std::uint64_t extract_bits(long lo, int n) const noexcept {
    if (lo < 0) {
      const int pad = static_cast<int>(-lo);
      if (pad >= n) return 0;
      return extract_bits(0, n - pad) << pad;
    }
    const int limb = static_cast<int>(lo >> 6);
    const int sh = static_cast<int>(lo & 63);
    std::uint64_t out = 0;
    if (limb < kLimbs) out = limbs_[limb] >> sh;
    if (sh && limb + 1 < kLimbs) out |= limbs_[limb + 1] << (64 - sh);
    if (n < 64) out &= (1ull << n) - 1;
    return out;
  }

  bool any_bits_below(long lo) const noexcept {
    if (lo <= 0) return false;
    const int full = static_cast<int>(lo >> 6);
    for (int i = 0; i < full && i < kLimbs; ++i)
      if (limbs_[i]) return true;
    const int rem = static_cast<int>(lo & 63);
    if (rem && full < kLimbs) {
      if (limbs_[full] & ((1ull << rem) - 1)) return true;
    }
    return false;
  }

  static int countl_zero(std::uint64_t v) noexcept {
    int n = 0;
    if (!(v >> 32)) { n += 32; v <<= 32; }
    if (!(v >> 48)) { n += 16; v <<= 16; }
    if (!(v >> 56)) { n += 8; v <<= 8; }
    if (!(v >> 60)) { n += 4; v <<= 4; }
    if (!(v >> 62)) { n += 2; v <<= 2; }
    if (!(v >> 63)) { n += 1; }
    return n;
  }

  std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace massgame
