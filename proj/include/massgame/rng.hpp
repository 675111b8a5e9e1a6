#pragma once

// Counter-addressed pseudo-random streams.
//
// Every random quantity in the library is a pure function of a 64-bit
// stream key and a 64-bit counter.  Keys are derived from a master seed
// by a fixed mixing chain over (purpose tag, a, b), so distinct
// (replication, increment) pairs get independent streams and no draw
// depends on evaluation order, thread scheduling, or laziness.

#include <cstdint>
#include <cmath>

namespace massgame {

// SplitMix64 output function (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Key derivation: absorb (tag, a, b) into the master seed.
constexpr std::uint64_t derive_key(std::uint64_t master, std::uint64_t tag,
                                   std::uint64_t a = 0,
                                   std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(master + kGolden);
  h = mix64(h ^ mix64(tag + 0x6A09E667F3BCC909ull));
  h = mix64(h ^ mix64(a + 0xBB67AE8584CAA73Bull));
  h = mix64(h ^ mix64(b + 0x3C6EF372FE94F82Bull));
  return h;
}

// Stream purposes.  Fixed values are part of the reproducibility contract.
enum class StreamTag : std::uint64_t {
  mass = 1,        // random mass sequences, addressed by increment index
  path = 2,        // per (replication, increment) sampling paths
  calibration = 3, // internal estimation (e.g. stopping-index certification)
  scratch = 9,     // tests and ad-hoc draws
};

// A counter stream: value(i) = mix64(key + (i+1)*kGolden).
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGolden);
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }

  // Uniform in [0,1), 53 random bits.
  double next_unit() noexcept { return to_unit(next_u64()); }

  // Uniform in (0,1], safe as a log argument.
  double next_unit_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Consumes exactly two counters per call (Box-Muller).
  double next_gauss() noexcept {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = to_unit(next_u64());
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

  static double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stateless helpers addressed by absolute counter; these define the
// canonical randomness of sampling paths (see rv_family.hpp).
inline double unit_at(std::uint64_t key, std::uint64_t counter) noexcept {
  return CounterStream::to_unit(mix64(key + (counter + 1) * kGolden));
}

// +1/-1 step, one counter.
inline double sign_step_at(std::uint64_t key, std::uint64_t counter) noexcept {
  return (mix64(key + (counter + 1) * kGolden) & 1ull) ? 1.0 : -1.0;
}

// Standard normal step, two counters (2*counter, 2*counter+1).
inline double gauss_step_at(std::uint64_t key, std::uint64_t counter) noexcept {
  const std::uint64_t b1 = mix64(key + (2 * counter + 1) * kGolden);
  const std::uint64_t b2 = mix64(key + (2 * counter + 2) * kGolden);
  const double u1 = (static_cast<double>(b1 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = CounterStream::to_unit(b2);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

// Key layout used across the library.
struct StreamLayout {
  std::uint64_t master = 0;

  std::uint64_t mass_key(std::uint64_t k) const noexcept {
    return derive_key(master, static_cast<std::uint64_t>(StreamTag::mass), k);
  }
  std::uint64_t path_key(std::uint64_t replication, std::uint64_t k) const noexcept {
    return derive_key(master, static_cast<std::uint64_t>(StreamTag::path),
                      replication, k);
  }
  std::uint64_t calibration_key(std::uint64_t j) const noexcept {
    return derive_key(master,
                      static_cast<std::uint64_t>(StreamTag::calibration), j);
  }
};

}  // namespace massgame
