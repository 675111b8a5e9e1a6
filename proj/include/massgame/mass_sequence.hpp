#pragma once

// Mass sequences: positive increment generators, prefix sums and
// time-location arithmetic.
//
// A sequence spec names a construction plus parameters; deterministic
// specs reproduce bit-identical sequences on re-instantiation and random
// ones do so per seed.  Generators emit runs (value, count) so consumers
// that only need the run structure (the simulation engine, prefix
// builders) can stay O(#runs) where possible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "massgame/accumulate.hpp"
#include "massgame/rng.hpp"

namespace massgame {

// ---------------------------------------------------------------------------
// Specs

struct MassSpec {
  std::string id;
  std::map<std::string, double> params;                 // numeric parameters
  std::vector<std::pair<double, double>> atoms;          // iid law: (value, prob)
  std::optional<std::uint64_t> seed;

  static MassSpec make(std::string id_) {
    MassSpec s;
    s.id = std::move(id_);
    return s;
  }
  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

inline const std::vector<std::string>& mass_spec_ids() {
  static const std::vector<std::string> ids = {
      "const",
      "example_F0",
      "example_Fnot",
      "example_irr",
      "example_irregbounded",
      "example_divergent",
      "example_cesar",
      "example_cesaroifreq",
      "example_triangular",
      "example_unbnofreq",
      "example_remp",
      "example_irregL1",
      "example_imifreq",
      "iid",
      "geom4",
      "w2counter",
  };
  return ids;
}

// ---------------------------------------------------------------------------
// Triangular-array index: smallest i with (i-1)i/2 <= k <= i(i+1)/2,
// j = k - (i-1)i/2.  Ties at k = i(i+1)/2 resolve to the smaller row.
struct TriIndex {
  std::uint64_t i;
  std::uint64_t j;
};

inline TriIndex tri_index(std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("tri_index: k must be >= 1");
  auto i = static_cast<std::uint64_t>(std::ceil((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0));
  if (i == 0) i = 1;
  // Guard against sqrt rounding on huge k.
  while (i > 1 && (i - 1) * i / 2 > k) --i;
  while (i * (i + 1) / 2 < k) ++i;
  if ((i - 1) * i / 2 == k && i > 1) --i;  // overlap: prefer the smaller row
  return {i, k - (i - 1) * i / 2};
}

// ---------------------------------------------------------------------------
// Generators

struct MassRun {
  double value;
  std::uint64_t count;
};

namespace detail {

// 2^-k, clamped at the smallest positive double for k beyond the
// representable range (see decisions on dyadic filler underflow).
inline double dyadic(std::uint64_t k, bool* clamped = nullptr) {
  if (k > 1074) {
    if (clamped) *clamped = true;
    return std::numeric_limits<double>::denorm_min();
  }
  return std::ldexp(1.0, -static_cast<int>(k));
}

// Greedy minimal block lengths for the K/L alternating construction:
// A_1 = B_1 = 1 and, for n >= 1,
//   L*(B_1+..+B_n)   <= (1/n) * K*(A_1+..+A_{n+1})
//   K*(A_1+..+A_{n+1}) <= (1/n) * L*(B_1+..+B_{n+1})
// with A and B strictly increasing.
struct IrrBlocks {
  std::vector<double> A, B;  // integer-valued
};

inline IrrBlocks irr_blocks(double K, double L, std::size_t blocks) {
  IrrBlocks out;
  double sumA = 0, sumB = 0;
  for (std::size_t n0 = 0; n0 < blocks; ++n0) {
    double a;
    if (n0 == 0) {
      a = 1;
    } else {
      const double n = static_cast<double>(n0);
      a = std::max(out.A.back() + 1, std::ceil(n * L * sumB / K - sumA));
      while (L * sumB > (K * (sumA + a)) / n) a += 1;  // strict FP-safe fixup
    }
    out.A.push_back(a);
    sumA += a;
    double b;
    if (n0 == 0) {
      b = 1;
    } else {
      const double n = static_cast<double>(n0);
      b = std::max(out.B.back() + 1, std::ceil(n * K * sumA / L - sumB));
      while (K * sumA > (L * (sumB + b)) / n) b += 1;
    }
    out.B.push_back(b);
    sumB += b;
    if (!std::isfinite(sumA) || !std::isfinite(sumB)) {
      throw std::overflow_error("irr_blocks: block sums exceed double range");
    }
  }
  return out;
}

// Greedy minimal auxiliary lengths for the spike construction:
// N_1 = 1 and, for i >= 1,  K_i >= i*(N_1+..+N_i),  N_{i+1} >= i*(K_1+..+K_i).
struct RempBlocks {
  std::vector<double> N, K;
};

inline RempBlocks remp_blocks(std::size_t blocks) {
  RempBlocks out;
  double sumN = 0, sumK = 0;
  for (std::size_t i1 = 1; i1 <= blocks; ++i1) {
    const double i = static_cast<double>(i1);
    const double n = (i1 == 1) ? 1.0 : std::max(1.0, std::ceil((i - 1) * sumK));
    out.N.push_back(n);
    sumN += n;
    const double k = std::max(1.0, std::ceil(i * sumN));
    out.K.push_back(k);
    sumK += k;
    if (!std::isfinite(sumN) || !std::isfinite(sumK)) {
      throw std::overflow_error("remp_blocks: block sums exceed double range");
    }
  }
  return out;
}

}  // namespace detail

// Stateful generator; single-owner.  Distinct instances are independent.
class MassSequence {
 public:
  virtual ~MassSequence() = default;

  // Next run of identical masses.  Never returns count 0.
  virtual MassRun next_run() = 0;

  double next() {
    if (pending_.count == 0) pending_ = next_run_checked();
    --pending_.count;
    ++emitted_;
    return pending_.value;
  }

  // Run-level access used by streaming consumers; interacts consistently
  // with next().
  MassRun take_run(std::uint64_t max_count) {
    if (pending_.count == 0) pending_ = next_run_checked();
    const std::uint64_t n = std::min(pending_.count, max_count);
    pending_.count -= n;
    emitted_ += n;
    return {pending_.value, n};
  }

  std::uint64_t emitted() const noexcept { return emitted_; }
  bool dust_clamped() const noexcept { return dust_clamped_; }

 protected:
  bool dust_clamped_ = false;

 private:
  MassRun next_run_checked() {
    MassRun r = next_run();
    if (r.count == 0) throw std::logic_error("mass generator produced an empty run");
    if (!(r.value > 0.0) || !std::isfinite(r.value)) {
      throw std::overflow_error("mass generator produced a nonpositive or nonfinite mass");
    }
    return r;
  }

  MassRun pending_{0.0, 0};
  std::uint64_t emitted_ = 0;
};

namespace detail {

class ConstGen final : public MassSequence {
 public:
  explicit ConstGen(double c) : c_(c) {}
  MassRun next_run() override { return {c_, 1u << 20}; }

 private:
  double c_;
};

// Rows: 1, then (i-1) copies of 2^-(i-1).
class F0Gen final : public MassSequence {
 public:
  MassRun next_run() override {
    if (phase_ == 0) {
      phase_ = (row_ > 1) ? 1 : 0;
      const MassRun head{1.0, 1};
      if (row_ == 1) ++row_;
      return head;
    }
    phase_ = 0;
    const std::uint64_t i = row_++;
    return {dyadic(i - 1, &dust_clamped_), i - 1};
  }

 private:
  std::uint64_t row_ = 1;
  int phase_ = 0;
};

// Rows: i, then (i-1) ones.
class TriangularGen final : public MassSequence {
 public:
  MassRun next_run() override {
    if (phase_ == 0) {
      const std::uint64_t i = row_;
      phase_ = (i > 1) ? 1 : 0;
      if (i == 1) ++row_;
      return {static_cast<double>(i), 1};
    }
    phase_ = 0;
    const std::uint64_t i = row_++;
    return {1.0, i - 1};
  }

 private:
  std::uint64_t row_ = 1;
  int phase_ = 0;
};

// Rows: donor value, then (i-1) copies of 2^-i.
class DustedRowsGen final : public MassSequence {
 public:
  explicit DustedRowsGen(std::unique_ptr<MassSequence> donor)
      : donor_(std::move(donor)) {}
  MassRun next_run() override {
    if (phase_ == 0) {
      const std::uint64_t i = row_;
      phase_ = (i > 1) ? 1 : 0;
      if (i == 1) ++row_;
      return {donor_->next(), 1};
    }
    phase_ = 0;
    const std::uint64_t i = row_++;
    MassRun r{dyadic(i, &dust_clamped_), i - 1};
    return r;
  }

 private:
  std::unique_ptr<MassSequence> donor_;
  std::uint64_t row_ = 1;
  int phase_ = 0;
};

class DivergentGen final : public MassSequence {
 public:
  MassRun next_run() override { return {static_cast<double>(k_++), 1}; }

 private:
  std::uint64_t k_ = 1;
};

// 1 at odd indices, k at even indices.
class CesarGen final : public MassSequence {
 public:
  MassRun next_run() override {
    const std::uint64_t k = k_++;
    return {(k % 2 == 1) ? 1.0 : static_cast<double>(k), 1};
  }

 private:
  std::uint64_t k_ = 1;
};

class Geom4Gen final : public MassSequence {
 public:
  MassRun next_run() override {
    const double v = m_;
    m_ *= 4.0;  // next_run_checked flags the overflow once v goes nonfinite
    return {v, 1};
  }

 private:
  double m_ = 4.0;
};

// m_k = g^{-1}(1/(k+1)); the index shift keeps the first mass positive for
// the default g (g(0) = 1 would otherwise force m_1 = 0).
class W2CounterGen final : public MassSequence {
 public:
  MassRun next_run() override {
    const double k = static_cast<double>(k_++);
    const double y = k + 1.0;        // g(m) = 1/sqrt(m+1)  =>  m = y^2 - 1
    return {y * y - 1.0, 1};
  }

 private:
  std::uint64_t k_ = 1;
};

class IidGen final : public MassSequence {
 public:
  IidGen(std::vector<std::pair<double, double>> atoms, std::uint64_t seed)
      : atoms_(std::move(atoms)) {
    layout_.master = seed;
    double total = 0;
    for (auto& [v, p] : atoms_) {
      if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("iid: atom values must be positive");
      if (!(p > 0)) throw std::invalid_argument("iid: atom probabilities must be positive");
      total += p;
    }
    for (auto& [v, p] : atoms_) p /= total;
  }

  MassRun next_run() override {
    const double u = unit_at(layout_.mass_key(k_), 0);
    ++k_;
    double acc = 0;
    for (const auto& [v, p] : atoms_) {
      acc += p;
      if (u < acc) return {v, 1};
    }
    return {atoms_.back().first, 1};
  }

 private:
  std::vector<std::pair<double, double>> atoms_;
  StreamLayout layout_;
  std::uint64_t k_ = 1;
};

// Alternating K/L blocks with the greedily grown lengths.
class IrrGen final : public MassSequence {
 public:
  IrrGen(double K, double L) : K_(K), L_(L) {}

  MassRun next_run() override {
    if (in_A_) {
      in_A_ = false;
      ensure(block_ + 1);
      return {K_, static_cast<std::uint64_t>(blocks_.A[block_])};
    }
    in_A_ = true;
    ensure(block_ + 1);
    const std::size_t b = block_++;
    return {L_, static_cast<std::uint64_t>(blocks_.B[b])};
  }

 private:
  void ensure(std::size_t need) {
    if (blocks_.A.size() < need) blocks_ = detail::irr_blocks(K_, L_, need + 4);
  }

  double K_, L_;
  detail::IrrBlocks blocks_;
  std::size_t block_ = 0;
  bool in_A_ = true;
};

// N_i ones, then one spike K_i.
class RempGen final : public MassSequence {
 public:
  MassRun next_run() override {
    if (blocks_.N.size() < block_ + 1) blocks_ = detail::remp_blocks(block_ + 5);
    if (in_ones_) {
      in_ones_ = false;
      return {1.0, static_cast<std::uint64_t>(blocks_.N[block_])};
    }
    in_ones_ = true;
    return {blocks_.K[block_++], 1};
  }

 private:
  detail::RempBlocks blocks_;
  std::size_t block_ = 0;
  bool in_ones_ = true;
};

// Odd slots copy a donor; even slot 2k carries k * (sum so far).
class CesaroIFreqGen final : public MassSequence {
 public:
  explicit CesaroIFreqGen(std::unique_ptr<MassSequence> donor)
      : donor_(std::move(donor)) {}

  MassRun next_run() override {
    if (odd_) {
      odd_ = false;
      const double m = donor_->next();
      total_ += m;
      return {m, 1};
    }
    odd_ = true;
    const double m = static_cast<double>(pair_++) * total_;
    total_ += m;
    return {m, 1};  // nonfinite values are rejected by the checked wrapper
  }

 private:
  std::unique_ptr<MassSequence> donor_;
  double total_ = 0;
  std::uint64_t pair_ = 1;
  bool odd_ = true;
};

// The adaptive frequency loop.  Tracks the running frequency of emitted
// masses equal to 1 and switches between a dust rule and a donor rule:
//   (ii)  while freq > 1/4: emit 2^-k
//   (iii) while freq < 3/4: emit the next donor increment
// Comparisons are strict; the plain construction uses a constant-1 donor.
class AdaptiveFreqGen final : public MassSequence {
 public:
  explicit AdaptiveFreqGen(std::unique_ptr<MassSequence> donor)
      : donor_(std::move(donor)) {}

  MassRun next_run() override {
    const std::uint64_t k = k_++;       // index being emitted
    const std::uint64_t prefix = k - 1; // masses emitted so far
    double m;
    if (k == 1) {
      m = 1.0;  // frequency 1 > 1/4 keeps the dust rule active next
    } else if (dust_rule_) {
      if (4 * ones_ > prefix) {
        m = dyadic(k, &dust_clamped_);
      } else {
        dust_rule_ = false;
        m = donor_->next();
      }
    } else {
      if (4 * ones_ < 3 * prefix) {
        m = donor_->next();
      } else {
        dust_rule_ = true;
        m = dyadic(k, &dust_clamped_);
      }
    }
    if (m == 1.0) ++ones_;
    return {m, 1};
  }

 private:
  std::unique_ptr<MassSequence> donor_;
  std::uint64_t k_ = 1;
  std::uint64_t ones_ = 0;
  bool dust_rule_ = true;
};

// Donor values at positions tau(1) = 1, tau(j) = tau(j-1) + A_j, separated
// by dyadic filler 2^-k.  A_j is the least integer with
// (m'_1+..+m'_j + 1) / A_j < 1/j, i.e. A_j = floor(j*(sum+1)) + 1; the
// constraint includes the donor value the gap leads to, so it is peeked.
class InterleavedDustGen final : public MassSequence {
 public:
  explicit InterleavedDustGen(std::unique_ptr<MassSequence> donor)
      : donor_(std::move(donor)) {}

  MassRun next_run() override {
    if (gap_left_ > 0) {
      --gap_left_;
      return {dyadic(k_++, &dust_clamped_), 1};
    }
    const double m = peeked_ ? peek_value_ : donor_->next();
    peeked_ = false;
    donor_sum_ += m;
    ++j_;
    ++k_;
    peek_value_ = donor_->next();
    peeked_ = true;
    const double a =
        std::floor(static_cast<double>(j_ + 1) * (donor_sum_ + peek_value_ + 1.0)) + 1.0;
    gap_left_ = static_cast<std::uint64_t>(a) - 1;
    return {m, 1};
  }

 private:
  std::unique_ptr<MassSequence> donor_;
  double donor_sum_ = 0;
  double peek_value_ = 0;
  bool peeked_ = false;
  std::uint64_t j_ = 0;       // donor values emitted
  std::uint64_t k_ = 1;       // global index of the next emission
  std::uint64_t gap_left_ = 0;
};

}  // namespace detail

// Factory for every shipped construction.
inline std::unique_ptr<MassSequence> make_mass_sequence(const MassSpec& spec);

namespace detail {
inline std::unique_ptr<MassSequence> make_donor(const std::string& id) {
  MassSpec s = MassSpec::make(id);
  return make_mass_sequence(s);
}
}  // namespace detail

inline std::unique_ptr<MassSequence> make_mass_sequence(const MassSpec& spec) {
  const std::string& id = spec.id;
  if (id == "const") {
    const double c = spec.param("c", 1.0);
    if (!(c > 0) || !std::isfinite(c)) throw std::invalid_argument("const: c must be positive");
    return std::make_unique<detail::ConstGen>(c);
  }
  if (id == "example_F0") return std::make_unique<detail::F0Gen>();
  if (id == "example_triangular") return std::make_unique<detail::TriangularGen>();
  if (id == "example_divergent") return std::make_unique<detail::DivergentGen>();
  if (id == "example_cesar") return std::make_unique<detail::CesarGen>();
  if (id == "geom4") return std::make_unique<detail::Geom4Gen>();
  if (id == "w2counter") return std::make_unique<detail::W2CounterGen>();
  if (id == "example_irr") {
    const double K = spec.param("K", 1.0), L = spec.param("L", 2.0);
    if (!(K > 0) || !(L > 0)) throw std::invalid_argument("example_irr: K and L must be positive");
    return std::make_unique<detail::IrrGen>(K, L);
  }
  if (id == "example_irregbounded") {
    return std::make_unique<detail::DustedRowsGen>(
        std::make_unique<detail::IrrGen>(spec.param("K", 1.0), spec.param("L", 2.0)));
  }
  if (id == "example_remp") return std::make_unique<detail::RempGen>();
  if (id == "example_cesaroifreq") {
    return std::make_unique<detail::CesaroIFreqGen>(
        std::make_unique<detail::IrrGen>(spec.param("K", 1.0), spec.param("L", 2.0)));
  }
  if (id == "example_Fnot") {
    return std::make_unique<detail::AdaptiveFreqGen>(std::make_unique<detail::ConstGen>(1.0));
  }
  if (id == "example_unbnofreq") {
    return std::make_unique<detail::AdaptiveFreqGen>(std::make_unique<detail::TriangularGen>());
  }
  if (id == "example_imifreq") {
    return std::make_unique<detail::AdaptiveFreqGen>(std::make_unique<detail::RempGen>());
  }
  if (id == "example_irregL1") {
    return std::make_unique<detail::InterleavedDustGen>(std::make_unique<detail::RempGen>());
  }
  if (id == "iid") {
    if (spec.atoms.empty()) throw std::invalid_argument("iid: atom list required");
    if (!spec.seed) throw std::invalid_argument("iid: seed required for a random spec");
    return std::make_unique<detail::IidGen>(spec.atoms, *spec.seed);
  }
  throw std::invalid_argument("unknown mass spec id: " + id);
}

inline bool mass_spec_is_random(const MassSpec& spec) { return spec.id == "iid"; }

// First n masses of the named construction.
inline std::vector<double> generate(const MassSpec& spec, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  auto gen = make_mass_sequence(spec);
  std::vector<double> out;
  out.reserve(n);
  while (out.size() < n) {
    MassRun r = gen->take_run(n - out.size());
    out.insert(out.end(), r.count, r.value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prefix sums and time location

struct TimeLocation {
  std::uint64_t ell;  // 1-based index of the increment containing t
  double tbar;        // elapsed time within it, in (0, m_ell]
};

class PrefixIndex {
 public:
  PrefixIndex() = default;

  explicit PrefixIndex(std::span<const double> masses) {
    if (masses.empty()) throw std::invalid_argument("prefix: empty mass list");
    masses_.assign(masses.begin(), masses.end());
    exact_positive_sum acc;
    cumsum_.reserve(masses_.size());
    for (double m : masses_) {
      acc.add(m);  // rejects nonpositive masses
      cumsum_.push_back(acc.round_to_double());
    }
  }

  static PrefixIndex from_spec(const MassSpec& spec, std::uint64_t n) {
    auto v = generate(spec, n);
    return PrefixIndex(v);
  }

  // Generate until the prefix sum reaches target_time (or n_cap increments).
  static PrefixIndex from_spec_until(const MassSpec& spec, double target_time,
                                     std::uint64_t n_cap = (1ull << 32)) {
    auto gen = make_mass_sequence(spec);
    PrefixIndex idx;
    exact_positive_sum acc;
    double total = 0;
    while (total < target_time && idx.masses_.size() < n_cap) {
      MassRun r = gen->take_run(1ull << 20);
      for (std::uint64_t i = 0; i < r.count; ++i) {
        acc.add(r.value);
        total = acc.round_to_double();
        idx.masses_.push_back(r.value);
        idx.cumsum_.push_back(total);
        if (total >= target_time || idx.masses_.size() >= n_cap) break;
      }
    }
    if (idx.masses_.empty()) throw std::invalid_argument("prefix: empty horizon");
    return idx;
  }

  std::size_t size() const noexcept { return masses_.size(); }
  double mass(std::uint64_t k) const { return masses_.at(k - 1); }          // 1-based
  double cumulative(std::uint64_t k) const { return k ? cumsum_.at(k - 1) : 0.0; }
  double total() const { return cumsum_.back(); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  const std::vector<double>& cumulative_sums() const noexcept { return cumsum_; }

  // Least ell with M_ell >= t.  When t lands exactly on a prefix sum the
  // elapsed part is the whole increment.
  TimeLocation locate(double t) const {
    if (!(t > 0)) throw std::invalid_argument("locate: t must be positive");
    if (t > cumsum_.back()) throw std::out_of_range("locate: t beyond covered horizon");
    const auto it = std::lower_bound(cumsum_.begin(), cumsum_.end(), t);
    const auto i = static_cast<std::size_t>(it - cumsum_.begin());
    double tbar;
    if (*it == t) {
      tbar = masses_[i];
    } else {
      tbar = t - (i ? cumsum_[i - 1] : 0.0);
      tbar = std::min(tbar, masses_[i]);  // rounding guard at plateau edges
    }
    return {i + 1, tbar};
  }

 private:
  std::vector<double> masses_;
  std::vector<double> cumsum_;
};

inline PrefixIndex prefix(std::span<const double> masses) { return PrefixIndex(masses); }

// #{k <= horizon : M_k / m_k <= x}
inline std::uint64_t count_ratio_below(const PrefixIndex& idx, double x) {
  if (!(x > 0)) throw std::invalid_argument("count_ratio_below: x must be positive");
  std::uint64_t n = 0;
  for (std::uint64_t k = 1; k <= idx.size(); ++k) {
    if (idx.cumulative(k) / idx.mass(k) <= x) ++n;
  }
  return n;
}

}  // namespace massgame
