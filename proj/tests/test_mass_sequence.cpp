#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "massgame/mass_sequence.hpp"

using namespace massgame;

namespace {

MassSpec spec(const std::string& id) { return MassSpec::make(id); }

MassSpec iid_12(std::uint64_t seed) {
  MassSpec s = MassSpec::make("iid");
  s.atoms = {{1.0, 0.5}, {2.0, 0.5}};
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("triangular 2^-i array: first ten masses") {
  const auto m = generate(spec("example_F0"), 10);
  const std::vector<double> want = {1, 1, 0.5, 1, 0.25, 0.25, 1, 0.125, 0.125, 0.125};
  REQUIRE(m == want);
}

TEST_CASE("odd-one even-k sequence: first six masses and prefix sums") {
  const auto m = generate(spec("example_cesar"), 6);
  REQUIRE(m == std::vector<double>{1, 2, 1, 4, 1, 6});
  // Sum of the first 2k terms is k^2 + 2k by direct summation.
  const auto long_run = generate(spec("example_cesar"), 2000);
  PrefixIndex idx{long_run};
  for (std::uint64_t k : {1ull, 3ull, 10ull, 100ull, 1000ull}) {
    const double want = static_cast<double>(k) * k + 2.0 * k;
    REQUIRE(idx.cumulative(2 * k) == want);
  }
}

TEST_CASE("spike-row triangular sequence: first seven masses") {
  REQUIRE(generate(spec("example_triangular"), 7) ==
          std::vector<double>{1, 2, 1, 3, 1, 1, 4});
}

TEST_CASE("const spec") {
  REQUIRE(generate(MassSpec{.id = "const", .params = {{"c", 1.0}}}, 3) ==
          std::vector<double>{1, 1, 1});
}

TEST_CASE("prefix sums") {
  const std::vector<double> m = {1, 2, 3};
  PrefixIndex idx{m};
  REQUIRE(idx.cumulative_sums() == std::vector<double>{1, 3, 6});
  const std::vector<double> single = {0.5};
  REQUIRE(PrefixIndex{single}.cumulative_sums() == std::vector<double>{0.5});
  REQUIRE_THROWS_AS(PrefixIndex{(std::vector<double>{})}, std::invalid_argument);
  REQUIRE_THROWS_AS(PrefixIndex{(std::vector<double>{1.0, -1.0})}, std::invalid_argument);
}

TEST_CASE("locate") {
  const std::vector<double> m = {1, 2, 3};
  PrefixIndex idx{m};
  auto loc = idx.locate(2.5);
  REQUIRE(loc.ell == 2);
  REQUIRE(loc.tbar == 1.5);
  loc = idx.locate(3.0);  // boundary M_ell == t
  REQUIRE(loc.ell == 2);
  REQUIRE(loc.tbar == 2.0);
  loc = idx.locate(6.0);  // t == M_n
  REQUIRE(loc.ell == 3);
  REQUIRE(loc.tbar == 3.0);
  REQUIRE_THROWS_AS(idx.locate(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(idx.locate(6.5), std::out_of_range);
}

TEST_CASE("triangular array index") {
  REQUIRE(tri_index(5).i == 3);
  REQUIRE(tri_index(5).j == 2);
  REQUIRE(tri_index(1).i == 1);
  REQUIRE(tri_index(1).j == 1);
  REQUIRE(tri_index(7).i == 4);
  REQUIRE(tri_index(7).j == 1);
  REQUIRE_THROWS_AS(tri_index(0), std::invalid_argument);
  // Bounds and overlap rule across a wide range.
  for (std::uint64_t k = 1; k <= 20000; ++k) {
    const auto [i, j] = tri_index(k);
    REQUIRE((i - 1) * i / 2 <= k);
    REQUIRE(k <= i * (i + 1) / 2);
    REQUIRE(j == k - (i - 1) * i / 2);
    if (k == i * (i + 1) / 2 && k > 1) {
      // The overlap index belongs to the smaller row: j is the row end.
      REQUIRE(j == i);
    }
  }
}

TEST_CASE("every construction emits positive finite masses with increasing prefix sums") {
  std::vector<MassSpec> specs;
  for (const auto& id : mass_spec_ids()) {
    if (id == "iid") {
      specs.push_back(iid_12(7));
    } else {
      specs.push_back(spec(id));
    }
  }
  for (const auto& s : specs) {
    INFO("spec " << s.id);
    const std::uint64_t n = (s.id == "example_cesaroifreq") ? 200
                          : (s.id == "geom4")               ? 400
                                                            : 3000;
    const auto m = generate(s, n);
    REQUIRE(m.size() == n);
    for (double v : m) {
      REQUIRE(v > 0.0);
      REQUIRE(std::isfinite(v));
    }
    PrefixIndex idx{m};
    for (std::size_t k = 1; k < idx.size(); ++k) {
      REQUIRE(idx.cumulative(k + 1) >= idx.cumulative(k));
    }
  }
}

TEST_CASE("locate-prefix round trip on exactly representable sequences") {
  std::vector<MassSpec> specs = {spec("const"),        spec("example_cesar"),
                                 spec("example_triangular"), spec("example_divergent"),
                                 spec("example_remp"), iid_12(11)};
  for (const auto& s : specs) {
    INFO("spec " << s.id);
    const auto m = generate(s, 3000);
    PrefixIndex idx{m};
    for (std::uint64_t k = 1; k <= idx.size(); k += 7) {
      const auto loc = idx.locate(idx.cumulative(k));
      REQUIRE(loc.ell == k);
      REQUIRE(loc.tbar == idx.mass(k));
    }
  }
}

TEST_CASE("adaptive loop switches at the declared frequency thresholds") {
  const auto m = generate(spec("example_Fnot"), 1000);
  std::uint64_t ones = 0;
  auto is_dust = [](double v) { return v < 1.0; };
  for (std::size_t k = 1; k <= m.size(); ++k) {
    if (m[k - 1] == 1.0) ++ones;
    if (k < m.size()) {
      const double freq = static_cast<double>(ones) / static_cast<double>(k);
      if (is_dust(m[k - 1]) && !is_dust(m[k])) {
        REQUIRE(freq <= 0.25);  // switching from the dust rule to the ones rule
      }
      if (!is_dust(m[k - 1]) && is_dust(m[k]) && k > 1) {
        REQUIRE(freq >= 0.75);  // and back
      }
    }
  }
  // Both phases appear repeatedly.
  REQUIRE(std::count_if(m.begin(), m.end(), is_dust) > 10);
  REQUIRE(ones > 10);
}

TEST_CASE("K/L block lengths satisfy both inequalities") {
  const double K = 1, L = 2;
  const auto blocks = detail::irr_blocks(K, L, 12);
  double sumA = blocks.A[0], sumB = blocks.B[0];
  for (std::size_t n = 1; n < 12; ++n) {
    REQUIRE(blocks.A[n] > blocks.A[n - 1]);
    REQUIRE(blocks.B[n] > blocks.B[n - 1]);
    const double sumA1 = sumA + blocks.A[n];
    REQUIRE(L * sumB / (K * sumA1) <= 1.0 / static_cast<double>(n));
    const double sumB1 = sumB + blocks.B[n];
    REQUIRE(K * sumA1 / (L * sumB1) <= 1.0 / static_cast<double>(n));
    sumA = sumA1;
    sumB = sumB1;
  }
  // The emitted sequence follows the block structure: A1=1, B1=1, A2=2, B2=2.
  const auto m = generate(spec("example_irr"), 50);
  std::vector<double> head(m.begin(), m.begin() + 6);
  REQUIRE(head == std::vector<double>{1, 2, 1, 1, 2, 2});
}

TEST_CASE("spike/ones block lengths satisfy both inequalities") {
  const auto blocks = detail::remp_blocks(8);
  double sumN = 0, sumK = 0;
  for (std::size_t i1 = 1; i1 <= 8; ++i1) {
    sumN += blocks.N[i1 - 1];
    REQUIRE(sumN / blocks.K[i1 - 1] <= 1.0 / static_cast<double>(i1));
    sumK += blocks.K[i1 - 1];
    if (i1 < 8) {
      REQUIRE(sumK / blocks.N[i1] <= 1.0 / static_cast<double>(i1));
    }
  }
}

TEST_CASE("interleaved dust gaps satisfy the strict bound") {
  auto gen = make_mass_sequence(spec("example_irregL1"));
  // Reconstruct donor positions: non-dyadic values are donor emissions.
  std::vector<double> m;
  for (int i = 0; i < 20000; ++i) m.push_back(gen->next());
  std::vector<std::uint64_t> tau;
  std::vector<double> donors;
  for (std::size_t k = 1; k <= m.size(); ++k) {
    const double v = m[k - 1];
    const bool dusty = std::abs(std::log2(v) + static_cast<double>(k)) < 0.5 || v < 1e-300;
    if (!dusty) {
      tau.push_back(k);
      donors.push_back(v);
    }
  }
  REQUIRE(tau.size() >= 3);
  REQUIRE(tau[0] == 1);
  double donor_sum = donors[0];
  for (std::size_t j = 2; j <= tau.size(); ++j) {
    const auto A = tau[j - 1] - tau[j - 2];
    donor_sum += donors[j - 1];
    REQUIRE((donor_sum + 1.0) / static_cast<double>(A) < 1.0 / static_cast<double>(j));
  }
}

TEST_CASE("iid masses are reproducible per seed") {
  const auto a = generate(iid_12(42), 5000);
  const auto b = generate(iid_12(42), 5000);
  REQUIRE(a == b);
  const auto c = generate(iid_12(43), 5000);
  REQUIRE(a != c);
  // Roughly balanced law.
  const double mean =
      std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  REQUIRE(std::abs(mean - 1.5) < 0.05);
}

TEST_CASE("bad specs are rejected") {
  REQUIRE_THROWS_AS(make_mass_sequence(spec("nope")), std::invalid_argument);
  REQUIRE_THROWS_AS(make_mass_sequence(MassSpec{.id = "const", .params = {{"c", -2.0}}}),
                    std::invalid_argument);
  MassSpec no_seed = MassSpec::make("iid");
  no_seed.atoms = {{1.0, 1.0}};
  REQUIRE_THROWS_AS(make_mass_sequence(no_seed), std::invalid_argument);
  REQUIRE_THROWS_AS(generate(spec("const"), 0), std::invalid_argument);
}

TEST_CASE("super-geometric growth errors out instead of overflowing") {
  REQUIRE_THROWS_AS(generate(spec("example_cesaroifreq"), 400), std::overflow_error);
  REQUIRE_THROWS_AS(generate(spec("geom4"), 600), std::overflow_error);
}

TEST_CASE("gap-fill dust below the double range is clamped and flagged") {
  auto gen = make_mass_sequence(spec("example_irregL1"));
  double last = 0;
  for (int i = 0; i < 3000; ++i) last = gen->next();
  (void)last;
  REQUIRE(gen->dust_clamped());
  REQUIRE(gen->emitted() == 3000);
}

TEST_CASE("geometric 4^k masses") {
  const auto m = generate(spec("geom4"), 5);
  REQUIRE(m == std::vector<double>{4, 16, 64, 256, 1024});
}

TEST_CASE("decay-matched masses solve g(m) = 1/(k+1)") {
  const auto m = generate(spec("w2counter"), 4);
  for (std::size_t k = 1; k <= 4; ++k) {
    const double g = 1.0 / std::sqrt(m[k - 1] + 1.0);
    REQUIRE(g == Catch::Approx(1.0 / static_cast<double>(k + 1)).epsilon(1e-12));
  }
}
