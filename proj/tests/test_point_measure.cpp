#include <catch_amalgamated.hpp>

#include <cmath>

#include "massgame/point_measure.hpp"

using namespace massgame;

TEST_CASE("atoms merge by location and sort") {
  auto m = PointMeasure::from_atoms({{2, 0.25}, {1, 0.25}, {2, 0.25}, {1, 0.25}});
  REQUIRE(m.atoms().size() == 2);
  REQUIRE(m.atoms()[0].location == 1);
  REQUIRE(m.atoms()[0].weight == 0.5);
  REQUIRE(m.atoms()[1].location == 2);
  REQUIRE(m.total() == 1.0);
  REQUIRE(m.is_probability());
}

TEST_CASE("invalid atoms are rejected") {
  REQUIRE_THROWS_AS(PointMeasure::from_atoms({{1, -0.5}}), std::invalid_argument);
  REQUIRE_THROWS_AS(PointMeasure::from_atoms({{-1, 0.5}}), std::invalid_argument);
}

TEST_CASE("integration uses the declared value at infinity") {
  const TestFunction f{"mixed", [](double m) { return m == 1.0 ? 0.2 : 0.0; }, 0.8};
  const auto m = PointMeasure::from_atoms({{1, 0.5}, {kInf, 0.5}});
  REQUIRE(integrate(m, f) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("integration of a capped identity against a point mass") {
  const TestFunction f{"idcap", [](double m) { return std::min(m, 100.0); }, 100.0};
  REQUIRE(integrate(PointMeasure::delta(1), f) == 1.0);
}

TEST_CASE("moments handle the boundary atoms") {
  const auto m = PointMeasure::from_atoms({{1, 0.5}, {kInf, 0.5}});
  REQUIRE(std::isinf(m.first_moment()));
  REQUIRE(m.inverse_moment() == 0.5);  // the atom at infinity contributes zero
  const auto z = PointMeasure::from_atoms({{0, 0.5}, {1, 0.5}});
  REQUIRE(z.first_moment() == 0.5);
  REQUIRE(std::isinf(z.inverse_moment()));
}

TEST_CASE("compactified metric is a metric on representative points") {
  const double pts[] = {0, 0.5, 1, 2, 100, kInf};
  for (double x : pts)
    for (double y : pts) {
      REQUIRE(compact_distance(x, y) >= 0);
      REQUIRE(compact_distance(x, y) == compact_distance(y, x));
      if (x != y) REQUIRE(compact_distance(x, y) > 0);
      for (double z : pts) {
        REQUIRE(compact_distance(x, z) <=
                compact_distance(x, y) + compact_distance(y, z) + 1e-15);
      }
    }
  REQUIRE(compact_distance(0, kInf) == Catch::Approx(1.5707963267948966));
}

TEST_CASE("panel functions are bounded and continuous at infinity") {
  for (const auto& f : default_panel()) {
    INFO(f.name);
    double prev = f(1e12);
    for (double m : {1e13, 1e14, 1e15}) {
      REQUIRE(std::abs(f(m) - f.at_infinity) <= std::abs(prev - f.at_infinity) + 1e-12);
      prev = f(m);
    }
    for (double m = 0; m < 50; m += 0.25) REQUIRE(std::abs(f(m)) <= 1.0);
  }
}

TEST_CASE("coarsening snaps to the dyadic grid and the endpoints") {
  const auto m = PointMeasure::from_atoms(
      {{1.1, 0.25}, {1e-9, 0.25}, {3.9, 0.25}, {1e9, 0.25}});
  const auto c = coarsen_to_grid(m);
  REQUIRE(c.weight_at(1.0) == Catch::Approx(0.25));
  REQUIRE(c.weight_at(0.0) == Catch::Approx(0.25));
  REQUIRE(c.weight_at(4.0) == Catch::Approx(0.25));
  REQUIRE(c.weight_at(kInf) == Catch::Approx(0.25));
  REQUIRE(c.is_probability(1e-12));
}

TEST_CASE("panel distance separates the catalog limits") {
  const auto d1 = PointMeasure::delta(1);
  const auto d0 = PointMeasure::delta(0);
  const auto dinf = PointMeasure::delta(kInf);
  const auto half = PointMeasure::from_atoms({{1, 0.5}, {kInf, 0.5}});
  REQUIRE(panel_distance(d1, d1) == 0.0);
  REQUIRE(panel_distance(d1, d0) > 0.4);
  REQUIRE(panel_distance(d1, dinf) > 0.4);
  REQUIRE(panel_distance(half, dinf) > 0.2);
  REQUIRE(panel_distance(half, d1) > 0.2);
}
