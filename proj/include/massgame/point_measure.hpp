#pragma once

// Finite atomic measures on the compactified half-line [0, inf], with a
// bounded-continuous test-function panel for weak-convergence probes.
//
// Atoms are merged by exact location and kept sorted; +infinity is a
// legal location (used by candidate limits, never by finite-time
// empirical measures).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "massgame/accumulate.hpp"

namespace massgame {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double location;
  double weight;
  bool operator==(const Atom&) const = default;
};

class PointMeasure {
 public:
  PointMeasure() = default;

  // Merges equal locations, drops zero weights, sorts by location.
  static PointMeasure from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    PointMeasure m;
    neumaier_sum total;
    for (const Atom& a : atoms) {
      if (a.weight < 0 || !std::isfinite(a.weight)) {
        throw std::invalid_argument("measure weights must be finite and nonnegative");
      }
      if (std::isnan(a.location) || a.location < 0) {
        throw std::invalid_argument("atom locations live on [0, inf]");
      }
      if (a.weight == 0) continue;
      if (!m.atoms_.empty() && m.atoms_.back().location == a.location) {
        m.atoms_.back().weight += a.weight;
      } else {
        m.atoms_.push_back(a);
      }
      total.add(a.weight);
    }
    m.total_ = total.value();
    return m;
  }

  static PointMeasure delta(double location) { return from_atoms({{location, 1.0}}); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double total() const noexcept { return total_; }

  bool is_probability(double tol = 1e-12) const noexcept {
    return std::abs(total_ - 1.0) <= tol;
  }

  double weight_at(double location) const noexcept {
    const auto it = std::lower_bound(
        atoms_.begin(), atoms_.end(), location,
        [](const Atom& a, double loc) { return a.location < loc; });
    return (it != atoms_.end() && it->location == location) ? it->weight : 0.0;
  }

  // Weight placed within [lo, hi] (closed).
  double weight_in(double lo, double hi) const noexcept {
    double w = 0;
    for (const Atom& a : atoms_)
      if (a.location >= lo && a.location <= hi) w += a.weight;
    return w;
  }

  // First moment; an atom at infinity with positive weight makes it infinite.
  double first_moment() const noexcept {
    neumaier_sum s;
    for (const Atom& a : atoms_) {
      if (std::isinf(a.location)) return kInf;
      s.add(a.location * a.weight);
    }
    return s.value();
  }

  // Integral of 1/m; atoms at infinity contribute zero, an atom at zero
  // with positive weight makes it infinite.
  double inverse_moment() const noexcept {
    neumaier_sum s;
    for (const Atom& a : atoms_) {
      if (std::isinf(a.location)) continue;
      if (a.location == 0.0) return kInf;
      s.add(a.weight / a.location);
    }
    return s.value();
  }

  PointMeasure normalized() const {
    if (!(total_ > 0)) throw std::domain_error("cannot normalize a zero measure");
    std::vector<Atom> scaled = atoms_;
    for (Atom& a : scaled) a.weight /= total_;
    return from_atoms(std::move(scaled));
  }

 private:
  std::vector<Atom> atoms_;
  double total_ = 0;
};

// Metric of the compactification; symmetric by construction.
inline double compact_distance(double x, double y) noexcept {
  return std::abs(std::atan(x) - std::atan(y));
}

// ---------------------------------------------------------------------------
// Test functions: bounded, continuous on [0, inf] with an explicit value at
// infinity equal to the limit along the real line.

struct TestFunction {
  std::string name;
  std::function<double(double)> on_finite;
  double at_infinity;

  double operator()(double m) const {
    return std::isinf(m) ? at_infinity : on_finite(m);
  }
};

inline double integrate(const PointMeasure& mu, const TestFunction& f) {
  neumaier_sum s;
  for (const Atom& a : mu.atoms()) s.add(a.weight * f(a.location));
  return s.value();
}

// Ramp-down indicator of [0, a]: 1 on [0, a], linear to 0 on [a, a + a/4].
inline TestFunction smoothed_indicator(double a) {
  const double w = a / 4.0;
  return {"cut" + std::to_string(a),
          [a, w](double m) {
            if (m <= a) return 1.0;
            if (m >= a + w) return 0.0;
            return 1.0 - (m - a) / w;
          },
          0.0};
}

// Default panel.  Rich enough to separate point masses at 0, 1, 2, 4 and
// infinity; every member is continuous under the arctan metric.
inline const std::vector<TestFunction>& default_panel() {
  static const std::vector<TestFunction> panel = [] {
    std::vector<TestFunction> fs;
    fs.push_back({"one", [](double) { return 1.0; }, 1.0});
    fs.push_back({"inv1p", [](double m) { return 1.0 / (1.0 + m); }, 0.0});
    fs.push_back({"atannorm",
                  [](double m) { return std::atan(m) / (1.5707963267948966); }, 1.0});
    fs.push_back({"expneg", [](double m) { return std::exp(-m); }, 0.0});
    for (double a : {0.5, 1.5, 3.0, 8.0}) fs.push_back(smoothed_indicator(a));
    return fs;
  }();
  return panel;
}

// Max over the panel of |<mu, f> - <nu, f>|.
inline double panel_distance(const PointMeasure& mu, const PointMeasure& nu,
                             const std::vector<TestFunction>& panel = default_panel()) {
  double d = 0;
  for (const auto& f : panel) d = std::max(d, std::abs(integrate(mu, f) - integrate(nu, f)));
  return d;
}

// Coarsen onto the grid {0} u {2^j : |j| <= 20} u {inf}, merging weights
// and dropping negligible atoms.  Used to propose candidate limits.
inline PointMeasure coarsen_to_grid(const PointMeasure& mu, double drop_below = 1e-9) {
  std::vector<Atom> out;
  for (const Atom& a : mu.atoms()) {
    double loc;
    if (std::isinf(a.location)) {
      loc = kInf;
    } else if (a.location == 0.0) {
      loc = 0.0;
    } else {
      const double j = std::round(std::log2(a.location));
      if (j < -20) {
        loc = 0.0;
      } else if (j > 20) {
        loc = kInf;
      } else {
        loc = std::ldexp(1.0, static_cast<int>(j));
      }
    }
    out.push_back({loc, a.weight});
  }
  PointMeasure merged = PointMeasure::from_atoms(std::move(out));
  std::vector<Atom> kept;
  for (const Atom& a : merged.atoms())
    if (a.weight >= drop_below) kept.push_back(a);
  PointMeasure m = PointMeasure::from_atoms(std::move(kept));
  return m.total() > 0 ? m.normalized() : m;
}

}  // namespace massgame
