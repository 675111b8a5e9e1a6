#pragma once

// Empirical mass measures and frequencies, their convergence probes, the
// frequency/mass transfer maps, and the regular/irregular classifier.
//
// Finite-horizon verdicts are heuristic by nature: every verdict carries
// the probe times and values it was computed from, and undetermined is a
// first-class outcome.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "massgame/mass_sequence.hpp"
#include "massgame/point_measure.hpp"

namespace massgame {

// ---------------------------------------------------------------------------
// Empirical measures

// Mass-weighted empirical measure at time t:
//   (tbar/t) d_{tbar} + sum_{k < ell} (m_k/t) d_{m_k}
inline PointMeasure empirical_mass(const PrefixIndex& idx, double t) {
  const TimeLocation loc = idx.locate(t);
  std::vector<Atom> atoms;
  atoms.reserve(loc.ell);
  for (std::uint64_t k = 1; k < loc.ell; ++k) {
    const double m = idx.mass(k);
    atoms.push_back({m, m / t});
  }
  atoms.push_back({loc.tbar, loc.tbar / t});
  return PointMeasure::from_atoms(std::move(atoms));
}

// Count-weighted empirical frequency at time t:
//   d_{tbar}/ell + sum_{k < ell} d_{m_k}/ell
inline PointMeasure empirical_freq(const PrefixIndex& idx, double t) {
  const TimeLocation loc = idx.locate(t);
  const double w = 1.0 / static_cast<double>(loc.ell);
  std::vector<Atom> atoms;
  atoms.reserve(loc.ell);
  for (std::uint64_t k = 1; k < loc.ell; ++k) atoms.push_back({idx.mass(k), w});
  atoms.push_back({loc.tbar, w});
  return PointMeasure::from_atoms(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Exact finite-time identities

struct DualityReport {
  double lhs;        // integral of f against the mass measure
  double rhs;        // (ell/t) * integral of m f(m) against the frequency
  double abs_diff;
  double rel_diff;
  double mean_ratio_lhs;  // t / ell
  double mean_ratio_rhs;  // integral of m against the frequency
  double mean_ratio_rel;
};

inline DualityReport duality_check(const PrefixIndex& idx, double t,
                                   const TestFunction& f) {
  const TimeLocation loc = idx.locate(t);
  const PointMeasure mu = empirical_mass(idx, t);
  const PointMeasure fr = empirical_freq(idx, t);
  const double lhs = integrate(mu, f);
  neumaier_sum mf;
  neumaier_sum m1;
  for (const Atom& a : fr.atoms()) {
    mf.add(a.weight * a.location * f(a.location));
    m1.add(a.weight * a.location);
  }
  const double ell_over_t = static_cast<double>(loc.ell) / t;
  const double rhs = ell_over_t * mf.value();
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  const double lt_lhs = t / static_cast<double>(loc.ell);
  const double lt_rhs = m1.value();
  const double lt_scale = std::max({std::abs(lt_lhs), std::abs(lt_rhs), 1.0});
  return {lhs,
          rhs,
          std::abs(lhs - rhs),
          std::abs(lhs - rhs) / scale,
          lt_lhs,
          lt_rhs,
          std::abs(lt_lhs - lt_rhs) / lt_scale};
}

// ---------------------------------------------------------------------------
// Convergence probes

enum class TrendVerdict { converged, oscillating, undetermined };

inline const char* to_string(TrendVerdict v) {
  switch (v) {
    case TrendVerdict::converged: return "converged";
    case TrendVerdict::oscillating: return "oscillating";
    default: return "undetermined";
  }
}

struct OscillationWitness {
  std::string function;
  double t_before, t_extreme, t_after;
  double v_before, v_extreme, v_after;
  double range;  // limsup - liminf estimate over the probe tail
};

struct TimedMeasure {
  double t;
  PointMeasure measure;
};

struct WeakProbeReport {
  TrendVerdict verdict = TrendVerdict::undetermined;
  double final_distance = 0;
  double prev_distance = 0;
  std::optional<OscillationWitness> witness;
  std::vector<double> times;
  std::map<std::string, std::vector<double>> series;      // <lambda_t, f> per f
  std::map<std::string, double> candidate_values;          // <candidate, f>
};

// Weak-convergence probe against an explicit candidate.
//
// converged: every panel distance at the last two times is below tol and
//   the tail envelope did not grow.
// oscillating: some f shows a direction reversal with prominence above tol
//   and a tail range above 2*tol; the witness records it.
inline WeakProbeReport probe_weak(const std::vector<TimedMeasure>& measures,
                                  const PointMeasure& candidate,
                                  const std::vector<TestFunction>& panel,
                                  double tol) {
  if (panel.empty()) throw std::invalid_argument("probe_weak: empty test panel");
  if (measures.size() < 2) throw std::invalid_argument("probe_weak: need at least two probe times");
  WeakProbeReport rep;
  for (const auto& tm : measures) rep.times.push_back(tm.t);
  const std::size_t J = measures.size();
  const std::size_t tail_begin = J / 2;

  double best_range = 0;
  for (const auto& f : panel) {
    std::vector<double>& vals = rep.series[f.name];
    vals.reserve(J);
    for (const auto& tm : measures) vals.push_back(integrate(tm.measure, f));
    rep.candidate_values[f.name] = integrate(candidate, f);

    // Direction-reversal scan over the tail.
    for (std::size_t j = tail_begin + 1; j + 1 < J; ++j) {
      double lo_before = vals[j], hi_before = vals[j];
      for (std::size_t i = tail_begin; i < j; ++i) {
        lo_before = std::min(lo_before, vals[i]);
        hi_before = std::max(hi_before, vals[i]);
      }
      double lo_after = vals[j], hi_after = vals[j];
      for (std::size_t i = j + 1; i < J; ++i) {
        lo_after = std::min(lo_after, vals[i]);
        hi_after = std::max(hi_after, vals[i]);
      }
      const double peak = std::min(vals[j] - lo_before, vals[j] - lo_after);
      const double valley = std::min(hi_before - vals[j], hi_after - vals[j]);
      const double prominence = std::max(peak, valley);
      double tmin = vals[tail_begin], tmax = vals[tail_begin];
      for (std::size_t i = tail_begin; i < J; ++i) {
        tmin = std::min(tmin, vals[i]);
        tmax = std::max(tmax, vals[i]);
      }
      const double range = tmax - tmin;
      if (prominence > tol && range > 2 * tol && range > best_range) {
        best_range = range;
        OscillationWitness w;
        w.function = f.name;
        w.t_extreme = rep.times[j];
        w.v_extreme = vals[j];
        // Nearest tail neighbours realizing the reversal.
        std::size_t b = tail_begin, a = J - 1;
        for (std::size_t i = tail_begin; i < j; ++i)
          if ((peak >= valley) ? vals[i] <= vals[b] : vals[i] >= vals[b]) b = i;
        for (std::size_t i = j + 1; i < J; ++i)
          if ((peak >= valley) ? vals[i] <= vals[a] : vals[i] >= vals[a]) a = i;
        w.t_before = rep.times[b];
        w.v_before = vals[b];
        w.t_after = rep.times[a];
        w.v_after = vals[a];
        w.range = range;
        rep.witness = w;
      }
    }
  }
  if (rep.witness) {
    rep.verdict = TrendVerdict::oscillating;
    return rep;
  }

  bool converged = true;
  double final_d = 0, prev_d = 0;
  for (const auto& f : panel) {
    const auto& vals = rep.series[f.name];
    const double c = rep.candidate_values[f.name];
    const double dJ = std::abs(vals[J - 1] - c);
    const double dJ1 = std::abs(vals[J - 2] - c);
    final_d = std::max(final_d, dJ);
    prev_d = std::max(prev_d, dJ1);
    if (dJ > tol || dJ1 > tol) converged = false;
    double head_env = 0, tail_env = 0;
    for (std::size_t i = 0; i < J; ++i) {
      const double d = std::abs(vals[i] - c);
      if (i < tail_begin || i == 0) head_env = std::max(head_env, d);
      if (i >= tail_begin) tail_env = std::max(tail_env, d);
    }
    if (tail_env > head_env + tol) converged = false;
  }
  rep.final_distance = final_d;
  rep.prev_distance = prev_d;
  rep.verdict = converged ? TrendVerdict::converged : TrendVerdict::undetermined;
  return rep;
}

struct MomentProbeReport {
  WeakProbeReport weak;
  bool moment_ok = false;
  double moment_last = 0;
  double moment_prev = 0;
  double moment_target = 0;  // +inf marks a failed precondition
  TrendVerdict verdict = TrendVerdict::undetermined;
};

// Weak convergence plus first moments: F_t -> F_* in the L1 sense.
inline MomentProbeReport probe_l1(const std::vector<TimedMeasure>& freqs,
                                  const PointMeasure& candidate,
                                  const std::vector<TestFunction>& panel,
                                  double tol) {
  MomentProbeReport rep;
  rep.weak = probe_weak(freqs, candidate, panel, tol);
  rep.moment_target = candidate.first_moment();
  const std::size_t J = freqs.size();
  rep.moment_last = freqs[J - 1].measure.first_moment();
  rep.moment_prev = freqs[J - 2].measure.first_moment();
  if (std::isfinite(rep.moment_target)) {
    rep.moment_ok = std::abs(rep.moment_last - rep.moment_target) <= tol &&
                    std::abs(rep.moment_prev - rep.moment_target) <= tol;
  }
  if (rep.weak.verdict == TrendVerdict::oscillating) {
    rep.verdict = TrendVerdict::oscillating;
  } else if (rep.weak.verdict == TrendVerdict::converged && rep.moment_ok) {
    rep.verdict = TrendVerdict::converged;
  } else {
    rep.verdict = TrendVerdict::undetermined;
  }
  return rep;
}

// Weak convergence plus inverse moments: the dual probe for mass measures.
inline MomentProbeReport probe_wplus(const std::vector<TimedMeasure>& mus,
                                     const PointMeasure& candidate,
                                     const std::vector<TestFunction>& panel,
                                     double tol) {
  MomentProbeReport rep;
  rep.weak = probe_weak(mus, candidate, panel, tol);
  rep.moment_target = candidate.inverse_moment();
  const std::size_t J = mus.size();
  rep.moment_last = mus[J - 1].measure.inverse_moment();
  rep.moment_prev = mus[J - 2].measure.inverse_moment();
  if (std::isfinite(rep.moment_target)) {
    rep.moment_ok = std::abs(rep.moment_last - rep.moment_target) <= tol &&
                    std::abs(rep.moment_prev - rep.moment_target) <= tol;
  }
  if (rep.weak.verdict == TrendVerdict::oscillating) {
    rep.verdict = TrendVerdict::oscillating;
  } else if (rep.weak.verdict == TrendVerdict::converged && rep.moment_ok) {
    rep.verdict = TrendVerdict::converged;
  } else {
    rep.verdict = TrendVerdict::undetermined;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Mean-growth probe: does M_n / n escape every bound?

enum class CesaroVerdict { diverging, bounded_mean, undetermined };

inline const char* to_string(CesaroVerdict v) {
  switch (v) {
    case CesaroVerdict::diverging: return "diverging";
    case CesaroVerdict::bounded_mean: return "bounded-mean";
    default: return "undetermined";
  }
}

struct CesaroReport {
  CesaroVerdict verdict = CesaroVerdict::undetermined;
  std::vector<std::uint64_t> ns;
  std::vector<double> ratios;  // M_n / n
};

inline CesaroReport probe_cesaro(const PrefixIndex& idx, std::size_t points = 40) {
  CesaroReport rep;
  const auto n_max = static_cast<double>(idx.size());
  const double ratio = std::pow(std::max(2.0, n_max / 2.0), 1.0 / static_cast<double>(points - 1));
  double x = 2.0;
  for (std::size_t j = 0; j < points; ++j) {
    const auto n = std::min<std::uint64_t>(idx.size(), std::max<std::uint64_t>(2, static_cast<std::uint64_t>(x)));
    if (rep.ns.empty() || n > rep.ns.back()) {
      rep.ns.push_back(n);
      rep.ratios.push_back(idx.cumulative(n) / static_cast<double>(n));
    }
    x *= ratio;
  }
  const std::size_t J = rep.ratios.size();
  if (J < 4) return rep;
  const std::size_t mid = J / 2;
  bool monotone = true;
  for (std::size_t j = mid; j + 1 < J; ++j) {
    if (rep.ratios[j + 1] < rep.ratios[j] * 1.02) monotone = false;
  }
  if (monotone && rep.ratios[J - 1] >= 2.0 * rep.ratios[mid]) {
    rep.verdict = CesaroVerdict::diverging;
    return rep;
  }
  double min_all = rep.ratios[0], min_tail = rep.ratios[mid];
  for (double r : rep.ratios) min_all = std::min(min_all, r);
  for (std::size_t j = mid; j < J; ++j) min_tail = std::min(min_tail, rep.ratios[j]);
  if (min_tail <= 3.0 * min_all) rep.verdict = CesaroVerdict::bounded_mean;
  return rep;
}

// ---------------------------------------------------------------------------
// Transfer maps between limit frequencies and limit mass measures

enum class TransferDirection { freq_to_mass, mass_to_freq };

// freq_to_mass: <mu, f> = A * integral of m f(m) dF   (size-biasing)
// mass_to_freq: <F, f> = (1/A) * integral of f(m)/m dmu
// Outputs are normalized to total mass one.
inline PointMeasure transfer(TransferDirection dir, const PointMeasure& source,
                             double A) {
  if (!(A > 0) || !std::isfinite(A)) {
    throw std::invalid_argument("transfer: A must lie in (0, inf)");
  }
  std::vector<Atom> out;
  if (dir == TransferDirection::freq_to_mass) {
    if (!std::isfinite(source.first_moment())) {
      throw std::domain_error("transfer: source frequency needs a finite first moment");
    }
    for (const Atom& a : source.atoms()) {
      if (a.location == 0.0) continue;
      out.push_back({a.location, A * a.location * a.weight});
    }
    if (out.empty()) {
      throw std::domain_error("transfer: source frequency concentrated at zero");
    }
  } else {
    if (!std::isfinite(source.inverse_moment())) {
      throw std::domain_error("transfer: source measure needs a finite integral of 1/m");
    }
    for (const Atom& a : source.atoms()) {
      if (std::isinf(a.location)) continue;
      out.push_back({a.location, a.weight / (A * a.location)});
    }
    if (out.empty()) {
      throw std::domain_error("transfer: source measure concentrated at infinity");
    }
  }
  return PointMeasure::from_atoms(std::move(out)).normalized();
}

// ---------------------------------------------------------------------------
// Classification

enum class RegularVerdict { regular, irregular, undetermined };
enum class FreqMode { l1, weak, none, undetermined };

inline const char* to_string(RegularVerdict v) {
  switch (v) {
    case RegularVerdict::regular: return "regular";
    case RegularVerdict::irregular: return "irregular";
    default: return "undetermined";
  }
}
inline const char* to_string(FreqMode v) {
  switch (v) {
    case FreqMode::l1: return "L1";
    case FreqMode::weak: return "weak";
    case FreqMode::none: return "none";
    default: return "undetermined";
  }
}

struct ClassificationReport {
  RegularVerdict regular = RegularVerdict::undetermined;
  PointMeasure mu_candidate;  // proposed limit when regular
  WeakProbeReport mu_probe;

  bool bounded = true;
  double max_mass = 0;
  std::uint64_t argmax_index = 0;

  CesaroReport cesaro;

  FreqMode freq_mode = FreqMode::undetermined;
  PointMeasure freq_candidate;
  MomentProbeReport freq_probe;

  double A_last = 0;     // ell_t / t at the final probe time
  int A_trend = 0;       // -1: heading to 0, +1: heading to infinity, 0: stable

  std::vector<double> probe_times;
  double tol = 0;
};

// Geometric probe schedule ending exactly at horizon.
inline std::vector<double> geometric_times(double t0, double ratio, double horizon) {
  if (!(t0 > 0) || !(ratio > 1) || !(horizon > t0)) {
    throw std::invalid_argument("geometric_times: need t0 > 0, ratio > 1, horizon > t0");
  }
  std::vector<double> ts;
  for (double t = t0; t < horizon; t *= ratio) ts.push_back(t);
  ts.push_back(horizon);
  return ts;
}

inline ClassificationReport classify(const PrefixIndex& idx,
                                     const std::vector<double>& probe_times,
                                     double tol,
                                     const std::vector<TestFunction>& panel = default_panel()) {
  std::vector<double> times;
  for (double t : probe_times)
    if (t > 0 && t <= idx.total()) times.push_back(t);
  std::sort(times.begin(), times.end());
  if (times.size() < 3) throw std::invalid_argument("classify: horizon too short (need >= 3 probe scales)");

  ClassificationReport rep;
  rep.probe_times = times;
  rep.tol = tol;

  std::vector<TimedMeasure> mus, freqs;
  std::vector<double> ell_over_t;
  mus.reserve(times.size());
  freqs.reserve(times.size());
  for (double t : times) {
    mus.push_back({t, empirical_mass(idx, t)});
    freqs.push_back({t, empirical_freq(idx, t)});
    ell_over_t.push_back(static_cast<double>(idx.locate(t).ell) / t);
  }

  // Boundedness scan: the running maximum still growing in the second half
  // of the horizon reads as unbounded.
  const auto& masses = idx.masses();
  rep.max_mass = masses[0];
  rep.argmax_index = 1;
  for (std::size_t i = 1; i < masses.size(); ++i) {
    if (masses[i] > rep.max_mass) {
      rep.max_mass = masses[i];
      rep.argmax_index = i + 1;
    }
  }
  rep.bounded = rep.argmax_index < masses.size() / 2;

  rep.cesaro = probe_cesaro(idx);

  // Mass-measure regularity against the self-proposed coarse candidate.
  rep.mu_candidate = coarsen_to_grid(mus.back().measure);
  rep.mu_probe = probe_weak(mus, rep.mu_candidate, panel, tol);
  switch (rep.mu_probe.verdict) {
    case TrendVerdict::converged: rep.regular = RegularVerdict::regular; break;
    case TrendVerdict::oscillating: rep.regular = RegularVerdict::irregular; break;
    default: rep.regular = RegularVerdict::undetermined; break;
  }

  // Frequency mode.
  rep.freq_candidate = coarsen_to_grid(freqs.back().measure);
  rep.freq_probe = probe_l1(freqs, rep.freq_candidate, panel, tol);
  if (rep.freq_probe.verdict == TrendVerdict::oscillating) {
    rep.freq_mode = FreqMode::none;
  } else if (rep.freq_probe.verdict == TrendVerdict::converged) {
    rep.freq_mode = FreqMode::l1;
  } else if (rep.freq_probe.weak.verdict == TrendVerdict::converged) {
    rep.freq_mode = FreqMode::weak;
  } else {
    rep.freq_mode = FreqMode::undetermined;
  }

  rep.A_last = ell_over_t.back();
  const double a_mid = ell_over_t[ell_over_t.size() / 2];
  if (rep.A_last <= 0.5 * a_mid) {
    rep.A_trend = -1;
  } else if (rep.A_last >= 2.0 * a_mid) {
    rep.A_trend = +1;
  }
  return rep;
}

}  // namespace massgame
