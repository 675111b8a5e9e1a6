#pragma once

// Shipped mass-sequence catalog: every builtin spec with its documented
// probe schedule and the expected classification cell (regularity and
// candidate limit, boundedness, mean growth, frequency mode).
//
// Horizons and tolerances are calibrated empirically: they are the scales
// at which each construction's limit behaviour is visible at desk scale,
// and the verification suite pins classification output against this
// table.

#include <optional>
#include <string>
#include <vector>

#include "massgame/empirical.hpp"
#include "massgame/mass_sequence.hpp"
#include "massgame/point_measure.hpp"

namespace massgame {

struct CatalogRow {
  std::string label;
  MassSpec spec;
  // Probe schedule.
  double t0;
  double ratio;
  double horizon;
  double tol;        // probe tolerance
  double match_tol;  // allowed panel distance between candidate and expected limit
  // Expected cell.
  RegularVerdict regular;
  std::optional<PointMeasure> mu_star;
  bool bounded;
  CesaroVerdict cesaro;
  FreqMode freq_mode;
  std::optional<PointMeasure> freq_star;
  std::string note;
};

inline const std::vector<CatalogRow>& catalog() {
  static const std::vector<CatalogRow> rows = [] {
    const PointMeasure d1 = PointMeasure::delta(1);
    const PointMeasure d0 = PointMeasure::delta(0);
    const PointMeasure dinf = PointMeasure::delta(kInf);
    const PointMeasure half1inf = PointMeasure::from_atoms({{1, 0.5}, {kInf, 0.5}});
    const PointMeasure half12 = PointMeasure::from_atoms({{1, 0.5}, {2, 0.5}});
    const PointMeasure sb12 = PointMeasure::from_atoms({{1, 1.0 / 3}, {2, 2.0 / 3}});

    MassSpec const1 = MassSpec::make("const");
    const1.params["c"] = 1.0;
    MassSpec iid12 = MassSpec::make("iid");
    iid12.atoms = {{1.0, 0.5}, {2.0, 0.5}};
    iid12.seed = 20240811;

    std::vector<CatalogRow> t;
    t.push_back({"const(1)", const1, 1, 1.5, 1e4, 0.01, 0.01,
                 RegularVerdict::regular, d1, true, CesaroVerdict::bounded_mean,
                 FreqMode::l1, d1, "all mass at one point"});
    t.push_back({"example_F0", MassSpec::make("example_F0"), 1, 1.5, 300, 0.01, 0.01,
                 RegularVerdict::regular, d1, true, CesaroVerdict::bounded_mean,
                 FreqMode::l1, d0,
                 "dyadic rows: frequency collapses to 0, mass stays at 1"});
    t.push_back({"example_Fnot", MassSpec::make("example_Fnot"), 1, 1.3, 130, 0.01, 0.01,
                 RegularVerdict::regular, d1, true, CesaroVerdict::bounded_mean,
                 FreqMode::none, std::nullopt,
                 "adaptive loop: frequency of ones sweeps 1/4..3/4"});
    t.push_back({"example_irr(1,2)", MassSpec::make("example_irr"), 10, 1.5, 1e5, 0.01, 0.01,
                 RegularVerdict::irregular, std::nullopt, true, CesaroVerdict::bounded_mean,
                 FreqMode::none, std::nullopt, "alternating K/L blocks"});
    t.push_back({"example_irregbounded", MassSpec::make("example_irregbounded"), 1, 1.6,
                 5000, 0.01, 0.01, RegularVerdict::irregular, std::nullopt, true,
                 CesaroVerdict::bounded_mean, FreqMode::l1, d0,
                 "K/L blocks diluted by dyadic rows"});
    t.push_back({"example_divergent", MassSpec::make("example_divergent"), 1, 1.5, 1e6,
                 0.01, 0.01, RegularVerdict::regular, dinf, false,
                 CesaroVerdict::diverging, FreqMode::weak, dinf, "m_k = k"});
    t.push_back({"example_cesar", MassSpec::make("example_cesar"), 1, 1.5, 1e6, 0.01,
                 0.01, RegularVerdict::regular, dinf, false, CesaroVerdict::diverging,
                 FreqMode::weak, half1inf,
                 "ones interleaved with k: frequency splits, mass escapes"});
    t.push_back({"example_cesaroifreq", MassSpec::make("example_cesaroifreq"), 1, 100,
                 1e280, 0.01, 0.01, RegularVerdict::regular, dinf, false,
                 CesaroVerdict::diverging, FreqMode::none, std::nullopt,
                 "K/L blocks interleaved with runaway increments"});
    t.push_back({"example_triangular", MassSpec::make("example_triangular"), 1, 1.5, 1e6,
                 0.01, 0.01, RegularVerdict::regular, half1inf, false,
                 CesaroVerdict::bounded_mean, FreqMode::weak, d1,
                 "spike rows: half the mass stays at 1, half escapes"});
    t.push_back({"example_unbnofreq", MassSpec::make("example_unbnofreq"), 1, 1.5, 4e4,
                 0.01, 0.05, RegularVerdict::regular, half1inf, false,
                 CesaroVerdict::bounded_mean, FreqMode::none, std::nullopt,
                 "adaptive loop over spike rows"});
    t.push_back({"example_remp", MassSpec::make("example_remp"), 1, 1.5, 2.2e7, 0.01,
                 0.01, RegularVerdict::irregular, std::nullopt, false,
                 CesaroVerdict::bounded_mean, FreqMode::weak, d1,
                 "rare huge spikes among ones"});
    t.push_back({"example_irregL1", MassSpec::make("example_irregL1"), 1, 1.5, 720, 0.02,
                 0.02, RegularVerdict::irregular, std::nullopt, false,
                 CesaroVerdict::bounded_mean, FreqMode::l1, d0,
                 "spike sequence diluted by dyadic filler"});
    t.push_back({"example_imifreq", MassSpec::make("example_imifreq"), 1, 1.5, 3.4e6,
                 0.01, 0.01, RegularVerdict::irregular, std::nullopt, false,
                 CesaroVerdict::bounded_mean, FreqMode::none, std::nullopt,
                 "adaptive loop over the spike sequence"});
    t.push_back({"iid(uniform{1,2})", iid12, 1, 1.5, 1e6, 0.02, 0.02,
                 RegularVerdict::regular, sb12, true, CesaroVerdict::bounded_mean,
                 FreqMode::l1, half12,
                 "random masses: frequency follows the law, mass size-biases it"});
    t.push_back({"geom4", MassSpec::make("geom4"), 4, 100, 1e100, 0.01, 0.01,
                 RegularVerdict::regular, dinf, false, CesaroVerdict::diverging,
                 FreqMode::weak, dinf, "m_k = 4^k"});
    t.push_back({"w2counter", MassSpec::make("w2counter"), 3, 1.5, 1e6, 0.01, 0.01,
                 RegularVerdict::regular, dinf, false, CesaroVerdict::diverging,
                 FreqMode::weak, dinf, "masses matched to the decay profile"});
    return t;
  }();
  return rows;
}

// Zero-mismatch comparison used by the verification suite.
struct CatalogCheck {
  bool regular_ok, limit_ok, bounded_ok, cesaro_ok, freq_ok, freq_limit_ok;
  double mu_distance = 0, freq_distance = 0;
  bool all() const {
    return regular_ok && limit_ok && bounded_ok && cesaro_ok && freq_ok && freq_limit_ok;
  }
};

inline CatalogCheck check_against_catalog(const CatalogRow& row,
                                          const ClassificationReport& rep) {
  CatalogCheck c{};
  c.regular_ok = rep.regular == row.regular;
  c.limit_ok = true;
  if (row.mu_star) {
    c.mu_distance = panel_distance(rep.mu_candidate, *row.mu_star);
    c.limit_ok = rep.regular == RegularVerdict::regular && c.mu_distance <= row.match_tol;
  }
  c.bounded_ok = rep.bounded == row.bounded;
  c.cesaro_ok = rep.cesaro.verdict == row.cesaro;
  c.freq_ok = rep.freq_mode == row.freq_mode;
  c.freq_limit_ok = true;
  if (row.freq_star) {
    c.freq_distance = panel_distance(rep.freq_candidate, *row.freq_star);
    c.freq_limit_ok = c.freq_distance <= row.match_tol;
  }
  return c;
}

inline ClassificationReport classify_row(const CatalogRow& row) {
  PrefixIndex idx = PrefixIndex::from_spec_until(row.spec, row.horizon);
  return classify(idx, geometric_times(row.t0, row.ratio, row.horizon), row.tol);
}

}  // namespace massgame
