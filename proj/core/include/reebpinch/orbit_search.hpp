#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reebpinch/contact_dynamics.hpp"

namespace reebpinch::search {

using contact::ReebOrbit;
using contact::StarshapedSurface;

struct SearchConfig {
  std::size_t seeds = 96;
  /// Absolute action window. When unset, verify_pinching_theorem uses
  /// [pi R1^2, pi R2^2].
  std::optional<std::pair<double, double>> window;
  double closure_tol = 1e-9;
  double dedupe_tol = 1e-3;
  std::uint64_t rng_seed = 1;
  std::size_t max_refinements = 30;
  /// Trial periods tried per seed (the best local minima of |phi_t(x) - x|).
  std::size_t trials_per_seed = 3;
  /// Worker threads; 0 picks the hardware count. REEBPINCH_THREADS caps it.
  unsigned threads = 0;
  double flow_tol = 1e-12;
  std::size_t samples = 256;

  void validate() const;
};

struct SearchStats {
  std::size_t seeds = 0;
  std::size_t trials = 0;
  std::size_t converged = 0;
  std::size_t outside_window = 0;
  std::size_t failed = 0;
  unsigned workers = 0;
};

struct SearchResult {
  std::vector<ReebOrbit> orbits;  // sorted by (action, first point)
  SearchStats stats;
};

/// Number of workers actually used for `requested` (0 = hardware count),
/// after applying REEBPINCH_THREADS.
unsigned effective_workers(unsigned requested);

/// Multistart shooting for closed Reeb orbits with period in `window`.
SearchResult find_closed_orbits(const StarshapedSurface& S, const SearchConfig& cfg,
                                std::pair<double, double> window);

/// Symmetrized Hausdorff distance between two closed sampled curves, measured
/// from points to the other curve's closing polyline.
double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b);

struct DistinctOrbit {
  ReebOrbit orbit;           // simple representative
  std::vector<int> iterates;  // multiplicities seen (1 = simple)
  std::size_t hits = 0;       // raw orbits merged into this entry
  bool degenerate_family = false;
  std::size_t family_size = 1;  // geometrically different members merged
};

struct DedupeResult {
  std::vector<DistinctOrbit> orbits;  // sorted by action
};

/// Groups raw orbits by point set, keeps the minimal-period representative,
/// records iterates k <= 8, and merges a same-action level holding more than
/// half of the raw orbits into one degenerate-family entry.
DedupeResult deduplicate(const std::vector<ReebOrbit>& raw, double tol);

enum class Verdict { pass, fail, not_applicable };
std::string_view to_string(Verdict v);

struct SpectrumReport {
  std::string surface;
  int n = 0;
  double R1 = 0.0;
  double R2 = 0.0;
  double ratio = 0.0;
  double hypothesis_margin = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::vector<DistinctOrbit> orbits;
  std::size_t distinct_count = 0;
  int cuplength_bound = 0;  // cuplength(CP^{n-1}) + 1 = n
  bool degenerate = false;
  Verdict verdict = Verdict::fail;
  std::vector<std::string> notes;
  SearchStats stats;
};

SpectrumReport verify_pinching_theorem(const StarshapedSurface& S, const SearchConfig& cfg);

/// Report JSON (no timing fields, so identical inputs give identical bytes).
std::string report_to_json(const SpectrumReport& r);

/// Summary recomputed from a report document: verdict, count, actions.
struct ReportSummary {
  std::string surface;
  std::size_t distinct_count = 0;
  int cuplength_bound = 0;
  std::vector<double> actions;
  double min_period = 0.0;
  std::string verdict;
  bool consistent = false;  // stored verdict matches the recomputed one
};
ReportSummary summarize_report_json(std::string_view text);
std::string summary_to_json(const ReportSummary& s);

/// CSV "action,period,multiplicity", one row per (orbit, iterate).
std::string spectrum_csv(const SpectrumReport& r);

struct WirtingerLinks {
  double two_T = 0.0;
  double cauchy_schwarz = 0.0;  // |gamma'| |gamma_bar|
  double wirtinger = 0.0;       // (T / 2 pi) int |gamma'|^2
  double reeb_bound = 0.0;      // (T / 2 pi) (2 / R1)^2 T
  double slack[3] = {0.0, 0.0, 0.0};
};

struct BoundEntry {
  double T = 0.0;
  double slack = 0.0;  // T - pi R1^2
  WirtingerLinks links;
  bool ok = false;
};

struct BoundReport {
  double R1 = 0.0;
  double bound = 0.0;  // pi R1^2
  double hypothesis_margin = 0.0;
  bool asserted = false;  // hypothesis holds, so the bound is claimed
  bool pass = false;
  std::vector<BoundEntry> entries;
};

/// T >= pi R1^2 - tol per orbit, plus each link of the Wirtinger chain.
BoundReport verify_period_bound(const StarshapedSurface& S, const std::vector<ReebOrbit>& orbits,
                                double R1, double tol = 1e-8);

struct OracleOrbit {
  int j = 0;  // coordinate plane
  int k = 1;  // iterate
  double action = 0.0;
  bool resonant = false;  // equals an action of a different circle
};

struct OracleSpectrum {
  std::vector<OracleOrbit> orbits;  // sorted by action
  bool resonance = false;
  /// Point on the simple orbit j: r_j e_{2j}.
  Vec generator(int j) const;
  std::vector<double> radii;
};

/// Coordinate-circle orbits of the ellipsoid E(radii) and their iterates with
/// action k pi r_j^2 <= ceiling (absolute units).
OracleSpectrum ellipsoid_oracle(const std::vector<double>& radii, double ceiling);

}  // namespace reebpinch::search
