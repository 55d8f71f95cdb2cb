#include "reebpinch/orbit_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "json_util.hpp"

namespace reebpinch::search {

using detail::json;

namespace {
constexpr double kPi = std::numbers::pi;
}

void SearchConfig::validate() const {
  if (seeds == 0) throw std::invalid_argument("seeds must be positive");
  if (window && !(window->first < window->second)) {
    throw std::invalid_argument("window must satisfy lo < hi");
  }
  if (!(closure_tol > 0.0) || !(dedupe_tol > 0.0) || !(flow_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (samples < 8) throw std::invalid_argument("need at least 8 samples per orbit");
}

unsigned effective_workers(unsigned requested) {
  unsigned n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REEBPINCH_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

namespace {

// Orthonormal basis of nu^perp, pivoted on the coordinate vectors.
std::vector<Vec> tangent_basis(const Vec& nu) {
  const Eigen::Index d = nu.size();
  std::vector<Vec> span{nu};
  std::vector<Vec> out;
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  while (static_cast<Eigen::Index>(out.size()) < d - 1) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    Vec best_vec;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      Vec e = Vec::Zero(d);
      e[i] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : span) e -= b.dot(e) * b;
      }
      if (e.norm() > best_norm + 1e-12) {
        best_norm = e.norm();
        best = i;
        best_vec = e / e.norm();
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    span.push_back(best_vec);
    out.push_back(best_vec);
  }
  return out;
}

struct Shooter {
  const StarshapedSurface& S;
  const SearchConfig& cfg;
  std::pair<double, double> window;

  Vec end_point(const Vec& x, double T) const {
    return contact::flow(S, x, T, cfg.flow_tol).end;
  }

  // Candidate periods: local minima of |phi_t(x) - x| over the padded window.
  std::vector<double> trial_periods(const Vec& x) const {
    const double lo = window.first * 0.97, hi = window.second * 1.03;
    constexpr std::size_t kScan = 512;
    const auto fr = contact::flow(S, x, hi, 1e-9, kScan);
    std::vector<double> t(kScan + 1), d(kScan + 1);
    for (std::size_t k = 0; k <= kScan; ++k) {
      t[k] = hi * static_cast<double>(k) / kScan;
      d[k] = ((k < kScan ? fr.samples[k] : fr.end) - x).norm();
    }
    std::vector<std::pair<double, double>> minima;
    for (std::size_t k = 1; k <= kScan; ++k) {
      if (t[k] < lo) continue;
      const bool left = d[k] <= d[k - 1];
      const bool right = k == kScan || d[k] <= d[k + 1];
      if (left && right) minima.emplace_back(d[k], t[k]);
    }
    std::sort(minima.begin(), minima.end());
    std::vector<double> out;
    for (const auto& [dist, tt] : minima) {
      if (out.size() >= cfg.trials_per_seed) break;
      out.push_back(tt);
    }
    return out;
  }

  // Golden-section refinement of T for fixed x on [T - h, T + h].
  double refine_period(const Vec& x, double T, double h) const {
    constexpr double g = 0.6180339887498949;
    double a = std::max(T - h, 1e-6), b = T + h;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = (end_point(x, c) - x).norm(), fd = (end_point(x, d) - x).norm();
    for (int it = 0; it < 12; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = (end_point(x, c) - x).norm();
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = (end_point(x, d) - x).norm();
      }
    }
    return fc < fd ? c : d;
  }

  // Levenberg-Marquardt on (tangent chart of x, T) for phi_T(x) - x = 0.
  std::optional<std::pair<Vec, double>> solve(Vec x, double T) const {
    const int d = S.dim();
    Vec res = end_point(x, T) - x;
    double rn = res.norm();
    double lambda = 1e-3;
    const double scale = S.R();
    for (std::size_t it = 0; it < cfg.max_refinements && rn >= cfg.closure_tol; ++it) {
      const Vec nu = contact::normal_at(S, x);
      const auto B = tangent_basis(nu);
      Eigen::MatrixXd J(d, d);
      const double h = 1e-7 * scale;
      for (int i = 0; i < d - 1; ++i) {
        const Vec xp = S.project(x + h * B[static_cast<std::size_t>(i)]);
        const Vec rp = end_point(xp, T) - xp;
        J.col(i) = (rp - res) / h;
      }
      J.col(d - 1) = contact::reeb_field(S, res + x);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const Eigen::VectorXd ur = svd.matrixU().transpose() * Eigen::VectorXd(res);
      bool improved = false;
      for (int attempt = 0; attempt < 8 && !improved; ++attempt) {
        Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
        for (int k = 0; k < d; ++k) {
          if (sv[k] < 1e-9 * sv[0]) continue;  // time-shift direction
          step -= (sv[k] / (sv[k] * sv[k] + lambda)) * ur[k] * svd.matrixV().col(k);
        }
        Vec dx = Vec::Zero(d);
        for (int i = 0; i < d - 1; ++i) dx += step[i] * B[static_cast<std::size_t>(i)];
        const double lim = 0.2 * scale;
        if (dx.norm() > lim) {
          step *= lim / dx.norm();
          dx *= lim / dx.norm();
        }
        const double Tn = T + step[d - 1];
        if (!(Tn > 0.0)) {
          lambda *= 10;
          continue;
        }
        const Vec xn = S.project(x + dx);
        const Vec rnew = end_point(xn, Tn) - xn;
        if (rnew.norm() < rn) {
          x = xn;
          T = Tn;
          res = rnew;
          rn = rnew.norm();
          lambda = std::max(lambda / 10, 1e-12);
          improved = true;
        } else {
          lambda *= 10;
        }
      }
      if (!improved) break;
    }
    if (rn < cfg.closure_tol) return std::make_pair(x, T);
    return std::nullopt;
  }
};

struct SeedOutcome {
  std::vector<ReebOrbit> orbits;
  std::size_t trials = 0, converged = 0, outside = 0, failed = 0;
};

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

SearchResult find_closed_orbits(const StarshapedSurface& S, const SearchConfig& cfg,
                                std::pair<double, double> window) {
  cfg.validate();
  if (!(window.first <= window.second) || !(window.first > 0.0)) {
    throw std::invalid_argument("window must satisfy 0 < lo <= hi");
  }
  const auto thetas = numerics::sphere_points(S.dim(), cfg.seeds, cfg.rng_seed);
  std::vector<SeedOutcome> outcomes(thetas.size());
  const Shooter sh{S, cfg, window};
  const double wtol = std::max(cfg.closure_tol, 1e-9 * window.second);

  auto run_seed = [&](std::size_t i) {
    SeedOutcome& out = outcomes[i];
    const Vec x0 = S.point_at(thetas[i]);
    std::vector<double> periods;
    try {
      periods = sh.trial_periods(x0);
    } catch (const contact::ContactError&) {
      ++out.failed;
      return;
    }
    for (double T0 : periods) {
      ++out.trials;
      try {
        const double step = 0.03 * window.second / 6.0;
        const double T1 = sh.refine_period(x0, T0, step);
        auto sol = sh.solve(x0, T1);
        if (!sol) {
          ++out.failed;
          continue;
        }
        const auto& [x, T] = *sol;
        if (T < window.first - wtol || T > window.second + wtol) {
          ++out.outside;
          continue;
        }
        const auto fr = contact::flow(S, x, T, cfg.flow_tol, cfg.samples);
        ReebOrbit o;
        o.points = fr.samples;
        o.period = T;
        o.action = contact::orbit_action(S, o.points, T);
        o.closure_residual = (fr.end - x).norm();
        if (!(o.closure_residual < cfg.closure_tol)) {
          ++out.failed;
          continue;
        }
        ++out.converged;
        out.orbits.push_back(std::move(o));
      } catch (const contact::ContactError&) {
        ++out.failed;
      } catch (const NumericalError&) {
        ++out.failed;
      }
    }
  };

  const unsigned workers =
      std::min<unsigned>(effective_workers(cfg.threads), static_cast<unsigned>(thetas.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < thetas.size(); ++i) run_seed(i);
  } else {
    // Static interleaved partition; every seed writes only its own slot.
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < thetas.size(); i += workers) run_seed(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  SearchResult res;
  res.stats.seeds = thetas.size();
  res.stats.workers = workers;
  for (auto& o : outcomes) {
    res.stats.trials += o.trials;
    res.stats.converged += o.converged;
    res.stats.outside_window += o.outside;
    res.stats.failed += o.failed;
    for (auto& orb : o.orbits) res.orbits.push_back(std::move(orb));
  }
  std::stable_sort(res.orbits.begin(), res.orbits.end(), [](const ReebOrbit& a, const ReebOrbit& b) {
    if (a.action != b.action) return a.action < b.action;
    return lex_less(a.points.front(), b.points.front());
  });
  return res;
}

namespace {

double point_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double L2 = ab.squaredNorm();
  double t = L2 > 0.0 ? (p - a).dot(ab) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double directed(const std::vector<Vec>& a, const std::vector<Vec>& b, double cutoff) {
  double worst = 0.0;
  for (const Vec& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size() && best > worst; ++k) {
      best = std::min(best, point_segment(p, b[k], b[(k + 1) % b.size()]));
    }
    worst = std::max(worst, best);
    if (worst > cutoff) return worst;
  }
  return worst;
}

}  // namespace

double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const double inf = std::numeric_limits<double>::infinity();
  return std::max(directed(a, b, inf), directed(b, a, inf));
}

DedupeResult deduplicate(const std::vector<ReebOrbit>& raw, double tol) {
  // Shortest periods first so each geometric group is founded by its simple
  // orbit whenever that orbit is present.
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a].period < raw[b].period; });

  auto same_set = [tol](const ReebOrbit& a, const ReebOrbit& b) {
    return std::max(directed(a.points, b.points, tol), directed(b.points, a.points, tol)) < tol;
  };

  std::vector<DistinctOrbit> groups;
  for (std::size_t idx : order) {
    const ReebOrbit& o = raw[idx];
    bool placed = false;
    for (auto& g : groups) {
      const double ratio = o.period / g.orbit.period;
      const double k = std::round(ratio);
      if (k < 1 || k > 8 || std::abs(ratio - k) > tol * k) continue;
      if (!same_set(o, g.orbit)) continue;
      const int ki = static_cast<int>(k);
      if (std::find(g.iterates.begin(), g.iterates.end(), ki) == g.iterates.end()) {
        g.iterates.push_back(ki);
        std::sort(g.iterates.begin(), g.iterates.end());
      }
      ++g.hits;
      placed = true;
      break;
    }
    if (!placed) {
      DistinctOrbit d;
      d.orbit = o;
      d.orbit.multiplicity = 1;
      d.iterates = {1};
      d.hits = 1;
      groups.push_back(std::move(d));
    }
  }

  // Same-action levels with several geometric groups and most of the hits
  // are reported as one degenerate family.
  std::stable_sort(groups.begin(), groups.end(), [](const DistinctOrbit& a, const DistinctOrbit& b) {
    return a.orbit.action < b.orbit.action;
  });
  DedupeResult out;
  std::size_t i = 0;
  while (i < groups.size()) {
    std::size_t j = i + 1;
    while (j < groups.size() &&
           std::abs(groups[j].orbit.action - groups[i].orbit.action) < tol) {
      ++j;
    }
    std::size_t hits = 0;
    for (std::size_t k = i; k < j; ++k) hits += groups[k].hits;
    if (j - i >= 2 && 2 * hits > raw.size()) {
      DistinctOrbit fam = groups[i];
      fam.degenerate_family = true;
      fam.family_size = j - i;
      fam.hits = hits;
      for (std::size_t k = i + 1; k < j; ++k) {
        for (int it : groups[k].iterates) {
          if (std::find(fam.iterates.begin(), fam.iterates.end(), it) == fam.iterates.end()) {
            fam.iterates.push_back(it);
          }
        }
      }
      std::sort(fam.iterates.begin(), fam.iterates.end());
      out.orbits.push_back(std::move(fam));
    } else {
      for (std::size_t k = i; k < j; ++k) out.orbits.push_back(std::move(groups[k]));
    }
    i = j;
  }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_applicable:
      return "not-applicable";
  }
  return "?";
}

SpectrumReport verify_pinching_theorem(const StarshapedSurface& S, const SearchConfig& cfg) {
  SpectrumReport rep;
  rep.surface = S.label();
  rep.n = S.n();
  rep.cuplength_bound = S.n();
  const auto pr = contact::pinch_radii(S);
  rep.R1 = pr.R1;
  rep.R2 = pr.R2;
  rep.ratio = pr.ratio;
  rep.window = cfg.window.value_or(std::make_pair(kPi * pr.R1 * pr.R1, kPi * pr.R2 * pr.R2));
  rep.hypothesis_margin = contact::hypothesis_margin(S, pr.R1);
  if (!pr.ratio_ok) {
    rep.verdict = Verdict::not_applicable;
    rep.notes.push_back(fmt::format("pinching ratio R2/R1 = {:.6g} is not below sqrt(2)", pr.ratio));
    return rep;
  }
  if (rep.hypothesis_margin < -1e-9 * pr.R1) {
    rep.notes.push_back(fmt::format(
        "hypothesis <nu(z), z> >= R1 fails (margin {:.3g}); period bound not claimed",
        rep.hypothesis_margin));
  }
  const auto found = find_closed_orbits(S, cfg, rep.window);
  rep.stats = found.stats;
  auto dd = deduplicate(found.orbits, cfg.dedupe_tol);
  rep.orbits = std::move(dd.orbits);
  rep.distinct_count = rep.orbits.size();
  for (const auto& o : rep.orbits) {
    if (o.degenerate_family) {
      rep.degenerate = true;
      rep.notes.push_back(fmt::format(
          "degenerate family at action {:.12g}: {} geometrically different orbits share it",
          o.orbit.action, o.family_size));
    }
    const double etol = std::max(cfg.dedupe_tol, 1e-9 * rep.window.second);
    if (std::abs(o.orbit.action - rep.window.first) < etol ||
        std::abs(o.orbit.action - rep.window.second) < etol) {
      rep.notes.push_back(
          fmt::format("action {:.12g} sits on a window endpoint", o.orbit.action));
    }
  }
  const bool enough = static_cast<int>(rep.distinct_count) >= rep.cuplength_bound;
  rep.verdict = (enough || rep.degenerate) ? Verdict::pass : Verdict::fail;
  return rep;
}

std::string report_to_json(const SpectrumReport& r) {
  json doc;
  doc["surface"] = r.surface;
  doc["n"] = r.n;
  doc["R1"] = r.R1;
  doc["R2"] = r.R2;
  doc["ratio"] = r.ratio;
  doc["hypothesis_margin"] = r.hypothesis_margin;
  doc["window"] = {r.window.first, r.window.second};
  json orbits = json::array();
  for (const auto& o : r.orbits) {
    orbits.push_back({{"T", o.orbit.period},
                      {"action", o.orbit.action},
                      {"residual", o.orbit.closure_residual},
                      {"multiplicity", o.orbit.multiplicity},
                      {"iterates", o.iterates},
                      {"hits", o.hits},
                      {"degenerate_family", o.degenerate_family}});
  }
  doc["orbits"] = orbits;
  doc["distinct_count"] = r.distinct_count;
  doc["cuplength_bound"] = r.cuplength_bound;
  doc["degenerate"] = r.degenerate;
  doc["pass"] = r.verdict == Verdict::pass;
  doc["verdict"] = std::string(to_string(r.verdict));
  doc["notes"] = r.notes;
  doc["search"] = {{"seeds", r.stats.seeds},
                   {"trials", r.stats.trials},
                   {"converged", r.stats.converged},
                   {"outside_window", r.stats.outside_window},
                   {"failed", r.stats.failed}};
  return detail::dump17(doc);
}

ReportSummary summarize_report_json(std::string_view text) {
  const json doc = detail::parse_json(text, "report");
  ReportSummary s;
  s.surface = detail::require(doc, "surface", "report").get<std::string>();
  s.cuplength_bound = detail::require(doc, "cuplength_bound", "report").get<int>();
  const json& orbits = detail::require(doc, "orbits", "report");
  bool degenerate = false;
  s.min_period = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const std::string path = fmt::format("report.orbits[{}]", i);
    s.actions.push_back(detail::require_number(orbits[i], "action", path));
    s.min_period = std::min(s.min_period, detail::require_number(orbits[i], "T", path));
    if (auto it = orbits[i].find("degenerate_family"); it != orbits[i].end() && it->get<bool>()) {
      degenerate = true;
    }
  }
  if (orbits.empty()) s.min_period = 0.0;
  s.distinct_count = orbits.size();
  const std::string stored = detail::require(doc, "verdict", "report").get<std::string>();
  if (stored == "not-applicable") {
    s.verdict = stored;
  } else {
    const bool pass =
        static_cast<int>(s.distinct_count) >= s.cuplength_bound || degenerate;
    s.verdict = pass ? "pass" : "fail";
  }
  s.consistent = s.verdict == stored &&
                 s.distinct_count == detail::require(doc, "distinct_count", "report").get<std::size_t>();
  return s;
}

std::string summary_to_json(const ReportSummary& s) {
  json doc;
  doc["surface"] = s.surface;
  doc["distinct_count"] = s.distinct_count;
  doc["cuplength_bound"] = s.cuplength_bound;
  doc["actions"] = s.actions;
  json over_pi = json::array();
  for (double a : s.actions) over_pi.push_back(a / kPi);
  doc["actions_over_pi"] = over_pi;
  doc["min_period"] = s.min_period;
  doc["verdict"] = s.verdict;
  doc["consistent"] = s.consistent;
  return detail::dump17(doc);
}

std::string spectrum_csv(const SpectrumReport& r) {
  std::string out = "action,period,multiplicity\n";
  for (const auto& o : r.orbits) {
    for (int k : o.iterates) {
      out += fmt::format("{},{},{}\n", numerics::format_double(k * o.orbit.action),
                         numerics::format_double(k * o.orbit.period), k);
    }
  }
  return out;
}

BoundReport verify_period_bound(const StarshapedSurface& S, const std::vector<ReebOrbit>& orbits,
                                double R1, double tol) {
  BoundReport rep;
  rep.R1 = R1;
  rep.bound = kPi * R1 * R1;
  rep.hypothesis_margin = contact::hypothesis_margin(S, R1);
  rep.asserted = rep.hypothesis_margin >= -1e-9 * R1;
  rep.pass = true;
  for (const auto& o : orbits) {
    BoundEntry e;
    e.T = o.period;
    e.slack = o.period - rep.bound;
    const std::size_t N = o.points.size();
    const auto vel = numerics::periodic_derivative(o.points, o.period);
    Vec mean = Vec::Zero(S.dim());
    for (const auto& p : o.points) mean += p;
    mean /= static_cast<double>(N);
    double vv = 0.0, gg = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      vv += vel[k].squaredNorm();
      gg += (o.points[k] - mean).squaredNorm();
    }
    const double dt = o.period / static_cast<double>(N);
    vv *= dt;
    gg *= dt;
    auto& L = e.links;
    L.two_T = 2 * o.period;
    L.cauchy_schwarz = std::sqrt(vv) * std::sqrt(gg);
    L.wirtinger = o.period / (2 * kPi) * vv;
    L.reeb_bound = o.period / (2 * kPi) * (2.0 / R1) * (2.0 / R1) * o.period;
    L.slack[0] = L.cauchy_schwarz - L.two_T;
    L.slack[1] = L.wirtinger - L.cauchy_schwarz;
    L.slack[2] = L.reeb_bound - L.wirtinger;
    const double ltol = 1e-9 * std::max(1.0, L.reeb_bound);
    const bool links_ok = L.slack[0] >= -ltol && L.slack[1] >= -ltol &&
                          (!rep.asserted || L.slack[2] >= -ltol);
    e.ok = links_ok && (!rep.asserted || e.slack >= -tol);
    rep.pass = rep.pass && e.ok;
    rep.entries.push_back(e);
  }
  return rep;
}

Vec OracleSpectrum::generator(int j) const {
  Vec x = Vec::Zero(2 * static_cast<Eigen::Index>(radii.size()));
  x[2 * j] = radii.at(static_cast<std::size_t>(j));
  return x;
}

OracleSpectrum ellipsoid_oracle(const std::vector<double>& radii, double ceiling) {
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("ellipsoid_oracle: radii must be positive");
  }
  OracleSpectrum sp;
  sp.radii = radii;
  const double eps = 1e-12 * std::max(1.0, ceiling);
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double a = kPi * radii[j] * radii[j];
    for (int k = 1; k * a <= ceiling + eps; ++k) {
      sp.orbits.push_back({static_cast<int>(j), k, k * a, false});
    }
  }
  for (auto& o : sp.orbits) {
    for (const auto& p : sp.orbits) {
      if (p.j != o.j && std::abs(p.action - o.action) <= 1e-12 * std::max(1.0, o.action)) {
        o.resonant = true;
      }
    }
    sp.resonance = sp.resonance || o.resonant;
  }
  std::stable_sort(sp.orbits.begin(), sp.orbits.end(), [](const OracleOrbit& a, const OracleOrbit& b) {
    if (a.action != b.action) return a.action < b.action;
    return a.j < b.j;
  });
  return sp;
}

}  // namespace reebpinch::search
