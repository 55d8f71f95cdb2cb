#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "reebpinch/orbit_search.hpp"
#include "surfaces.hpp"

using namespace reebpinch;
using namespace reebpinch::search;
using contact::StarshapedSurface;

namespace {

SearchConfig small_config(std::size_t seeds = 24) {
  SearchConfig cfg;
  cfg.seeds = seeds;
  cfg.threads = 1;
  return cfg;
}

contact::ReebOrbit circle_orbit(double r, int plane, std::size_t N, double phase, int k = 1) {
  contact::ReebOrbit o;
  o.period = k * oracle::kPi * r * r;
  o.action = o.period;
  for (std::size_t i = 0; i < N; ++i) {
    const double t = phase + 2 * oracle::kPi * k * static_cast<double>(i) / static_cast<double>(N);
    Vec x = Vec::Zero(4);
    x[2 * plane] = r * std::cos(t);
    x[2 * plane + 1] = r * std::sin(t);
    o.points.push_back(x);
  }
  return o;
}

}  // namespace

TEST_SUITE("orbit_search") {
  TEST_CASE("ellipsoid E(1, 1.2) matches the oracle") {
    const std::vector<double> radii{1.0, 1.2};
    const auto rep = verify_pinching_theorem(StarshapedSurface::ellipsoid(radii), small_config());
    const auto expected = oracle::ellipsoid_simple_actions(radii, rep.window.first, rep.window.second);
    CHECK(rep.verdict == Verdict::pass);
    REQUIRE(rep.distinct_count == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(std::abs(rep.orbits[i].orbit.action - expected[i]) <= 1e-6 * expected[i]);
    }
  }

  TEST_CASE("oracle equivalence for another generic ellipsoid") {
    const std::vector<double> radii{1.05, 1.17};
    const auto rep = verify_pinching_theorem(StarshapedSurface::ellipsoid(radii), small_config());
    const auto expected = oracle::ellipsoid_simple_actions(radii, rep.window.first, rep.window.second);
    REQUIRE(rep.distinct_count == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(std::abs(rep.orbits[i].orbit.action - expected[i]) <= 1e-6 * expected[i]);
    }
  }

  TEST_CASE("accepted orbits: action equals period, strictly increasing actions") {
    const auto cfg = small_config();
    const auto S = StarshapedSurface::ellipsoid({1.0, 1.2});
    const auto found = find_closed_orbits(S, cfg, {oracle::kPi, 1.44 * oracle::kPi});
    REQUIRE_FALSE(found.orbits.empty());
    for (const auto& o : found.orbits) {
      CHECK(std::abs(o.action - o.period) < cfg.closure_tol);
      CHECK(o.closure_residual < cfg.closure_tol);
    }
    const auto dd = deduplicate(found.orbits, cfg.dedupe_tol);
    for (std::size_t i = 1; i < dd.orbits.size(); ++i) {
      CHECK(dd.orbits[i].orbit.action > dd.orbits[i - 1].orbit.action + cfg.dedupe_tol);
    }
  }

  TEST_CASE("determinism across worker counts") {
    const auto S = StarshapedSurface::ellipsoid({1.0, 1.2});
    auto a = small_config(12);
    auto b = a;
    b.threads = 3;
    const auto ra = report_to_json(verify_pinching_theorem(S, a));
    const auto rb = report_to_json(verify_pinching_theorem(S, b));
    CHECK(ra == rb);
  }

  TEST_CASE("round sphere: degenerate family and a sharp period bound") {
    const auto S = StarshapedSurface::sphere(2, 1.0);
    const auto rep = verify_pinching_theorem(S, small_config(12));
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.degenerate);
    std::vector<contact::ReebOrbit> orbits;
    for (const auto& o : rep.orbits) orbits.push_back(o.orbit);
    REQUIRE_FALSE(orbits.empty());
    const auto bound = verify_period_bound(S, orbits, 1.0);
    CHECK(bound.asserted);
    CHECK(bound.pass);
    for (const auto& e : bound.entries) CHECK(std::abs(e.T - oracle::kPi) < 1e-9);
  }

  TEST_CASE("pinching ratio too large is not applicable") {
    const auto rep =
        verify_pinching_theorem(StarshapedSurface::ellipsoid({1.0, 1.5}), small_config(4));
    CHECK(rep.verdict == Verdict::not_applicable);
    CHECK(rep.orbits.empty());
  }

  TEST_CASE("Hausdorff distance ignores sampling phase") {
    const auto a = circle_orbit(1.0, 0, 128, 0.0);
    const auto b = circle_orbit(1.0, 0, 96, 0.3);
    const auto c = circle_orbit(1.2, 1, 128, 0.0);
    CHECK(hausdorff_distance(a.points, b.points) < 1e-3);
    CHECK(hausdorff_distance(a.points, c.points) > 0.5);
    CHECK(hausdorff_distance(a.points, c.points) == hausdorff_distance(c.points, a.points));
  }

  TEST_CASE("dedupe records iterates and keeps the simple orbit") {
    const std::vector<contact::ReebOrbit> raw{
        circle_orbit(1.0, 0, 256, 0.0, 2), circle_orbit(1.0, 0, 128, 0.7),
        circle_orbit(1.2, 1, 128, 0.1), circle_orbit(1.0, 0, 200, 1.3)};
    const auto dd = deduplicate(raw, 1e-3);
    REQUIRE(dd.orbits.size() == 2);
    CHECK(dd.orbits[0].orbit.period == doctest::Approx(oracle::kPi));
    CHECK(dd.orbits[0].iterates == std::vector<int>{1, 2});
    CHECK(dd.orbits[0].hits == 3);
    CHECK(dd.orbits[1].iterates == std::vector<int>{1});
  }

  TEST_CASE("ellipsoid oracle lists iterates and resonances") {
    const auto sp = ellipsoid_oracle({1.0, 1.2}, 3.0 * oracle::kPi);
    std::vector<double> actions;
    for (const auto& o : sp.orbits) actions.push_back(o.action / oracle::kPi);
    REQUIRE(actions.size() == 5);  // 1, 1.44, 2, 2.88, 3
    CHECK(actions[0] == doctest::Approx(1.0));
    CHECK(actions[1] == doctest::Approx(1.44));
    CHECK(actions[4] == doctest::Approx(3.0));
    CHECK_FALSE(sp.resonance);
    CHECK(ellipsoid_oracle({1.0, std::sqrt(2.0)}, 2.5 * oracle::kPi).resonance);
    CHECK(sp.generator(1)[2] == 1.2);
  }

  TEST_CASE("report round trip reproduces the summary") {
    const auto rep =
        verify_pinching_theorem(StarshapedSurface::ellipsoid({1.0, 1.2}), small_config(12));
    const auto text = report_to_json(rep);
    const auto s = summarize_report_json(text);
    CHECK(s.consistent);
    CHECK(s.verdict == "pass");
    CHECK(s.distinct_count == rep.distinct_count);
    REQUIRE(s.actions.size() == rep.orbits.size());
    for (std::size_t i = 0; i < s.actions.size(); ++i) CHECK(s.actions[i] == rep.orbits[i].orbit.action);
    CHECK(summary_to_json(summarize_report_json(text)) == summary_to_json(s));
    CHECK(spectrum_csv(rep).rfind("action,period,multiplicity\n", 0) == 0);
  }

  TEST_CASE("period bound and Wirtinger chain on random surfaces") {
    for (unsigned idx : {0u, 1u, 2u}) {
      const auto S = fixtures::random_surface(idx);
      const auto pr = contact::pinch_radii(S);
      auto cfg = small_config(12);
      const double lo = 0.5 * oracle::kPi * pr.R1 * pr.R1, hi = 1.1 * oracle::kPi * pr.R2 * pr.R2;
      const auto found = find_closed_orbits(S, cfg, {lo, hi});
      CHECK_FALSE(found.orbits.empty());
      const auto bound = verify_period_bound(S, found.orbits, pr.R1);
      INFO("surface " << idx << " margin " << bound.hypothesis_margin);
      CHECK(bound.pass);
      for (const auto& e : bound.entries) {
        for (double sl : e.links.slack) CHECK(sl >= -1e-9 * e.links.reeb_bound);
      }
    }
  }

  TEST_CASE("config validation") {
    SearchConfig cfg;
    cfg.closure_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SearchConfig{};
    cfg.window = std::make_pair(2.0, 1.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}
