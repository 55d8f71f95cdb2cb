#include <cmath>
#include <limits>

#include <doctest.h>

#include "oracles.hpp"
#include "reebpinch/radial_profile.hpp"

using namespace reebpinch;
using namespace reebpinch::profile;

namespace {

const RadialProfile& base_profile() {
  static const RadialProfile p = build_profile(make_core(1.5, 0.5, 0.8));
  return p;
}

const BulletCheck& bullet(const PropertyReport& r, int id) {
  for (const auto& b : r.bullets) {
    if (b.id == id) return b;
  }
  throw std::logic_error("missing bullet");
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

}  // namespace

TEST_SUITE("radial_profile") {
  TEST_CASE("validate_core matches the closed forms") {
    const auto rep = validate_core(1.5, 0.5, 0.8);
    REQUIRE(rep.pass);
    CHECK(*rep.B == doctest::Approx(oracle::B(1.5, 0.5, 0.8)).epsilon(1e-14));
    CHECK(*rep.window_width == doctest::Approx(oracle::window_width(1.5, 0.5, 0.8)).epsilon(1e-14));
    CHECK(std::abs(*rep.B - 0.934123) < 1e-6);
    CHECK(std::abs(*rep.window_width - 0.347298) < 1e-6);
  }

  TEST_CASE("validate_core names the failing constraint") {
    CHECK(oracle::first_constraint_bound(1.5) == doctest::Approx(0.841).epsilon(1e-3));
    const auto bad_c = validate_core(1.5, 0.5, 0.9);
    CHECK_FALSE(bad_c.pass);
    CHECK(bad_c.diagnostic.find("(R0-1)/(1-log R0)") != std::string::npos);

    const auto bad_R0 = validate_core(1.0, 0.5, 0.5);
    CHECK_FALSE(bad_R0.pass);
    CHECK(bad_R0.diagnostic.find("1 < R0 < 2") != std::string::npos);

    const auto nan = validate_core(std::numeric_limits<double>::quiet_NaN(), 0.5, 0.5);
    CHECK_FALSE(nan.pass);
    CHECK_THROWS_AS(make_core(1.5, 0.5, 0.9), ProfileError);
  }

  TEST_CASE("log core against the written-out formula") {
    const auto core = make_core(1.5, 0.5, 0.8);
    for (double r : log_grid(0.05, 3.0, 200)) {
      const auto v = log_core_eval(core, r);
      CHECK(v.k == doctest::Approx(oracle::k(0.5, 0.8, r)).epsilon(1e-12).scale(1.0));
      CHECK(v.dk == doctest::Approx(oracle::dk(0.5, 0.8, r)).epsilon(1e-13));
      CHECK(v.ddk == doctest::Approx(oracle::ddk(0.8, r)).epsilon(1e-13));
    }
    const auto at_A = log_core_eval(core, 0.5);
    CHECK(std::abs(at_A.k) < 1e-15);
    CHECK(at_A.dk == 1.0);
    CHECK(0.5 * at_A.ddk == doctest::Approx(0.8));
    CHECK(log_core_eval(core, core.B()).dk == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(log_core_eval(core, 0.7).dk == doctest::Approx(1.0 + 0.8 * std::log(1.4)).epsilon(1e-15));
  }

  TEST_CASE("forbidden set is half-open and periodic") {
    const auto core = make_core(1.5, 0.5, 0.8);
    const double w = oracle::window_width(1.5, 0.5, 0.8);
    CHECK(in_forbidden_set(core, 0.5));
    CHECK(forbidden_distance(core, 0.5) <= 0.0);
    CHECK_FALSE(in_forbidden_set(core, 0.5 + w + 0.01));
    CHECK(forbidden_distance(core, 0.5 + w + 0.01) > 0.0);
    CHECK(in_forbidden_set(core, 1.6));
    for (int i = 0; i <= 400; ++i) {
      const double v = -3.0 + 0.0173 * i;
      // Skip points within the guard band of an endpoint.
      const double m = v - std::floor(v - 0.5);
      if (std::abs(m - 0.5) < 1e-9 || std::abs(m - 0.5 - w) < 1e-9) continue;
      CHECK(in_forbidden_set(core, v) == oracle::forbidden(0.5, w, v));
    }
  }

  TEST_CASE("built profile hits the closed-form anchor values") {
    const auto& p = base_profile();
    const double B = oracle::B(1.5, 0.5, 0.8);
    CHECK(std::abs(p.h(0.5)) < 1e-12);
    CHECK(p.h(B) == doctest::Approx(oracle::h_at_B(1.5, 0.5, 0.8)).epsilon(1e-10));
    CHECK(std::abs(p.h(B) - 0.553886) < 1e-6);
    const auto& sh = p.shape();
    for (double r : {0.0, 0.25 * sh.delta_bar, sh.delta_bar}) {
      CHECK(p.h(r) == doctest::Approx(sh.h0).epsilon(1e-14));
      CHECK(p.dh(r) == 0.0);
    }
    for (double r : {sh.r_flat, sh.r_flat * 1.5, 1e4}) {
      CHECK(p.h(r) == doctest::Approx(sh.h_inf).epsilon(1e-12));
    }
  }

  TEST_CASE("verify_profile passes all thirteen bullets on the base profile") {
    const auto rep = verify_profile(base_profile());
    CHECK(rep.pass);
    CHECK(rep.bullets.size() == 13);
    for (const auto& b : rep.bullets) {
      INFO(b.id << " " << b.name << " margin " << b.margin);
      CHECK(b.pass);
    }
    CHECK(rep.grid_points >= 10000);
    CHECK(rep.min_hessian_margin >= 0.19);
    CHECK(rep.max_slope < 2.0);
  }

  TEST_CASE("tampered slope fails the slope ceiling") {
    const auto& p = base_profile();
    auto pieces = p.pieces();
    const double right = p.core().B() + p.shape().delta;
    bool tampered = false;
    for (auto& pc : pieces) {
      if (pc.kind == PieceKind::hermite && std::abs(pc.r_lo - right) < 1e-12) {
        pc.coeffs[0] = 2.1;
        tampered = true;
      }
    }
    REQUIRE(tampered);
    const auto bad = RadialProfile::from_pieces(p.core(), p.shape(), pieces);
    CHECK(bad.dh(right) == doctest::Approx(2.1));
    const auto rep = verify_profile(bad);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(bullet(rep, 2).pass);
    CHECK_THROWS_AS(certify(bad), ProfileError);
  }

  TEST_CASE("h0 = -A fails the -h(0) bullet") {
    const auto& p = base_profile();
    auto anchors = p.anchors();
    const double shift = -p.core().A - p.shape().h0;
    for (auto& a : anchors) a += shift;
    auto shape = p.shape();
    shape.h0 = -p.core().A;
    shape.h_inf += shift;
    const auto bad = RadialProfile::from_pieces(p.core(), shape, p.pieces(), anchors);
    CHECK(bad.h(0.0) == doctest::Approx(-0.5));
    const auto rep = verify_profile(bad);
    CHECK_FALSE(bullet(rep, 7).pass);
  }

  TEST_CASE("affine action law on [A, B]") {
    const auto& p = base_profile();
    const double A = 0.5, B = oracle::B(1.5, 0.5, 0.8);
    for (int i = 0; i <= 1000; ++i) {
      const double r = A + (B - A) * i / 1000.0;
      CHECK(std::abs(action_at(p, r) - oracle::core_action(0.5, 0.8, r)) < 1e-10);
    }
    CHECK(action_at(p, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(action_at(p, 0.7) == doctest::Approx(0.66).epsilon(1e-12));
    CHECK(action_at(p, 0.5 * p.shape().delta_bar) == doctest::Approx(-p.shape().h0));
  }

  TEST_CASE("Hessian bound on base, rescaled and homotopy slices") {
    const auto& p = base_profile();
    const auto grid = log_grid(1e-3, 400.0, 10000);
    const auto q = rescaled(p);
    double worst_base = 1.0, worst_resc = 1.0;
    for (double r : grid) {
      worst_base = std::min(worst_base, 1.0 - std::abs(r * p.ddh(r)));
      worst_resc = std::min(worst_resc, 1.0 - std::abs(r * q.ddh(r)));
    }
    CHECK(worst_base > 0.0);
    CHECK(worst_resc > 0.0);
    const MonotoneHomotopy H(certify(p));
    for (double s : {-1.0, -0.75, -0.5, -0.25, 0.0}) {
      double worst = 1.0;
      for (double r : grid) worst = std::min(worst, 1.0 - std::abs(H.log_hessian(s, r)));
      INFO("s = " << s);
      CHECK(worst > 0.0);
    }
  }

  TEST_CASE("monotone homotopy on a 1000 x 1000 grid") {
    const MonotoneHomotopy H(certify(base_profile()));
    const auto rs = log_grid(1e-3, 400.0, 1000);
    double worst = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const double s = -1.2 + 1.4 * i / 999.0;
      for (double r : rs) worst = std::max(worst, H.ds(s, r));
    }
    CHECK(worst <= 0.0);
    for (double r : rs) CHECK(base_profile().h(r) >= base_profile().h(r / 1.5) - 1e-15);
  }

  TEST_CASE("homotopy endpoints and the sign of the mixed derivative") {
    const auto& p = base_profile();
    const MonotoneHomotopy H(certify(p));
    const auto q = rescaled(p);
    for (double r : {0.3, 0.5, 0.8, 1.2, 2.0}) {
      const auto v = homotopy_eval(H, -2.0, r);
      CHECK(v.h == p.h(r));
      CHECK(v.dsdr == 0.0);
      CHECK(homotopy_eval(H, 0.5, r).h == doctest::Approx(q.h(r)).epsilon(1e-14));
    }
    const double B = p.core().B();
    for (int i = 1; i < 50; ++i) {
      const double r = 0.5 + (1.5 * B - 0.5) * i / 50.0;
      if (p.ddh(r) >= 0.0) CHECK(homotopy_eval(H, -0.5, r).dsdr < 0.0);
    }
  }

  TEST_CASE("rescaling identities") {
    const auto& p = base_profile();
    const auto q = rescaled(p);
    const double R0 = 1.5, B = p.core().B();
    CHECK(action_at(q, R0 * B) == doctest::Approx(0.847298).epsilon(1e-6));
    CHECK(std::abs(action_at(q, R0 * B) - (0.5 + oracle::window_width(1.5, 0.5, 0.8))) < 1e-10);
    CHECK(q.dh(R0 * 0.5) == doctest::Approx(1.0 / R0).epsilon(1e-14));
    for (double r : log_grid(0.01, 5.0, 500)) {
      CHECK(action_at(q, R0 * r) == doctest::Approx(r * p.dh(r) - p.h(r)).epsilon(1e-12).scale(1.0));
    }
    CHECK_FALSE(in_forbidden_set(p.core(), action_at(q, R0 * p.shape().C)));
    CHECK_THROWS_AS(rescaled(q), ProfileError);
    CHECK(verify_profile(q).pass);
  }

  TEST_CASE("periodic levels and their flags") {
    const auto cp = certify(base_profile());
    const auto levels = periodic_levels(cp);
    bool saw2 = false;
    for (const auto& l : levels) {
      if (l.cls == 2 && std::abs(l.r_lo - 0.5) < 1e-12) {
        saw2 = true;
        CHECK(l.action == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(l.forbidden);
      } else {
        INFO("class " << l.cls << " action " << l.action);
        CHECK_FALSE(l.forbidden);
      }
    }
    CHECK(saw2);

    const auto cq = certify(rescaled(base_profile()));
    std::vector<double> slope_one;
    for (const auto& l : periodic_levels(cq)) {
      if (l.slope == 1 && l.r_lo == l.r_hi) slope_one.push_back(l.r_lo);
    }
    const double R0 = 1.5;
    REQUIRE(slope_one.size() == 2);
    CHECK(slope_one[0] == doctest::Approx(R0 * base_profile().core().B()));
    CHECK(slope_one[1] == doctest::Approx(R0 * base_profile().shape().C));
  }

  TEST_CASE("plateaus of h' rise to R0+eps, then step down through 1 to 0") {
    const auto& p = base_profile();
    const double top = 1.5 + p.shape().eps;
    std::vector<double> plateaus;
    for (const auto& pc : p.pieces()) {
      if (pc.kind == PieceKind::flat) plateaus.push_back(pc.coeffs[0]);
    }
    REQUIRE(plateaus.size() >= 4);
    CHECK(plateaus.front() == 0.0);
    CHECK(plateaus.back() == 0.0);
    CHECK(plateaus[1] == top);
    for (std::size_t i = 2; i < plateaus.size(); ++i) CHECK(plateaus[i] < plateaus[i - 1]);
    // h' = 1 is crossed on the way down at D, between two plateaus.
    const auto below = std::find_if(plateaus.begin() + 1, plateaus.end(), [](double v) { return v < 1.0; });
    REQUIRE(below != plateaus.end());
    CHECK(*(below - 1) > 1.0);
    CHECK(p.dh(p.shape().D) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("JSON round trip is lossless") {
    const auto& p = base_profile();
    const auto q = profile_from_json(profile_to_json(p));
    CHECK(profile_to_json(q) == profile_to_json(p));
    for (double r : log_grid(0.01, 5.0, 300)) CHECK(q.h(r) == p.h(r));
    const auto rq = profile_from_json(profile_to_json(rescaled(p)));
    CHECK(rq.kind() == ProfileKind::rescaled);
    CHECK(rq.h(1.2) == rescaled(p).h(1.2));
    CHECK_THROWS(profile_from_json("{\"version\": 1,"));
  }
}
