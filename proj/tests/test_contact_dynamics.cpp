#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "reebpinch/contact_dynamics.hpp"
#include "surfaces.hpp"

using namespace reebpinch;
using namespace reebpinch::contact;

namespace {

Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = g(rng);
  return v / v.norm();
}

Vec random_tangent(std::mt19937_64& rng, const Vec& nu) {
  Vec v = random_unit(rng, static_cast<int>(nu.size()));
  v -= nu.dot(v) * nu;
  return v / v.norm();
}

}  // namespace

TEST_SUITE("contact_dynamics") {
  TEST_CASE("J and omega") {
    Vec v(4);
    v << 1, 2, 3, 4;
    Vec Jv(4);
    Jv << -2, 1, -4, 3;
    CHECK((apply_J(v) - Jv).norm() == 0.0);
    CHECK((apply_J(apply_J(v)) + v).norm() == 0.0);
    Vec u(4);
    u << 0.5, -1, 2, 0;
    CHECK(omega(u, v) == doctest::Approx(-omega(v, u)));
    CHECK(omega(v, v) == 0.0);
  }

  TEST_CASE("ellipsoid Reeb field matches J grad H") {
    const std::vector<double> radii{1.0, 1.2, 0.9};
    const auto E = StarshapedSurface::ellipsoid(radii);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      const Vec x = E.point_at(random_unit(rng, 6));
      const Vec R = reeb_field(E, x);
      CHECK((R - oracle::ellipsoid_reeb(radii, x)).norm() < 1e-12);
    }
  }

  TEST_CASE("contact identities on random surfaces") {
    std::mt19937_64 rng(11);
    for (unsigned s = 0; s < 20; ++s) {
      const auto S = fixtures::random_surface(s);
      for (int i = 0; i < 50; ++i) {
        const Vec x = S.point_at(random_unit(rng, S.dim()));
        const Vec nu = normal_at(S, x);
        const Vec R = reeb_field(S, x);
        CHECK(std::abs(contact_alpha(S, x, R) - 1.0) < 1e-9);
        CHECK(std::abs(R.dot(nu)) < 1e-12);
        for (int k = 0; k < 5; ++k) CHECK(std::abs(omega(R, random_tangent(rng, nu))) < 1e-7);
        CHECK(std::abs(R.norm() * nu.dot(x - S.center()) - 2.0) < 1e-12);
      }
    }
  }

  TEST_CASE("Reeb field refuses points off the surface") {
    const auto S = StarshapedSurface::sphere(2, 1.0);
    Vec x(4);
    x << 1.1, 0, 0, 0;
    CHECK_THROWS_AS(reeb_field(S, x), ContactError);
  }

  TEST_CASE("sphere flow closes at period pi R^2") {
    for (double R : {1.0, 1.3}) {
      const auto S = StarshapedSurface::sphere(2, R);
      std::mt19937_64 rng(3);
      const Vec x = S.point_at(random_unit(rng, 4));
      const auto fr = flow(S, x, oracle::kPi * R * R, 1e-12);
      CHECK((fr.end - x).norm() < 1e-9);
      CHECK(fr.action == doctest::Approx(oracle::kPi * R * R).epsilon(1e-10));
      CHECK(fr.radial_residual < 1e-12);
    }
  }

  TEST_CASE("flow samples give the spectral action") {
    const auto E = StarshapedSurface::ellipsoid({1.0, 1.2});
    Vec y(4);
    y << 0, 0, 1.2, 0;
    const double T = oracle::kPi * 1.44;
    const auto fr = flow(E, y, T, 1e-12, 256);
    REQUIRE(fr.samples.size() == 256);
    CHECK((fr.end - y).norm() < 1e-9);
    CHECK(std::abs(orbit_action(E, fr.samples, T) - T) < 1e-9);
  }

  TEST_CASE("pinch radii and hypothesis margin") {
    const auto E = StarshapedSurface::ellipsoid({1.0, 1.2});
    const auto pr = pinch_radii(E);
    CHECK(pr.R1 == 1.0);
    CHECK(pr.R2 == 1.2);
    CHECK(pr.ratio_ok);
    CHECK(hypothesis_margin(E, pr.R1) >= -1e-9);
    CHECK_FALSE(pinch_radii(StarshapedSurface::ellipsoid({1.0, 1.5})).ratio_ok);
    for (unsigned s = 0; s < 20; s += 5) {
      const auto S = fixtures::random_surface(s);
      const auto p = pinch_radii(S);
      std::mt19937_64 rng(s);
      for (int i = 0; i < 2000; ++i) {
        const double r = S.rho(random_unit(rng, S.dim()));
        CHECK(r >= p.R1 - 1e-12);
        CHECK(r <= p.R2 + 1e-12);
      }
    }
  }

  TEST_CASE("xi basis is orthonormal and in ker alpha0") {
    std::mt19937_64 rng(5);
    for (int d : {4, 6, 8}) {
      const Vec x = random_unit(rng, d);
      const auto E = xi_basis(x);
      REQUIRE(static_cast<int>(E.size()) == d - 2);
      for (std::size_t i = 0; i < E.size(); ++i) {
        CHECK(std::abs(E[i].dot(x)) < 1e-14);
        CHECK(std::abs(alpha0(x, E[i])) < 1e-14);
        for (std::size_t j = 0; j < E.size(); ++j) {
          CHECK(std::abs(E[i].dot(E[j]) - (i == j ? 1.0 : 0.0)) < 1e-13);
        }
      }
      CHECK(alpha0(x, reeb0(x)) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("f-pinching of the induced graph function") {
    const auto E = StarshapedSurface::ellipsoid({1.0, 1.2});
    const auto enc = radial_to_graph(E);
    CHECK(enc.scale == doctest::Approx(oracle::kPi));
    CHECK(enc.max_f == doctest::Approx(1.44));
    CHECK(enc.pinching_ok);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 10000; ++i) {
      const double f = enc.f.value(random_unit(rng, 4));
      CHECK(f >= 1.0 - 1e-12);
      CHECK(f <= enc.max_f + 1e-12);
    }
  }

  TEST_CASE("contraction identity fixes the radial sign") {
    const auto p = profile::build_profile(profile::make_core(1.5, 0.5, 0.8));
    // Generic f so that df(R) does not vanish.
    const auto f = GraphFunction::custom(2, [](const Vec& t) {
      return 1.2 + 0.1 * t[0] * t[2] + 0.05 * t[1] + 0.07 * t[0] * t[3];
    });
    std::mt19937_64 rng(13);
    double worst_plus = 0.0, best_minus = 1e9;
    for (int i = 0; i < 50; ++i) {
      const Vec x = random_unit(rng, 4);
      const double r = 0.6 + 0.4 * i / 50.0;
      const auto Xp = graph_hamiltonian_field(p, f, x, r, +1);
      const auto Xm = graph_hamiltonian_field(p, f, x, r, -1);
      worst_plus = std::max(worst_plus, contraction_residual(p, f, x, r, Xp));
      best_minus = std::min(best_minus, contraction_residual(p, f, x, r, Xm));
    }
    CHECK(worst_plus < 1e-8);
    CHECK(best_minus > 1e-6);
    CHECK(kRadialSign == +1);
  }

  TEST_CASE("correspondence on the ellipsoid-induced graph") {
    const auto p = profile::build_profile(profile::make_core(1.5, 0.5, 0.8));
    const auto enc = radial_to_graph(StarshapedSurface::ellipsoid({1.0, 1.2}));
    // Circle z_1 = 0 has f = 1.44; pick c with h'(c) = 1.44 on the log core.
    const double c = 0.5 * std::exp(0.44 / 0.8);
    Vec z(4);
    z << 0, 0, 1, 0;
    const auto g = graph_hamiltonian_flow(p, enc.f, z, c * enc.f.value(z), 1.0);
    const auto cr = orbit_correspondence(p, enc.f, g);
    CHECK(cr.residual < 1e-6);
    CHECK(std::abs(cr.period - oracle::dk(0.5, 0.8, c)) < 1e-8);
    const double expected = c * oracle::dk(0.5, 0.8, c) - oracle::k(0.5, 0.8, c);
    CHECK(std::abs(hamiltonian_action(p, enc.f, g) - expected) < 1e-8);

    auto broken = g;
    broken.r[3] *= 1.01;
    CHECK_THROWS_AS(orbit_correspondence(p, enc.f, broken), ContactError);
  }

  TEST_CASE("surface JSON round trip") {
    for (unsigned s : {0u, 3u}) {
      const auto S = fixtures::random_surface(s);
      const auto T = surface_from_json(surface_to_json(S));
      CHECK(surface_to_json(T) == surface_to_json(S));
      std::mt19937_64 rng(s);
      const Vec th = random_unit(rng, S.dim());
      CHECK(T.rho(th) == S.rho(th));
    }
    CHECK_THROWS(surface_from_json("{\"n\": 2, \"kind\": \"ellipsoid\"}"));
  }
}
