#include <cmath>
#include <memory>

#include <doctest.h>

#include "oracles.hpp"
#include "reebpinch/connecting_ode.hpp"

using namespace reebpinch;

namespace {

std::shared_ptr<const profile::MonotoneHomotopy> homotopy() {
  static const auto H = std::make_shared<const profile::MonotoneHomotopy>(
      profile::certify(profile::build_profile(profile::make_core(1.5, 0.5, 0.8))));
  return H;
}

const ode::ConnectingTrajectory& trajectory() {
  static const auto t = ode::integrate_connecting(homotopy(), 50.0, 1e-10);
  return t;
}

}  // namespace

TEST_SUITE("connecting_ode") {
  TEST_CASE("endpoint reaches R0 B") {
    const auto& t = trajectory();
    const double target = 1.5 * oracle::B(1.5, 0.5, 0.8);
    CHECK(t.converged);
    CHECK(std::abs(t.F.back() - target) < 1e-6);
    CHECK(std::abs(target - 1.401184) < 1e-6);
    CHECK(t.s_stop <= 50.0);
  }

  TEST_CASE("frozen piece is exactly A") {
    const auto& t = trajectory();
    std::size_t frozen = 0;
    for (std::size_t k = 0; k < t.s.size() && t.s[k] <= -1.0; ++k) {
      CHECK(t.F[k] == 0.5);
      CHECK(t.G[k] == std::log(0.5));
      ++frozen;
    }
    CHECK(frozen > 1000);
    CHECK(t.F_at(-3.2) == 0.5);
  }

  TEST_CASE("grid is s_k = k / N") {
    const auto& t = trajectory();
    for (std::size_t i = 0; i < t.s.size(); i += 97) {
      CHECK(t.s[i] == static_cast<double>(t.k_first + static_cast<long>(i)) / t.grid_per_unit);
    }
  }

  TEST_CASE("ODE residual is re-evaluated independently") {
    CHECK(ode::ode_residual(trajectory()) <= 10 * 1e-10);
  }

  TEST_CASE("monotone convergence for s >= 0") {
    const auto& t = trajectory();
    const double target = 1.5 * oracle::B(1.5, 0.5, 0.8);
    double prev_F = -1.0, prev_gap = 1e9;
    for (std::size_t k = 0; k < t.s.size(); ++k) {
      if (t.s[k] < 0.0) continue;
      CHECK(t.F[k] >= prev_F - 1e-13);
      const double gap = target - t.F[k];
      CHECK(gap <= prev_gap + 1e-13);
      prev_F = t.F[k];
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-9);
  }

  TEST_CASE("barrier ordering and gap") {
    const auto& t = trajectory();
    const auto b = ode::barrier_curve(*homotopy());
    for (std::size_t k = 1; k < b.rho.size(); ++k) CHECK(b.rho[k] >= b.rho[k - 1] - 1e-14);
    CHECK(ode::verify_gap(t, b) > 0.0);
    const auto coarse = ode::barrier_curve(*homotopy(), 500);
    CHECK_THROWS_AS(ode::verify_gap(t, coarse), ode::OdeError);
  }

  TEST_CASE("slope-one level endpoints") {
    const auto& H = *homotopy();
    CHECK(ode::slope_one_level(H, -1.0) == 0.5);
    CHECK(ode::slope_one_level(H, 0.0) == 1.5 * H.base().core().B());
    const double mid = ode::slope_one_level(H, -0.5);
    CHECK(H.dr(-0.5, mid) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("endpoint actions and the energy budget") {
    const auto& H = *homotopy();
    const double a0 = profile::action_at(H.base(), 0.5);
    const double a1 = profile::action_at(H.target(), 1.5 * H.base().core().B());
    CHECK(a0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a1 == doctest::Approx(0.5 + oracle::window_width(1.5, 0.5, 0.8)).epsilon(1e-10));
    CHECK(a1 - a0 < 1.0);
  }

  TEST_CASE("uniqueness probe diverges for perturbed starts") {
    const auto& H = *homotopy();
    const auto up = ode::uniqueness_probe(H, -5.0, 0.501, -15.0);
    CHECK(up.diverged());
    CHECK(up.ratio >= 10.0);
    CHECK(up.F_back > 0.501);
    const auto down = ode::uniqueness_probe(H, -5.0, 0.499, -15.0);
    CHECK(down.diverged());
    CHECK((down.blow_up || down.F_back < 0.499));
    const auto fixed = ode::uniqueness_probe(H, -5.0, 0.5, -15.0);
    CHECK(fixed.ratio == 0.0);
    CHECK(fixed.fixed_point);
  }

  TEST_CASE("zeta2 coefficient is exactly c when frozen") {
    const auto& t = trajectory();
    for (double s : {-4.5, -2.0, -1.0}) CHECK(ode::zeta2_coefficient(t, s) == 0.8);
  }

  TEST_CASE("radial adjoint decays like exp(-s) on the frozen piece") {
    const auto& t = trajectory();
    const auto adj = ode::radial_adjoint_profile(t, ode::barrier_curve(*homotopy()));
    std::size_t checked = 0;
    for (std::size_t k = 0; k < adj.s.size(); ++k) {
      if (adj.s[k] > -1.0) break;
      CHECK(std::abs(adj.dlog[k] + 1.0) < 1e-9);
      ++checked;
    }
    CHECK(checked > 100);
    for (double x : adj.x2) CHECK(std::isfinite(x));
  }

  TEST_CASE("ellipticity report is finite off the axes") {
    std::vector<std::pair<double, double>> grid;
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 100; ++j) grid.emplace_back(-1.0 + 2.0 * i / 99.0, -1.0 + 2.0 * j / 99.0);
    }
    const auto rep = ode::ellipticity_grid_report(grid);
    REQUIRE(rep.size() == grid.size());
    for (const auto& m : rep) {
      if (m.skipped) continue;
      CHECK(std::isfinite(m.minor1));
      CHECK(std::isfinite(m.det));
    }
  }

  TEST_CASE("ellipticity minors: closed-form values and symmetry") {
    const auto rep = ode::ellipticity_grid_report({{1.0, 0.0}, {0.5, 0.5}, {0.3, 0.7}, {0.7, 0.3}});
    REQUIRE(rep.size() == 4);
    CHECK(rep[0].sigma == doctest::Approx(1.0));
    CHECK(rep[0].minor1 == doctest::Approx(1.0 + std::pow(std::sin(1.0), 2)).epsilon(1e-14));
    CHECK(std::abs(rep[0].minor1 - 1.708073) < 1e-6);
    CHECK(rep[0].det == doctest::Approx(0.0));
    const double sg = rep[1].sigma, q = std::pow(std::sin(sg) / sg, 2);
    const double four_pi2 = 4 * oracle::kPi * oracle::kPi;
    const double det = 0.0625 * ((1 + q) * (1 + q) - (q - four_pi2) * (q - four_pi2));
    CHECK(rep[1].det == doctest::Approx(det).epsilon(1e-12));
    CHECK(rep[1].det < 0.0);
    CHECK(rep[2].det == doctest::Approx(rep[3].det).epsilon(1e-14));
    CHECK(rep[2].a12 == doctest::Approx(rep[3].a12).epsilon(1e-14));
  }

  TEST_CASE("trajectory CSV header") {
    const auto b = ode::barrier_curve(*homotopy());
    const auto csv = ode::trajectory_csv(trajectory(), &b);
    CHECK(csv.rfind("s,F,G,rho,margin\n", 0) == 0);
  }
}
