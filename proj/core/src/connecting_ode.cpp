#include "reebpinch/connecting_ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace reebpinch::ode {

using profile::MonotoneHomotopy;

namespace {

double grid_s(long k, int per_unit) {
  return static_cast<double>(k) / static_cast<double>(per_unit);
}

double target_level(const MonotoneHomotopy& H) {
  return H.base().core().R0 * H.base().core().B();
}

}  // namespace

double slope_one_level(const MonotoneHomotopy& H, double s) {
  const double b = H.cutoff().value(s);
  // h'(A) = 1 and l'(R0 B) = 1 hold exactly on the closed forms.
  if (b == 1.0) return H.base().core().A;
  if (b == 0.0) return target_level(H);
  const double lo = H.base().shape().delta_bar;
  const double hi = target_level(H);
  auto g = [&](double r) { return H.dr(s, r) - 1.0; };
  const double glo = g(lo), ghi = g(hi);
  if (!(glo < 0.0 && ghi >= 0.0)) {
    throw OdeError(fmt::format(
        "slope_one_level: h_s' does not cross 1 on [{}, {}] at s = {} "
        "(slope range [{}, {}])",
        lo, hi, s, glo + 1.0, ghi + 1.0));
  }
  return numerics::bisect(g, lo, hi, 1e-12);
}

ConnectingTrajectory integrate_connecting(std::shared_ptr<const MonotoneHomotopy> H,
                                          double s_end, double tol,
                                          IntegrateOptions opts) {
  if (!H) throw std::invalid_argument("integrate_connecting: null homotopy");
  if (!(s_end > 0.0)) throw std::invalid_argument("s_end must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(opts.s_start <= -1.0)) throw std::invalid_argument("s_start must be <= -1");
  if (opts.grid_per_unit < 1) throw std::invalid_argument("grid_per_unit must be >= 1");

  const auto& core = H->base().core();
  const double A = core.A;
  const double logA = std::log(A);
  const double target = target_level(*H);
  const int N = opts.grid_per_unit;

  ConnectingTrajectory tr;
  tr.homotopy = H;
  tr.homotopy_id = H->fingerprint();
  tr.grid_per_unit = N;
  tr.tol = tol;
  tr.k_first = static_cast<long>(std::floor(opts.s_start * N));
  const long k_end = static_cast<long>(std::floor(s_end * N));
  for (long k = tr.k_first; k <= -N; ++k) {
    tr.s.push_back(grid_s(k, N));
    tr.F.push_back(A);
    tr.G.push_back(logA);
  }

  auto rhs = [&H](double s, const double& G) { return 1.0 - H->dr(s, std::exp(G)); };
  numerics::OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.initial_step = std::min(1e-4, opts.max_step);
  o.max_step = opts.max_step;
  o.min_step = 1e-15;
  numerics::DormandPrince<double> dp(rhs, -1.0, logA, o);
  tr.nodes.push_back({-1.0, logA, dp.dy()});

  long next_k = -N + 1;
  dp.set_observer([&](double t0, const double& y0, const double& f0, double t1,
                      const double& y1, const double& f1) {
    tr.nodes.push_back({t1, y1, f1});
    while (next_k <= k_end) {
      const double s = grid_s(next_k, N);
      if (s > t1) break;
      const double G = s == t1 ? y1
                               : numerics::hermite_interpolate(t0, y0, f0, t1, y1,
                                                               f1, s);
      tr.s.push_back(s);
      tr.G.push_back(G);
      tr.F.push_back(std::exp(G));
      ++next_k;
    }
  });
  try {
    dp.advance_to(s_end, [&](double, const double& G) {
      return std::abs(std::exp(G) - target) < tol;
    });
  } catch (const NumericalError& e) {
    throw OdeError(fmt::format("connecting ODE integration failed: {} (last s = {}, F = {})",
                               e.what(), dp.t(), std::exp(dp.y())));
  }
  tr.step_stats = dp.stats();
  tr.s_stop = dp.t();
  tr.converged = std::abs(std::exp(dp.y()) - target) < tol;
  return tr;
}

double ConnectingTrajectory::G_at(double s_query) const {
  if (s_query <= -1.0) return std::log(homotopy->base().core().A);
  if (s_query > s_stop) {
    throw std::out_of_range(
        fmt::format("s = {} beyond the trajectory end {}", s_query, s_stop));
  }
  auto it = std::lower_bound(nodes.begin(), nodes.end(), s_query,
                             [](const Node& n, double v) { return n.s < v; });
  if (it == nodes.begin()) return it->G;
  const Node& b = *it;
  const Node& a = *(it - 1);
  if (b.s == s_query) return b.G;
  return numerics::hermite_interpolate(a.s, a.G, a.dG, b.s, b.G, b.dG, s_query);
}

double ConnectingTrajectory::F_at(double s_query) const {
  if (s_query <= -1.0) return homotopy->base().core().A;
  return std::exp(G_at(s_query));
}

BarrierCurve barrier_curve(const MonotoneHomotopy& H, int grid_per_unit) {
  BarrierCurve bc;
  bc.grid_per_unit = grid_per_unit;
  bc.k_first = -grid_per_unit;
  for (long k = -grid_per_unit; k <= 0; ++k) {
    const double s = grid_s(k, grid_per_unit);
    bc.s.push_back(s);
    bc.rho.push_back(slope_one_level(H, s));
  }
  return bc;
}

double verify_gap(const ConnectingTrajectory& traj, const BarrierCurve& barrier) {
  if (traj.grid_per_unit != barrier.grid_per_unit) {
    throw OdeError("verify_gap: trajectory and barrier use different grids");
  }
  double margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < barrier.s.size(); ++i) {
    const double s = barrier.s[i];
    if (s <= -1.0 || s >= 0.0) continue;
    const long k = barrier.k_first + static_cast<long>(i);
    const long j = k - traj.k_first;
    if (j < 0 || j >= static_cast<long>(traj.s.size()) ||
        traj.s[static_cast<std::size_t>(j)] != s) {
      throw OdeError(fmt::format("verify_gap: grid mismatch at s = {}", s));
    }
    margin = std::min(margin, barrier.rho[i] - traj.F[static_cast<std::size_t>(j)]);
    any = true;
  }
  if (!any) throw OdeError("verify_gap: no interior grid points in (-1, 0)");
  return margin;
}

double ode_residual(const ConnectingTrajectory& traj) {
  static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                  0.5384693101056831, 0.9061798459386640};
  static constexpr double w[5] = {0.2369268850561891, 0.4786286704993665,
                                  0.5688888888888889, 0.4786286704993665,
                                  0.2369268850561891};
  const auto& H = *traj.homotopy;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < traj.nodes.size(); ++i) {
    const auto& a = traj.nodes[i];
    const auto& b = traj.nodes[i + 1];
    const double h = b.s - a.s;
    if (!(h > 0.0)) continue;
    double quad = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double s = a.s + 0.5 * h * (1.0 + x[q]);
      const double G = numerics::hermite_interpolate(a.s, a.G, a.dG, b.s, b.G, b.dG, s);
      quad += w[q] * (1.0 - H.dr(s, std::exp(G)));
    }
    quad *= 0.5 * h;
    worst = std::max(worst, std::abs((b.G - a.G) - quad) / h);
  }
  return worst;
}

DivergenceReport uniqueness_probe(const MonotoneHomotopy& H, double s0, double F0,
                                  double s_back, double growth_factor) {
  const auto& base = H.base();
  const double A = base.core().A;
  if (!(s0 <= -1.0)) throw std::invalid_argument("uniqueness_probe: s0 must be <= -1");
  if (!(s_back < s0)) throw std::invalid_argument("uniqueness_probe: s_back must be < s0");
  if (!(F0 > 0.0 && F0 < base.core().B())) {
    throw std::invalid_argument("uniqueness_probe: F0 must lie in (0, B)");
  }
  DivergenceReport rep;
  rep.F0 = F0;
  rep.growth_factor = growth_factor;
  if (F0 == A) {
    rep.F_back = A;
    rep.ratio = 0.0;
    rep.fixed_point = true;
    return rep;
  }
  auto rhs = [&base](double, const double& G) { return 1.0 - base.dh(std::exp(G)); };
  numerics::OdeOptions o;
  o.rtol = 1e-11;
  o.atol = 1e-12;
  o.max_step = 0.05;
  numerics::DormandPrince<double> dp(rhs, s0, std::log(F0), o);
  try {
    dp.advance_to(s_back);
  } catch (const NumericalError&) {
    rep.blow_up = true;
  }
  rep.F_back = std::exp(dp.y());
  if (!std::isfinite(rep.F_back) || rep.F_back <= 0.0) rep.blow_up = true;
  rep.ratio = std::abs(rep.F_back - A) / std::abs(F0 - A);
  return rep;
}

double zeta2_coefficient(const ConnectingTrajectory& traj, double s) {
  return traj.homotopy->log_hessian(s, traj.F_at(s));
}

AdjointProfile radial_adjoint_profile(const ConnectingTrajectory& traj,
                                      const BarrierCurve& barrier) {
  const double margin = verify_gap(traj, barrier);
  if (!(margin > 0.0)) {
    throw OdeError(fmt::format(
        "radial_adjoint_profile: gap margin {} is not positive", margin));
  }
  const auto& H = *traj.homotopy;
  AdjointProfile out;
  const std::size_t n = traj.s.size();
  out.s = traj.s;
  out.dlog.resize(n);
  out.log_x2.assign(n, 0.0);
  out.x2.resize(n);
  std::size_t i0 = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = traj.s[i];
    double frac = 0.0;
    if (s > -1.0 && s < 0.0) {
      const double F = traj.F[i];
      const double dG = 1.0 - H.dr(s, F);
      if (std::abs(dG) < 1e-14) {
        throw OdeError(fmt::format(
            "radial_adjoint_profile: |G'| = {} below 1e-14 at s = {}", dG, s));
      }
      frac = H.eval(s, F).dsdr / (dG * F);
    }
    out.dlog[i] = -1.0 - frac;
    if (s == 0.0) i0 = i;
  }
  if (i0 == n) throw OdeError("radial_adjoint_profile: trajectory does not contain s = 0");
  for (std::size_t i = i0 + 1; i < n; ++i) {
    out.log_x2[i] = out.log_x2[i - 1] +
                    0.5 * (out.s[i] - out.s[i - 1]) * (out.dlog[i] + out.dlog[i - 1]);
  }
  for (std::size_t i = i0; i-- > 0;) {
    out.log_x2[i] = out.log_x2[i + 1] -
                    0.5 * (out.s[i + 1] - out.s[i]) * (out.dlog[i] + out.dlog[i + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) out.x2[i] = std::exp(out.log_x2[i]);
  return out;
}

std::vector<MinorReport> ellipticity_grid_report(
    const std::vector<std::pair<double, double>>& grid) {
  constexpr double pi = std::numbers::pi;
  std::vector<MinorReport> out;
  out.reserve(grid.size());
  for (const auto& [x, y] : grid) {
    MinorReport m;
    m.x = x;
    m.y = y;
    m.sigma = std::hypot(x, y);
    if (!(m.sigma > 0.0) || !(m.sigma < pi)) {
      m.skipped = true;
      m.note = m.sigma == 0.0 ? "sigma = 0" : "sigma >= pi";
      out.push_back(m);
      continue;
    }
    const double sn = std::sin(m.sigma);
    const double q = sn * sn / (m.sigma * m.sigma);
    m.a11 = x * x * (1.0 + q);
    m.a22 = y * y * (1.0 + q);
    m.a12 = x * y * (q - 4.0 * pi * pi);
    m.minor1 = m.a11;
    m.det = m.a11 * m.a22 - m.a12 * m.a12;
    out.push_back(m);
  }
  return out;
}

std::string trajectory_csv(const ConnectingTrajectory& traj,
                           const BarrierCurve* barrier) {
  std::string out = "s,F,G,rho,margin\n";
  for (std::size_t i = 0; i < traj.s.size(); ++i) {
    const double s = traj.s[i];
    out += fmt::format("{},{},{}", numerics::format_double(s),
                       numerics::format_double(traj.F[i]),
                       numerics::format_double(traj.G[i]));
    bool wrote = false;
    if (barrier && s >= -1.0 && s <= 0.0 &&
        barrier->grid_per_unit == traj.grid_per_unit) {
      const long k = traj.k_first + static_cast<long>(i);
      const long j = k - barrier->k_first;
      if (j >= 0 && j < static_cast<long>(barrier->s.size())) {
        const double rho = barrier->rho[static_cast<std::size_t>(j)];
        out += fmt::format(",{},{}", numerics::format_double(rho),
                           numerics::format_double(rho - traj.F[i]));
        wrote = true;
      }
    }
    if (!wrote) out += ",,";
    out += '\n';
  }
  return out;
}

}  // namespace reebpinch::ode
