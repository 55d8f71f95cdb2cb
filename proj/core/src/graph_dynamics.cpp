#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "reebpinch/contact_dynamics.hpp"

namespace reebpinch::contact {

namespace {
constexpr double kPi = std::numbers::pi;

Vec unit(const Vec& x) {
  const double n = x.norm();
  if (!(n > 0.0)) throw ContactError("point must be nonzero");
  return x / n;
}
}  // namespace

double alpha0(const Vec& x, const Vec& v) { return v.dot(apply_J(x)) / (2 * kPi); }

double d_alpha0(const Vec& u, const Vec& v) { return apply_J(u).dot(v) / kPi; }

Vec reeb0(const Vec& x) { return 2 * kPi * apply_J(x); }

std::vector<Vec> xi_basis(const Vec& x_in) {
  const Vec x = unit(x_in);
  const Eigen::Index d = x.size();
  std::vector<Vec> basis{x, apply_J(x)};
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  std::vector<Vec> out;
  while (static_cast<Eigen::Index>(out.size()) < d - 2) {
    // Pivoted Gram-Schmidt: take the coordinate vector with the largest
    // component outside the current span (lowest index on ties).
    Eigen::Index best = -1;
    double best_norm = -1.0;
    Vec best_vec;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      Vec e = Vec::Zero(d);
      e[i] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) e -= b.dot(e) * b;
      }
      const double nrm = e.norm();
      if (nrm > best_norm + 1e-12) {
        best_norm = nrm;
        best = i;
        best_vec = e / nrm;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    basis.push_back(best_vec);
    out.push_back(best_vec);
  }
  return out;
}

GraphFunction GraphFunction::constant(int n, double value) {
  GraphFunction g;
  g.n_ = n;
  g.f_ = [value](const Vec&) { return value; };
  g.grad_ = [n](const Vec&) { return Vec(Vec::Zero(2 * n)); };
  return g;
}

GraphFunction GraphFunction::custom(int n, ValueFn f, GradFn grad) {
  if (!f) throw ContactError("graph function needs a value function");
  GraphFunction g;
  g.n_ = n;
  g.f_ = std::move(f);
  g.grad_ = std::move(grad);
  return g;
}

double GraphFunction::value(const Vec& x) const { return f_(unit(x)); }

Vec GraphFunction::gradient(const Vec& x) const {
  const Vec th = unit(x);
  Vec g;
  if (grad_) {
    g = grad_(th);
  } else {
    constexpr double h = 1e-6;
    g = Vec::Zero(th.size());
    for (Eigen::Index i = 0; i < th.size(); ++i) {
      Vec p = th, m = th;
      p[i] += h;
      m[i] -= h;
      g[i] = (f_(unit(p)) - f_(unit(m))) / (2 * h);
    }
  }
  g -= th.dot(g) * th;
  return g;
}

GraphEncoding radial_to_graph(const StarshapedSurface& S, std::size_t sample_count) {
  if (S.center().norm() != 0.0) {
    throw ContactError("radial_to_graph: surface must be centered at the origin; recenter first");
  }
  const auto pr = pinch_radii(S, sample_count);
  const double R1sq = pr.R1 * pr.R1;
  auto surf = std::make_shared<const StarshapedSurface>(S);
  GraphEncoding enc{GraphFunction::custom(
                        S.n(),
                        [surf, R1sq](const Vec& th) {
                          const double r = surf->rho(th);
                          return r * r / R1sq;
                        },
                        [surf, R1sq](const Vec& th) {
                          return Vec(2.0 * surf->rho(th) * surf->rho_gradient(th) / R1sq);
                        }),
                    kPi * R1sq, pr.R1, (pr.R2 / pr.R1) * (pr.R2 / pr.R1), false};
  enc.pinching_ok = enc.max_f < 2.0;
  return enc;
}

Vec v_f_field(const GraphFunction& f, const Vec& x_in) {
  const Vec x = unit(x_in);
  const auto E = xi_basis(x);
  const auto m = static_cast<Eigen::Index>(E.size());
  if (m == 0) return Vec::Zero(x.size());
  const Vec grad = f.gradient(x);
  const double dfR = grad.dot(reeb0(x));
  Eigen::MatrixXd M(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    rhs[i] = dfR * alpha0(x, E[i]) - grad.dot(E[i]);
    for (Eigen::Index k = 0; k < m; ++k) M(i, k) = d_alpha0(E[k], E[i]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.rank() < m) throw ContactError("v_f_field: d alpha0 is singular on xi");
  const Eigen::VectorXd v = lu.solve(rhs);
  Vec V = Vec::Zero(x.size());
  for (Eigen::Index k = 0; k < m; ++k) V += v[k] * E[k];
  return V;
}

SymplVec graph_hamiltonian_field(const profile::RadialProfile& p, const GraphFunction& f,
                                 const Vec& x_in, double r, int radial_sign) {
  if (!(r > 0.0)) throw std::domain_error("graph_hamiltonian_field: r must be positive");
  const Vec x = unit(x_in);
  const double fx = f.value(x);
  const double k = p.dh(r / fx) / (fx * fx);
  const Vec R = reeb0(x);
  const Vec V = v_f_field(f, x);
  return {k * (fx * R - V), k * radial_sign * r * f.df(x, R)};
}

double contraction_residual(const profile::RadialProfile& p, const GraphFunction& f,
                            const Vec& x_in, double r, const SymplVec& X) {
  const Vec x = unit(x_in);
  const double fx = f.value(x);
  const double hp = p.dh(r / fx);
  const Vec grad = f.gradient(x);
  auto pairing = [&](const SymplVec& Y) {
    const double lhs = X.r * alpha0(x, Y.x) - alpha0(x, X.x) * Y.r + r * d_alpha0(X.x, Y.x);
    const double dh = hp * (Y.r / fx - r * grad.dot(Y.x) / (fx * fx));
    return std::abs(lhs + dh);
  };
  double worst = pairing({Vec::Zero(x.size()), 1.0});
  worst = std::max(worst, pairing({reeb0(x), 0.0}));
  for (const Vec& e : xi_basis(x)) worst = std::max(worst, pairing({e, 0.0}));
  return worst;
}

SymplVec reeb_on_graph(const GraphFunction& f, const Vec& x_in) {
  const Vec x = unit(x_in);
  const double fx = f.value(x);
  const Vec U = reeb0(x) / fx - v_f_field(f, x) / (fx * fx);
  return {U, f.df(x, U)};
}

HamiltonianOrbit graph_hamiltonian_flow(const profile::RadialProfile& p,
                                        const GraphFunction& f, const Vec& x, double r,
                                        double T, std::size_t samples, double tol) {
  if (samples == 0) throw ContactError("graph_hamiltonian_flow: need at least one sample");
  const auto d = x.size();
  Vec y0(d + 1);
  y0.head(d) = unit(x);
  y0[d] = r;
  auto rhs = [&](double, const Vec& y) {
    const auto X = graph_hamiltonian_field(p, f, y.head(d), y[d]);
    Vec out(d + 1);
    out.head(d) = X.x;
    out[d] = X.r;
    return out;
  };
  numerics::OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.initial_step = 1e-3 * T;
  o.max_step = T / 16.0;
  numerics::DormandPrince<Vec> dp(rhs, 0.0, y0, o);
  dp.set_projection([d](Vec& y) { y.head(d) /= y.head(d).norm(); });
  HamiltonianOrbit out;
  out.period = T;
  out.x.push_back(y0.head(d));
  out.r.push_back(r);
  std::size_t next = 1;
  dp.set_observer([&](double t0, const Vec& a, const Vec& fa, double t1, const Vec& b,
                      const Vec& fb) {
    while (next < samples) {
      const double t = T * static_cast<double>(next) / static_cast<double>(samples);
      if (t > t1) break;
      const double h = t1 - t0, s = (t - t0) / h, s2 = s * s, s3 = s2 * s;
      const Vec y = (2 * s3 - 3 * s2 + 1) * a + ((s3 - 2 * s2 + s) * h) * fa +
                    (-2 * s3 + 3 * s2) * b + ((s3 - s2) * h) * fb;
      out.x.push_back(y.head(d) / y.head(d).norm());
      out.r.push_back(y[d]);
      ++next;
    }
  });
  dp.advance_to(T);
  out.closure = (dp.y().head(d) - y0.head(d)).norm() + std::abs(dp.y()[d] - r);
  return out;
}

Correspondence orbit_correspondence(const profile::RadialProfile& p,
                                    const GraphFunction& f, const HamiltonianOrbit& gamma,
                                    double spread_tol) {
  const std::size_t N = gamma.x.size();
  if (N < 3 || gamma.r.size() != N) {
    throw ContactError("orbit_correspondence: need at least 3 matching samples");
  }
  if (!(gamma.closure < 1e-6)) {
    throw ContactError(fmt::format(
        "orbit_correspondence: orbit does not close (residual {:.3g})", gamma.closure));
  }
  Correspondence out;
  std::vector<double> ratio(N);
  for (std::size_t k = 0; k < N; ++k) ratio[k] = gamma.r[k] / f.value(gamma.x[k]);
  double sum = 0.0;
  for (double v : ratio) sum += v;
  out.c = sum / static_cast<double>(N);
  for (double v : ratio) out.spread = std::max(out.spread, std::abs(v - out.c));
  if (out.spread > spread_tol * std::max(1.0, out.c)) {
    throw ContactError(fmt::format(
        "orbit_correspondence: r/f is not constant along the orbit (spread {:.3g})",
        out.spread));
  }
  const double hp = p.dh(out.c);
  if (!(hp > 0.0)) throw ContactError("orbit_correspondence: h'(c) = 0, no Reeb orbit");
  out.period = gamma.period * hp;
  const auto vel = numerics::periodic_derivative(gamma.x, out.period);
  for (std::size_t k = 0; k < N; ++k) {
    const SymplVec U = reeb_on_graph(f, gamma.x[k]);
    out.residual = std::max(out.residual, (vel[k] - U.x).norm());
  }
  out.zeta.points = gamma.x;
  out.zeta.period = out.period;
  out.zeta.action = out.period;
  out.zeta.closure_residual = gamma.closure;
  return out;
}

double hamiltonian_action(const profile::RadialProfile& p, const GraphFunction& f,
                          const HamiltonianOrbit& gamma) {
  const std::size_t N = gamma.x.size();
  if (N == 0 || gamma.r.size() != N) throw ContactError("hamiltonian_action: empty orbit");
  const auto vel = numerics::periodic_derivative(gamma.x, gamma.period);
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    sum += gamma.r[k] * alpha0(gamma.x[k], vel[k]) -
           p.h(gamma.r[k] / f.value(gamma.x[k]));
  }
  return sum * gamma.period / static_cast<double>(N);
}

}  // namespace reebpinch::contact
