#include "reebpinch/contact_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace reebpinch::contact {

Vec apply_J(const Vec& v) {
  Vec out(v.size());
  for (Eigen::Index j = 0; j + 1 < v.size(); j += 2) {
    out[j] = -v[j + 1];
    out[j + 1] = v[j];
  }
  return out;
}

double omega(const Vec& u, const Vec& v) { return apply_J(u).dot(v); }

std::string_view to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::sphere:
      return "sphere";
    case SurfaceKind::ellipsoid:
      return "ellipsoid";
    case SurfaceKind::radial_series:
      return "radial_series";
    case SurfaceKind::custom:
      return "custom";
  }
  return "?";
}

namespace {

void check_dim(int n) {
  if (n < 1 || 2 * n > kMaxAmbientDim) {
    throw ContactError(fmt::format("complex dimension n = {} outside [1, {}]", n,
                                   kMaxAmbientDim / 2));
  }
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

void StarshapedSurface::check_center() {
  if (center_.size() == 0) center_ = Vec::Zero(dim());
  if (center_.size() != dim()) {
    throw ContactError(fmt::format("center has {} coordinates, expected {}",
                                   center_.size(), dim()));
  }
}

StarshapedSurface StarshapedSurface::sphere(int n, double R, Vec center) {
  check_dim(n);
  if (!(R > 0.0)) throw ContactError("sphere radius must be positive");
  StarshapedSurface s;
  s.n_ = n;
  s.kind_ = SurfaceKind::sphere;
  s.R_ = R;
  s.center_ = std::move(center);
  s.check_center();
  return s;
}

StarshapedSurface StarshapedSurface::ellipsoid(std::vector<double> radii, Vec center) {
  const int n = static_cast<int>(radii.size());
  check_dim(n);
  for (double r : radii) {
    if (!(r > 0.0)) throw ContactError("ellipsoid radii must be positive");
  }
  StarshapedSurface s;
  s.n_ = n;
  s.kind_ = SurfaceKind::ellipsoid;
  s.R_ = *std::min_element(radii.begin(), radii.end());
  s.radii_ = std::move(radii);
  s.center_ = std::move(center);
  s.check_center();
  return s;
}

StarshapedSurface StarshapedSurface::radial_series(int n, double R,
                                                   std::vector<SeriesTerm> terms,
                                                   Vec center) {
  check_dim(n);
  if (!(R > 0.0)) throw ContactError("radial_series: R must be positive");
  for (const auto& t : terms) {
    if (static_cast<int>(t.exponents.size()) != 2 * n) {
      throw ContactError(fmt::format(
          "radial_series: term has {} exponents, expected {}", t.exponents.size(), 2 * n));
    }
    for (int e : t.exponents) {
      if (e < 0) throw ContactError("radial_series: exponents must be >= 0");
    }
  }
  StarshapedSurface s;
  s.n_ = n;
  s.kind_ = SurfaceKind::radial_series;
  s.R_ = R;
  s.terms_ = std::move(terms);
  s.center_ = std::move(center);
  s.check_center();
  return s;
}

StarshapedSurface StarshapedSurface::custom(int n, RadialFn rho, Vec center,
                                            std::string label) {
  check_dim(n);
  if (!rho) throw ContactError("custom surface needs a radial function");
  StarshapedSurface s;
  s.n_ = n;
  s.kind_ = SurfaceKind::custom;
  s.custom_ = std::move(rho);
  s.label_ = std::move(label);
  s.center_ = std::move(center);
  s.check_center();
  // Differences are taken in ambient units around the surface.
  Vec e = Vec::Zero(s.dim());
  e[0] = 1.0;
  s.R_ = s.custom_(e);
  s.fd_step_ = 1e-6 * s.R_;
  return s;
}

std::string StarshapedSurface::label() const {
  switch (kind_) {
    case SurfaceKind::sphere:
      return fmt::format("sphere(n={}, R={})", n_, R_);
    case SurfaceKind::ellipsoid:
      return fmt::format("ellipsoid({})", fmt::join(radii_, ", "));
    case SurfaceKind::radial_series:
      return fmt::format("radial_series(n={}, R={}, terms={})", n_, R_, terms_.size());
    case SurfaceKind::custom:
      return label_;
  }
  return "?";
}

double StarshapedSurface::rho(const Vec& theta_in) const {
  const Vec theta = theta_in / theta_in.norm();
  switch (kind_) {
    case SurfaceKind::sphere:
      return R_;
    case SurfaceKind::ellipsoid: {
      double q = 0.0;
      for (int j = 0; j < n_; ++j) {
        q += (theta[2 * j] * theta[2 * j] + theta[2 * j + 1] * theta[2 * j + 1]) /
             (radii_[j] * radii_[j]);
      }
      return 1.0 / std::sqrt(q);
    }
    case SurfaceKind::radial_series: {
      double s = 1.0;
      for (const auto& t : terms_) {
        double m = t.coef;
        for (int i = 0; i < dim(); ++i) m *= ipow(theta[i], t.exponents[i]);
        s += m;
      }
      return R_ * s;
    }
    case SurfaceKind::custom:
      return custom_(theta);
  }
  return R_;
}

Vec StarshapedSurface::rho_gradient(const Vec& theta_in) const {
  const Vec theta = theta_in / theta_in.norm();
  Vec g = Vec::Zero(dim());
  switch (kind_) {
    case SurfaceKind::sphere:
      return g;
    case SurfaceKind::ellipsoid: {
      double q = 0.0;
      for (int j = 0; j < n_; ++j) {
        q += (theta[2 * j] * theta[2 * j] + theta[2 * j + 1] * theta[2 * j + 1]) /
             (radii_[j] * radii_[j]);
      }
      const double f = -1.0 / (q * std::sqrt(q));
      for (int i = 0; i < dim(); ++i) {
        const double r = radii_[i / 2];
        g[i] = f * theta[i] / (r * r);
      }
      return g;
    }
    case SurfaceKind::radial_series: {
      for (const auto& t : terms_) {
        for (int i = 0; i < dim(); ++i) {
          if (t.exponents[i] == 0) continue;
          double m = t.coef * t.exponents[i] * ipow(theta[i], t.exponents[i] - 1);
          for (int k = 0; k < dim() && m != 0.0; ++k) {
            if (k != i) m *= ipow(theta[k], t.exponents[k]);
          }
          g[i] += m;
        }
      }
      return R_ * g;
    }
    case SurfaceKind::custom: {
      // x -> rho(x / |x|) near the point rho(theta) theta, in ambient units.
      const double rad = custom_(theta);
      const Vec y = rad * theta;
      for (int i = 0; i < dim(); ++i) {
        Vec yp = y, ym = y;
        yp[i] += fd_step_;
        ym[i] -= fd_step_;
        g[i] = (custom_(yp / yp.norm()) - custom_(ym / ym.norm())) / (2 * fd_step_);
      }
      // Convert the ambient derivative at radius rad back to the unit sphere.
      return rad * g;
    }
  }
  return g;
}

Vec StarshapedSurface::point_at(const Vec& theta_in) const {
  const Vec theta = theta_in / theta_in.norm();
  return center_ + rho(theta) * theta;
}

Vec StarshapedSurface::project(const Vec& x) const {
  const Vec y = x - center_;
  const double r = y.norm();
  if (!(r > 0.0)) throw ContactError("cannot project the center onto the surface");
  return point_at(y / r);
}

double StarshapedSurface::radial_residual(const Vec& x) const {
  const Vec y = x - center_;
  const double r = y.norm();
  if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(r - rho(y / r));
}

Vec StarshapedSurface::level_gradient(const Vec& x) const {
  const Vec y = x - center_;
  const double r = y.norm();
  if (!(r > 0.0)) throw ContactError("level gradient undefined at the center");
  const Vec theta = y / r;
  Vec gr = rho_gradient(theta);
  gr -= theta.dot(gr) * theta;
  return theta - gr / r;
}

Vec normal_at(const StarshapedSurface& S, const Vec& x) {
  const double res = S.radial_residual(x);
  if (!(res < 1e-9 * std::max(1.0, S.R()))) {
    throw ContactError(fmt::format("normal_at: point is off the surface (radial residual {:.3g})", res));
  }
  const Vec g = S.level_gradient(x);
  return g / g.norm();
}

double contact_alpha(const StarshapedSurface& S, const Vec& x, const Vec& v) {
  return 0.5 * v.dot(apply_J(x - S.center()));
}

Vec reeb_field_unchecked(const StarshapedSurface& S, const Vec& x) {
  Vec nu = S.level_gradient(x);
  nu /= nu.norm();
  const double d = nu.dot(x - S.center());
  if (!(d > 0.0)) {
    throw HypothesisError(fmt::format(
        "<nu, x - x0> = {:.3g} <= 0 at x = ({:.6g})", d, fmt::join(x, ", ")));
  }
  return (2.0 / d) * apply_J(nu);
}

Vec reeb_field(const StarshapedSurface& S, const Vec& x) {
  normal_at(S, x);  // on-surface check
  return reeb_field_unchecked(S, x);
}

FlowResult flow(const StarshapedSurface& S, const Vec& x, double T, double tol,
                std::size_t samples) {
  if (!(T >= 0.0)) throw ContactError("flow: T must be non-negative");
  const int d = S.dim();
  if (x.size() != d) throw ContactError("flow: dimension mismatch");
  Vec y0(d + 1);
  y0.head(d) = S.project(x);
  y0[d] = 0.0;
  auto rhs = [&S, d](double, const Vec& y) {
    Vec out(d + 1);
    const Vec p = y.head(d);
    const Vec R = reeb_field_unchecked(S, p);
    out.head(d) = R;
    out[d] = contact_alpha(S, p, R);
    return out;
  };
  numerics::OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.initial_step = 1e-2 * std::max(T, 1e-3);
  o.max_step = std::max(T / 8.0, 1e-3);
  numerics::DormandPrince<Vec> dp(rhs, 0.0, y0, o);
  dp.set_projection([&S, d](Vec& y) { y.head(d) = S.project(y.head(d)); });

  FlowResult res;
  if (samples > 0) {
    // Step exactly onto each sample time; interpolation would cost accuracy.
    res.samples.reserve(samples);
    res.samples.push_back(y0.head(d));
    for (std::size_t k = 1; k < samples; ++k) {
      dp.advance_to(T * static_cast<double>(k) / static_cast<double>(samples));
      res.samples.push_back(dp.y().head(d));
    }
  }
  dp.advance_to(T);
  res.end = dp.y().head(d);
  res.elapsed = dp.t();
  res.action = dp.y()[d];
  res.radial_residual = S.radial_residual(res.end);
  res.stats = dp.stats();
  return res;
}

double hypothesis_margin(const StarshapedSurface& S, double R1, std::size_t sample_count) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec& th : numerics::sphere_points(S.dim(), sample_count, 0x5eed)) {
    const Vec z = S.point_at(th);
    Vec nu = S.level_gradient(z);
    nu /= nu.norm();
    m = std::min(m, nu.dot(z - S.center()) - R1);
  }
  return m;
}

PinchRadii pinch_radii(const StarshapedSurface& S, std::size_t sample_count) {
  PinchRadii out;
  if (S.kind() == SurfaceKind::sphere) {
    out.R1 = out.R2 = S.R();
  } else if (S.kind() == SurfaceKind::ellipsoid) {
    out.R1 = *std::min_element(S.radii().begin(), S.radii().end());
    out.R2 = *std::max_element(S.radii().begin(), S.radii().end());
  } else {
    const auto pts = numerics::sphere_points(S.dim(), sample_count, 0x9a11);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = S.rho(pts[i]);
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });

    // Projected gradient steps on the sphere with backtracking.
    auto refine = [&](Vec th, double sign) {
      double v = sign * S.rho(th);
      double step = 0.1;
      for (int it = 0; it < 300 && step > 1e-14; ++it) {
        Vec g = S.rho_gradient(th);
        g -= th.dot(g) * th;
        g *= sign;
        if (g.norm() < 1e-13) break;
        Vec cand = th - step * g;
        cand /= cand.norm();
        const double vc = sign * S.rho(cand);
        if (vc < v) {
          th = cand;
          v = vc;
          step *= 1.5;
        } else {
          step *= 0.5;
        }
      }
      return sign * v;
    };
    const std::size_t k = std::min<std::size_t>(4, idx.size());
    out.R1 = vals[idx.front()];
    out.R2 = vals[idx.back()];
    for (std::size_t i = 0; i < k; ++i) {
      out.R1 = std::min(out.R1, refine(pts[idx[i]], 1.0));
      out.R2 = std::max(out.R2, refine(pts[idx[idx.size() - 1 - i]], -1.0));
    }
  }
  out.ratio = out.R2 / out.R1;
  out.ratio_ok = out.ratio < std::sqrt(2.0);
  return out;
}

double orbit_action(const StarshapedSurface& S, const std::vector<Vec>& points,
                    double period) {
  if (points.empty()) return 0.0;
  const auto vel = numerics::periodic_derivative(points, period);
  double sum = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    sum += vel[k].dot(apply_J(points[k] - S.center()));
  }
  return 0.5 * sum * period / static_cast<double>(points.size());
}

}  // namespace reebpinch::contact
