#include "reebpinch/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "reebpinch/numerics.hpp"

namespace reebpinch::profile {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite_all(double a, double b, double c) {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

// Polynomial in t with coefficients a[0..3].
double poly(const std::array<double, 4>& a, double t) {
  return a[0] + t * (a[1] + t * (a[2] + t * a[3]));
}
double poly_d1(const std::array<double, 4>& a, double t) {
  return a[1] + t * (2 * a[2] + t * 3 * a[3]);
}
// Q = p - p' + p'' - p''', so that d/du [e^u Q(u - u0)] = e^u p(u - u0).
double poly_antiderivative_factor(const std::array<double, 4>& a, double t) {
  const double p = poly(a, t);
  const double p1 = poly_d1(a, t);
  const double p2 = 2 * a[2] + 6 * a[3] * t;
  const double p3 = 6 * a[3];
  return p - p1 + p2 - p3;
}

// Cubic Hermite in t on [0, L] with values s0, s1 and t-derivatives d0, d1.
std::array<double, 4> hermite_coeffs(double s0, double s1, double d0,
                                     double d1, double L) {
  const double m = (s1 - s0) / L;
  return {s0, d0, (3 * m - 2 * d0 - d1) / L, (d0 + d1 - 2 * m) / (L * L)};
}

// min and max of p'(t) over [0, L].
std::pair<double, double> derivative_range(const std::array<double, 4>& a,
                                           double L) {
  double lo = std::min(poly_d1(a, 0.0), poly_d1(a, L));
  double hi = std::max(poly_d1(a, 0.0), poly_d1(a, L));
  if (a[3] != 0.0) {
    const double ts = -a[2] / (3 * a[3]);
    if (ts > 0.0 && ts < L) {
      const double v = poly_d1(a, ts);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

// Piece integral from r_lo to r (r inside the piece) of h'.
double piece_integral(const Piece& pc, double r) {
  switch (pc.kind) {
    case PieceKind::flat:
      return pc.coeffs[0] * (r - pc.r_lo);
    case PieceKind::log_core: {
      CoreParams core{1.5, pc.coeffs[0], pc.coeffs[1]};
      return log_core_eval(core, r).k - log_core_eval(core, pc.r_lo).k;
    }
    case PieceKind::hermite: {
      const double t = std::log(r / pc.r_lo);
      return r * poly_antiderivative_factor(pc.coeffs, t) -
             pc.r_lo * poly_antiderivative_factor(pc.coeffs, 0.0);
    }
  }
  return 0.0;
}

}  // namespace

double CoreParams::B() const { return A * std::exp((R0 - 1.0) / c); }
double CoreParams::window_width() const { return c * (B() - A); }

ValidationReport validate_core(double R0, double A, double c) {
  ValidationReport rep;
  if (!finite_all(R0, A, c)) {
    rep.diagnostic = "non-finite input: R0, A and c must be finite numbers";
    return rep;
  }
  auto add = [&](std::string name, double slack) {
    rep.checks.push_back({std::move(name), slack, slack > 0.0});
  };
  add("1 < R0 < 2", std::min(R0 - 1.0, 2.0 - R0));
  add("0 < A < 1", std::min(A, 1.0 - A));
  add("0 < c < 1", std::min(c, 1.0 - c));
  const double bound = (R0 - 1.0) / (1.0 - std::log(R0));
  add("c < (R0-1)/(1-log R0)", bound - c);
  double width = kInf;
  if (c > 0.0) {
    width = A * c * std::expm1((R0 - 1.0) / c);
  }
  add("A c (exp((R0-1)/c) - 1) < 1", 1.0 - width);
  if (c > 0.0) {
    add("A < B", A * std::expm1((R0 - 1.0) / c));
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const ConstraintCheck& ck) { return ck.ok; });
  for (const auto& ck : rep.checks) {
    if (!ck.ok) {
      rep.diagnostic = fmt::format("constraint violated: {} (slack {:.6g})",
                                   ck.name, ck.slack);
      break;
    }
  }
  if (rep.pass) {
    rep.B = A * std::exp((R0 - 1.0) / c);
    rep.window_width = c * (*rep.B - A);
  }
  return rep;
}

CoreParams make_core(double R0, double A, double c) {
  auto rep = validate_core(R0, A, c);
  if (!rep.pass) throw ProfileError(rep.diagnostic);
  return CoreParams{R0, A, c};
}

LogCoreValue log_core_eval(const CoreParams& core, double r) {
  if (!(r > 0.0)) {
    throw std::domain_error("log_core_eval: r must be positive");
  }
  // Algebraically equal to c r log r - c r + r(1 - c log A) + A c - A, but
  // exact zero at r = A.
  const double lr = std::log(r / core.A);
  return {core.c * r * lr + (r - core.A) * (1.0 - core.c), 1.0 + core.c * lr,
          core.c / r};
}

double forbidden_distance(const CoreParams& core, double v) {
  const double w = core.window_width();
  double x = v - core.A;
  x -= std::floor(x);
  if (x >= 1.0) x = 0.0;
  if (x < w) return -std::min(x, w - x);
  return std::min(x - w, 1.0 - x);
}

bool in_forbidden_set(const CoreParams& core, double v) {
  const double w = core.window_width();
  double x = v - core.A;
  x -= std::floor(x);
  if (x >= 1.0 - kForbiddenGuard) x = 0.0;  // just below an integer shift of A
  return x < w - kForbiddenGuard;
}

std::string_view to_string(PieceKind kind) {
  switch (kind) {
    case PieceKind::flat:
      return "flat";
    case PieceKind::log_core:
      return "log_core";
    case PieceKind::hermite:
      return "hermite";
  }
  return "?";
}

PieceKind piece_kind_from_string(std::string_view s) {
  if (s == "flat") return PieceKind::flat;
  if (s == "log_core") return PieceKind::log_core;
  if (s == "hermite") return PieceKind::hermite;
  throw ProfileError(fmt::format("unknown piece kind '{}'", s));
}

// ---------------------------------------------------------------------------
// RadialProfile

RadialProfile RadialProfile::from_pieces(CoreParams core, ShapeParams shape,
                                         std::vector<Piece> pieces,
                                         std::optional<std::vector<double>> anchors) {
  if (pieces.empty()) throw ProfileError("profile has no pieces");
  if (pieces.front().r_lo != 0.0) {
    throw ProfileError("first piece must start at r = 0");
  }
  if (!std::isinf(pieces.back().r_hi)) {
    throw ProfileError("last piece must be unbounded");
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].r_hi > pieces[i].r_lo)) {
      throw ProfileError(fmt::format("piece {} has empty range", i));
    }
    if (i + 1 < pieces.size() && pieces[i].r_hi != pieces[i + 1].r_lo) {
      throw ProfileError(fmt::format("pieces {} and {} do not meet", i, i + 1));
    }
    if (pieces[i].kind == PieceKind::hermite && pieces[i].r_lo <= 0.0) {
      throw ProfileError("hermite piece cannot start at r = 0");
    }
  }
  RadialProfile p;
  p.core_ = core;
  p.shape_ = shape;
  p.pieces_ = std::move(pieces);
  if (anchors) {
    if (anchors->size() != p.pieces_.size()) {
      throw ProfileError("anchor count does not match piece count");
    }
    p.h_lo_ = std::move(*anchors);
    return p;
  }

  const std::size_t n = p.pieces_.size();
  p.h_lo_.assign(n, 0.0);
  const std::size_t ia = p.locate(core.A);
  const Piece& pa = p.pieces_[ia];
  p.h_lo_[ia] = pa.kind == PieceKind::log_core
                    ? log_core_eval(core, pa.r_lo).k
                    : -piece_integral(pa, core.A);
  for (std::size_t i = ia + 1; i < n; ++i) {
    p.h_lo_[i] = p.h_lo_[i - 1] +
                 piece_integral(p.pieces_[i - 1], p.pieces_[i - 1].r_hi);
  }
  for (std::size_t i = ia; i-- > 0;) {
    p.h_lo_[i] = p.h_lo_[i + 1] - piece_integral(p.pieces_[i], p.pieces_[i].r_hi);
  }
  return p;
}

std::size_t RadialProfile::locate(double base_r) const {
  // Pieces are few (about a dozen); linear scan from the right is fine.
  for (std::size_t i = pieces_.size(); i-- > 0;) {
    if (base_r >= pieces_[i].r_lo) return i;
  }
  return 0;
}

ProfileValue RadialProfile::eval_base(double r) const {
  const std::size_t i = locate(r);
  const Piece& pc = pieces_[i];
  switch (pc.kind) {
    case PieceKind::flat:
      return {h_lo_[i] + (pc.coeffs[0] == 0.0 ? 0.0 : pc.coeffs[0] * (r - pc.r_lo)),
              pc.coeffs[0], 0.0};
    case PieceKind::log_core: {
      const CoreParams core{core_.R0, pc.coeffs[0], pc.coeffs[1]};
      const auto v = log_core_eval(core, r);
      return {v.k, v.dk, v.ddk};
    }
    case PieceKind::hermite: {
      const double t = std::log(r / pc.r_lo);
      const double h = h_lo_[i] + r * poly_antiderivative_factor(pc.coeffs, t) -
                       pc.r_lo * poly_antiderivative_factor(pc.coeffs, 0.0);
      return {h, poly(pc.coeffs, t), poly_d1(pc.coeffs, t) / r};
    }
  }
  return {0, 0, 0};
}

double RadialProfile::log_hessian_base(double r) const {
  const Piece& pc = pieces_[locate(r)];
  switch (pc.kind) {
    case PieceKind::flat:
      return 0.0;
    case PieceKind::log_core:
      return pc.coeffs[1];
    case PieceKind::hermite:
      return poly_d1(pc.coeffs, std::log(r / pc.r_lo));
  }
  return 0.0;
}

ProfileValue RadialProfile::eval(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("profile evaluated at r < 0");
  if (scale_ == 1.0) return eval_base(r);
  const auto v = eval_base(r / scale_);
  return {v.h, v.dh / scale_, v.ddh / (scale_ * scale_)};
}

double RadialProfile::h(double r) const { return eval(r).h; }
double RadialProfile::dh(double r) const { return eval(r).dh; }
double RadialProfile::ddh(double r) const { return eval(r).ddh; }

double RadialProfile::log_hessian(double r) const {
  if (!(r > 0.0)) throw std::domain_error("log_hessian requires r > 0");
  if (scale_ == 1.0) return log_hessian_base(r);
  // r l''(r) = (r/R0) h''(r/R0) / R0.
  return log_hessian_base(r / scale_) / scale_;
}

std::vector<double> RadialProfile::knots() const {
  std::vector<double> k;
  for (const auto& pc : pieces_) k.push_back(pc.r_lo * scale_);
  return k;
}

RadialProfile RadialProfile::rescaled_copy() const {
  RadialProfile p = *this;
  p.kind_ = ProfileKind::rescaled;
  p.scale_ = core_.R0;
  return p;
}

ShapeOptions default_shape_options(const CoreParams& core) {
  ShapeOptions o;
  o.eps = std::min({0.1, (2.0 - core.R0) / 2.0, (core.R0 - 1.0) / 2.0});
  o.delta = core.A / 10.0;
  o.delta_bar = core.A / 10.0;
  return o;
}

// ---------------------------------------------------------------------------
// Builder

namespace {

struct Ramp {
  std::array<double, 4> coeffs;
  double L;
};

// Stretch a Hermite transition until |p'| <= limit and p' keeps one sign.
Ramp stretched_ramp(double s0, double s1, double d0, double d1, double limit,
                    const char* what) {
  const double delta = std::abs(s1 - s0);
  double L = std::max(1.5 * delta / limit, 1e-3);
  for (int it = 0; it < 400; ++it) {
    auto a = hermite_coeffs(s0, s1, d0, d1, L);
    auto [lo, hi] = derivative_range(a, L);
    const bool rising = s1 >= s0;
    const bool monotone = rising ? lo >= -1e-15 : hi <= 1e-15;
    if (monotone && std::max(std::abs(lo), std::abs(hi)) <= limit * (1 + 1e-12)) {
      return {a, L};
    }
    L *= 1.1;
  }
  throw ProfileError(fmt::format(
      "cannot stretch the {} transition to satisfy |r h''(r)| < 1", what));
}

struct Layout {
  std::vector<Piece> pieces;
  double C = 0, D = 0, r_flat = 0;
};

struct BuildPlan {
  CoreParams core;
  double eps, delta, db;
  Ramp ramp_in;      // [db, A - db]
  Ramp ramp_top;     // [B + delta, .] up to R0 + eps
  Ramp drop_C;       // R0 + eps -> R0 - eps
  Ramp drop_D;       // R0 - eps -> 1 - eps
  Ramp drop_out;     // 1 - eps -> 0
  double tD;         // offset of D inside drop_D
};

Layout assemble(const BuildPlan& bp, double L1, double L2, double L3) {
  const auto& core = bp.core;
  const double A = core.A, B = core.B(), R0 = core.R0;
  Layout out;
  auto& ps = out.pieces;
  ps.push_back({PieceKind::flat, 0.0, bp.db, {0, 0, 0, 0}});
  ps.push_back({PieceKind::hermite, bp.db, A - bp.db, bp.ramp_in.coeffs});
  ps.push_back({PieceKind::log_core, A - bp.db, B + bp.delta, {A, core.c, 0, 0}});
  double r = B + bp.delta;
  auto push_ramp = [&](const Ramp& rp) {
    const double r1 = r * std::exp(rp.L);
    ps.push_back({PieceKind::hermite, r, r1, rp.coeffs});
    r = r1;
  };
  auto push_flat = [&](double slope, double r1) {
    ps.push_back({PieceKind::flat, r, r1, {slope, 0, 0, 0}});
    r = r1;
  };
  push_ramp(bp.ramp_top);
  push_flat(R0 + bp.eps, std::max(r, R0 * B) * std::exp(L1));
  const double c_start = r;
  push_ramp(bp.drop_C);
  out.C = c_start * std::exp(0.5 * bp.drop_C.L);
  push_flat(R0 - bp.eps, r * std::exp(L2));
  out.D = r * std::exp(bp.tD);
  push_ramp(bp.drop_D);
  push_flat(1.0 - bp.eps, r * std::exp(L3));
  push_ramp(bp.drop_out);
  out.r_flat = r;
  ps.push_back({PieceKind::flat, r, kInf, {0, 0, 0, 0}});
  return out;
}

// Smallest x >= x_min where the monotone function g(x) hits `target`.
double solve_monotone(const std::function<double(double)>& g, double x_min,
                      double target, bool decreasing) {
  auto beyond = [&](double v) { return decreasing ? v <= target : v >= target; };
  double lo = x_min, hi = x_min + 0.5;
  int guard = 0;
  while (!beyond(g(hi))) {
    lo = hi;
    hi = x_min + 2 * (hi - x_min);
    if (++guard > 60) throw ProfileError("plateau length search diverged");
  }
  return numerics::bisect([&](double x) { return g(x) - target; }, lo, hi,
                          1e-15);
}

}  // namespace

RadialProfile build_profile(const CoreParams& core, ShapeOptions opts) {
  const auto vr = validate_core(core.R0, core.A, core.c);
  if (!vr.pass) throw ProfileError(vr.diagnostic);
  const auto def = default_shape_options(core);
  BuildPlan bp;
  bp.core = core;
  bp.eps = opts.eps > 0 ? opts.eps : def.eps;
  bp.delta = opts.delta > 0 ? opts.delta : def.delta;
  bp.db = opts.delta_bar > 0 ? opts.delta_bar : def.delta_bar;
  const double A = core.A, B = core.B(), R0 = core.R0, c = core.c;
  const double eps = bp.eps;

  if (!(R0 + eps < 2.0)) {
    throw ProfileError("bullet 'max h' = R0+eps < 2' violated: R0 + eps >= 2");
  }
  if (!(R0 - eps > 1.0)) {
    throw ProfileError(
        "bullet 'h'(r) = 1 iff r in {A, D}' violated: R0 - eps must exceed 1");
  }
  if (!(A - bp.db > bp.db)) {
    throw ProfileError("delta_bar too large: need delta_bar < A - delta_bar");
  }
  const double slope_in = log_core_eval(core, A - bp.db).dk;
  if (!(slope_in > 0.0)) {
    throw ProfileError(
        "bullet 'h'(r) = 0 iff r in [0, delta_bar]' violated: k'(A - delta_bar) "
        "<= 0");
  }
  const double slope_top = log_core_eval(core, B + bp.delta).dk;
  if (!(slope_top < R0 + eps)) {
    throw ProfileError(
        "bullet 'max h' = R0+eps' violated: k'(B + delta) >= R0 + eps; shrink "
        "delta");
  }

  // Fixed-length ramp on [delta_bar, A - delta_bar].
  {
    const double L = std::log((A - bp.db) / bp.db);
    auto a = hermite_coeffs(0.0, slope_in, 0.0, c, L);
    auto [lo, hi] = derivative_range(a, L);
    if (lo < -1e-15) {
      throw ProfileError(
          "bullet 'h''(r) >= 0 for r <= R0 B' violated on the inner ramp; "
          "decrease delta_bar");
    }
    if (!(hi < 1.0)) {
      throw ProfileError(
          "bullet '|r h''(r)| < 1' violated on the inner ramp; decrease "
          "delta_bar");
    }
    bp.ramp_in = {a, L};
  }
  bp.ramp_top = stretched_ramp(slope_top, R0 + eps, c, 0.0, c, "top");
  bp.drop_C = stretched_ramp(R0 + eps, R0 - eps, 0.0, 0.0, c, "R0+eps -> R0-eps");
  bp.drop_D = stretched_ramp(R0 - eps, 1.0 - eps, 0.0, 0.0, c, "R0-eps -> 1-eps");
  bp.drop_out = stretched_ramp(1.0 - eps, 0.0, 0.0, 0.0, c, "1-eps -> 0");
  bp.tD = numerics::bisect(
      [&](double t) { return poly(bp.drop_D.coeffs, t) - 1.0; }, 0.0,
      bp.drop_D.L, 1e-16);

  ShapeParams shape;
  shape.eps = eps;
  shape.delta = bp.delta;
  shape.delta_bar = bp.db;

  auto make = [&](double L1, double L2, double L3) {
    Layout lay = assemble(bp, L1, L2, L3);
    ShapeParams s = shape;
    s.C = lay.C;
    s.D = lay.D;
    s.r_flat = lay.r_flat;
    auto p = RadialProfile::from_pieces(core, s, lay.pieces);
    return p;
  };

  const double w = core.window_width();
  const double mid = A + 0.5 * (1.0 + w);  // centre of the allowed arc mod 1
  constexpr double kMinPlateau = 0.05;

  auto action_C = [&](double L1) {
    auto p = make(L1, kMinPlateau, kMinPlateau);
    const double C = p.shape().C;
    return C * R0 - p.h(C);
  };
  const double aC0 = action_C(kMinPlateau);
  const double targetC = mid + std::floor(aC0 - mid);
  const double L1 = solve_monotone(action_C, kMinPlateau, targetC, true);

  auto action_D = [&](double L2) {
    auto p = make(L1, L2, kMinPlateau);
    const double D = p.shape().D;
    return D - p.h(D);
  };
  const double aD0 = action_D(kMinPlateau);
  const double targetD = mid + std::floor(aD0 - mid);
  const double L2 = solve_monotone(action_D, kMinPlateau, targetD, true);

  // h_inf must keep both itself and -h_inf (the class (4) action) out of the
  // forbidden set; pick the residue with the largest joint margin.
  double best_t = 0.0, best_m = -kInf;
  for (int i = 0; i < 20000; ++i) {
    const double t = i / 20000.0;
    const double m =
        std::min(forbidden_distance(core, t), forbidden_distance(core, -t));
    if (m > best_m) {
      best_m = m;
      best_t = t;
    }
  }
  auto h_inf = [&](double L3) {
    auto p = make(L1, L2, L3);
    return p.h(p.shape().r_flat);
  };
  const double hi0 = h_inf(kMinPlateau);
  const double targetI = best_t + std::ceil(hi0 - best_t);
  const double L3 = solve_monotone(h_inf, kMinPlateau, targetI, false);

  auto p = make(L1, L2, L3);
  ShapeParams s = p.shape();
  s.h0 = p.h(0.0);
  s.h_inf = p.h(s.r_flat);
  return RadialProfile::from_pieces(core, s, p.pieces());
}

RadialProfile rescaled(const RadialProfile& p) {
  if (p.kind() != ProfileKind::base) {
    throw ProfileError("cannot rescale a rescaled profile");
  }
  return p.rescaled_copy();
}

double action_at(const RadialProfile& p, double r) {
  if (!(r > 0.0)) throw std::domain_error("action_at requires r > 0");
  const auto v = p.eval(r);
  return r * v.dh - v.h;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

constexpr double kEqTol = 1e-10;

// Count sign changes of g over the grid and report the cells containing them.
std::vector<std::pair<double, double>> crossings(const std::vector<double>& rs,
                                                 const std::vector<double>& g) {
  std::vector<std::pair<double, double>> out;
  int last_sign = 0;
  double last_r = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const int sg = g[i] > 0 ? 1 : (g[i] < 0 ? -1 : 0);
    if (sg == 0) continue;
    if (last_sign != 0 && sg != last_sign) out.emplace_back(last_r, rs[i]);
    last_sign = sg;
    last_r = rs[i];
  }
  return out;
}

}  // namespace

PropertyReport verify_profile(const RadialProfile& p, int grid_density) {
  const RadialProfile base =
      p.kind() == ProfileKind::base
          ? p
          : RadialProfile::from_pieces(p.core(), p.shape(), p.pieces(),
                                       [&] {
                                         std::vector<double> a;
                                         for (const auto& pc : p.pieces()) {
                                           a.push_back(p.h(pc.r_lo * p.scale()));
                                         }
                                         return a;
                                       }());
  const auto& core = base.core();
  const auto& sh = base.shape();
  const double A = core.A, B = core.B(), R0 = core.R0;
  const double top = R0 + sh.eps;

  PropertyReport rep;
  const double u0 = std::log(sh.delta_bar / 4.0);
  const double u1 = std::log(std::max(sh.r_flat, B) * 4.0);
  const auto n = static_cast<std::size_t>(
      std::max(2.0, std::ceil(grid_density * (u1 - u0))) + 1);
  std::vector<double> rs;
  rs.reserve(n + 16);
  for (std::size_t i = 0; i < n; ++i) {
    rs.push_back(std::exp(u0 + (u1 - u0) * static_cast<double>(i) / (n - 1)));
  }
  for (double k : base.knots()) {
    if (k > 0) rs.push_back(k);
  }
  for (double k : {A, B, sh.C, sh.D}) rs.push_back(k);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  rep.grid_points = rs.size();

  std::vector<double> dh(rs.size()), lh(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    dh[i] = base.dh(rs[i]);
    lh[i] = base.log_hessian(rs[i]);
  }

  auto add = [&](int id, std::string name, double margin, bool pass) {
    rep.bullets.push_back({id, std::move(name), margin, pass});
  };

  // 1
  {
    double m = kInf;
    for (double v : dh) m = std::min({m, v, top - v});
    add(1, "h'(r) in [0, R0+eps]", m, m >= -1e-12);
  }
  // 2
  {
    const double mx = *std::max_element(dh.begin(), dh.end());
    rep.max_slope = mx;
    const double err = std::abs(mx - top);
    add(2, "max h' = R0+eps < 2", std::min(kEqTol - err, 2.0 - mx),
        err <= kEqTol && mx < 2.0);
  }
  // 3
  {
    double inside = kInf, outside = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (rs[i] <= sh.delta_bar || rs[i] >= sh.r_flat) {
        outside = std::max(outside, std::abs(dh[i]));
      } else {
        inside = std::min(inside, dh[i]);
      }
    }
    add(3, "h'(r) = 0 iff r in [0, delta_bar] or r >= r_flat",
        outside > 0 ? -outside : inside, outside == 0.0 && inside > 0.0);
  }
  // 4, 5: level crossings
  auto level_bullet = [&](int id, std::string name, double level, double r_a,
                          double r_b) {
    std::vector<double> g(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) g[i] = dh[i] - level;
    const auto cr = crossings(rs, g);
    const double err =
        std::max(std::abs(base.dh(r_a) - level), std::abs(base.dh(r_b) - level));
    bool located = cr.size() == 2;
    if (located) {
      auto contains = [&](const std::pair<double, double>& cell, double r) {
        return cell.first <= r && r <= cell.second;
      };
      located = contains(cr[0], r_a) && contains(cr[1], r_b);
    }
    add(id, std::move(name), kEqTol - err, err <= kEqTol && located);
  };
  level_bullet(4, "h'(r) = 1 iff r in {A, D}", 1.0, A, sh.D);
  level_bullet(5, "h'(r) = R0 iff r in {B, C}", R0, B, sh.C);
  // 6
  {
    const double err = std::abs(base.h(A));
    add(6, "h(A) = 0", kEqTol - err, err <= kEqTol);
  }
  // 7
  {
    const double v = -base.h(0.0);
    add(7, "-h(0) not in [A, A+c(B-A)) + Z", forbidden_distance(core, v),
        !in_forbidden_set(core, v));
  }
  // 8
  {
    const double expect = B * R0 - core.c * B + core.c * A - A;
    const double err = std::abs(base.h(B) - expect);
    add(8, "h(B) = B R0 - c B + c A - A", kEqTol - err, err <= kEqTol);
  }
  // 9
  {
    const double v = sh.C * R0 - base.h(sh.C);
    add(9, "C R0 - h(C) not in [A, A+c(B-A)) + Z", forbidden_distance(core, v),
        !in_forbidden_set(core, v));
  }
  // 10
  {
    const double v = sh.D - base.h(sh.D);
    add(10, "D - h(D) not in [A, A+c(B-A)) + Z", forbidden_distance(core, v),
        !in_forbidden_set(core, v));
  }
  // 11
  {
    const double v = base.h(std::max(sh.r_flat, rs.back()));
    add(11, "lim h(r) and -lim h(r) not in [A, A+c(B-A)) + Z",
        std::min(forbidden_distance(core, v), forbidden_distance(core, -v)),
        !in_forbidden_set(core, v) && !in_forbidden_set(core, -v));
  }
  // 12
  {
    double m = kInf;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (rs[i] <= R0 * B) m = std::min(m, lh[i]);
    }
    add(12, "h''(r) >= 0 for r <= R0 B", m, m >= -1e-12);
  }
  // 13, checked on the profile actually passed in
  {
    double m = kInf;
    for (double r : rs) {
      m = std::min(m, 1.0 - std::abs(p.log_hessian(r * p.scale())));
    }
    rep.min_hessian_margin = m;
    add(13, "|r h''(r)| < 1", m, m > 0.0);
  }
  rep.pass = std::all_of(rep.bullets.begin(), rep.bullets.end(),
                         [](const BulletCheck& b) { return b.pass; });
  return rep;
}

CertifiedProfile certify(RadialProfile p, int grid_density) {
  auto rep = verify_profile(p, grid_density);
  if (!rep.pass) {
    std::string msg = "profile failed certification:";
    for (const auto& b : rep.bullets) {
      if (!b.pass) msg += fmt::format(" [{}] {} (margin {:.3g});", b.id, b.name, b.margin);
    }
    throw ProfileError(msg);
  }
  return CertifiedProfile(std::make_shared<const RadialProfile>(std::move(p)),
                          std::move(rep));
}

std::vector<OrbitClass> periodic_levels(const CertifiedProfile& cp) {
  const auto& p = cp.profile();
  const auto& sh = p.shape();
  const double k = p.scale();
  const double B = p.core().B();
  const bool base = p.kind() == ProfileKind::base;
  const double r2 = base ? p.core().A : k * B;
  const double r3 = base ? sh.D : k * sh.C;
  std::vector<OrbitClass> out;
  auto push = [&](int cls, double lo, double hi, int slope, double action) {
    out.push_back({cls, lo, hi, slope, action, in_forbidden_set(p.core(), action)});
  };
  push(1, 0.0, k * sh.delta_bar, 0, -p.h(0.0));
  push(2, r2, r2, 1, action_at(p, r2));
  push(3, r3, r3, 1, action_at(p, r3));
  push(4, k * sh.r_flat, kInf, 0, -p.h(k * sh.r_flat));
  return out;
}

// ---------------------------------------------------------------------------
// Homotopy

double Cutoff::value(double s) const {
  if (s <= -1.0) return 1.0;
  if (s >= 0.0) return 0.0;
  const double t = s + 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double Cutoff::derivative(double s) const {
  if (s <= -1.0 || s >= 0.0) return 0.0;
  const double t = s + 1.0;
  const double u = t * (1.0 - t);
  return -30.0 * u * u;
}

MonotoneHomotopy::MonotoneHomotopy(const CertifiedProfile& base)
    : base_(base.shared()), target_(rescaled(base.profile())) {
  if (base.profile().kind() != ProfileKind::base) {
    throw ProfileError("homotopy requires a base profile");
  }
  fingerprint_ = numerics::fnv1a(profile_to_json(*base_));
}

HomotopyValue MonotoneHomotopy::eval(double s, double r) const {
  if (!(r > 0.0)) throw std::domain_error("homotopy evaluated at r <= 0");
  const double b = cutoff_.value(s);
  const double db = cutoff_.derivative(s);
  const auto hb = base_->eval(r);
  if (b == 1.0) return {hb.h, hb.dh, hb.ddh, 0.0};
  const auto hl = target_.eval(r);
  if (b == 0.0) return {hl.h, hl.dh, hl.ddh, 0.0};
  return {b * hb.h + (1 - b) * hl.h, b * hb.dh + (1 - b) * hl.dh,
          b * hb.ddh + (1 - b) * hl.ddh, db * (hb.dh - hl.dh)};
}

double MonotoneHomotopy::dr(double s, double r) const {
  const double b = cutoff_.value(s);
  if (b == 1.0) return base_->dh(r);
  if (b == 0.0) return target_.dh(r);
  return b * base_->dh(r) + (1 - b) * target_.dh(r);
}

double MonotoneHomotopy::log_hessian(double s, double r) const {
  const double b = cutoff_.value(s);
  if (b == 1.0) return base_->log_hessian(r);
  if (b == 0.0) return target_.log_hessian(r);
  return b * base_->log_hessian(r) + (1 - b) * target_.log_hessian(r);
}

double MonotoneHomotopy::ds(double s, double r) const {
  const double db = cutoff_.derivative(s);
  if (db == 0.0) return 0.0;
  return db * (base_->h(r) - target_.h(r));
}

HomotopyValue homotopy_eval(const MonotoneHomotopy& H, double s, double r) {
  return H.eval(s, r);
}

}  // namespace reebpinch::profile
