#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace reebpinch {

/// Points and tangent vectors in R^{2n}. Storage is inline up to 18 entries,
/// which covers n <= 8 plus one auxiliary slot (used by the flow for the
/// action accumulator).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 18, 1>;
inline constexpr int kMaxAmbientDim = 16;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numerics {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = 0.5;
  std::size_t max_steps = 5'000'000;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_error = 0.0;  // largest accepted scaled error estimate
};

namespace detail {

inline double scaled_error(double err, double y0, double y1, double atol,
                           double rtol) {
  const double sc = atol + rtol * std::max(std::abs(y0), std::abs(y1));
  return std::abs(err) / sc;
}

template <class V>
double scaled_error(const V& err, const V& y0, const V& y1, double atol,
                    double rtol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    worst = std::max(worst, scaled_error(err[i], y0[i], y1[i], atol, rtol));
  }
  return worst;
}

inline bool all_finite(double v) { return std::isfinite(v); }
template <class V>
bool all_finite(const V& v) {
  return v.allFinite();
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integrator with FSAL reuse.
///
/// `State` is either `double` or an Eigen column vector. The right-hand side
/// has signature `State(double t, const State& y)`. Integration may run
/// forward or backward in time; the sign of the target relative to the
/// current time decides the direction. After each accepted step an optional
/// projection is applied to the state (used to keep flows on a
/// hypersurface); the derivative is then re-evaluated at the projected state.
template <class State>
class DormandPrince {
 public:
  using Rhs = std::function<State(double, const State&)>;
  using Projection = std::function<void(State&)>;
  /// Called after every accepted step with (t0, y0, f0, t1, y1, f1).
  using Observer = std::function<void(double, const State&, const State&,
                                      double, const State&, const State&)>;

  DormandPrince(Rhs rhs, double t0, State y0, OdeOptions opts = {})
      : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(std::move(y0)) {
    f_ = rhs_(t_, y_);
    h_ = opts_.initial_step;
  }

  void set_projection(Projection p) { project_ = std::move(p); }
  void set_observer(Observer o) { observer_ = std::move(o); }

  double t() const { return t_; }
  const State& y() const { return y_; }
  const State& dy() const { return f_; }
  const StepStats& stats() const { return stats_; }
  double last_step() const { return h_; }

  /// Advance exactly to `t_target`. `stop` is polled after each accepted step;
  /// returning true ends integration early at the current time.
  void advance_to(double t_target,
                  const std::function<bool(double, const State&)>& stop = {}) {
    const double dir = t_target >= t_ ? 1.0 : -1.0;
    std::size_t steps = 0;
    while (dir * (t_target - t_) > 0.0) {
      if (++steps > opts_.max_steps) {
        throw NumericalError("ODE step budget exhausted at t=" +
                             std::to_string(t_));
      }
      double h = std::min(std::abs(h_), opts_.max_step);
      bool last = false;
      if (h >= dir * (t_target - t_)) {
        h = dir * (t_target - t_);
        last = true;
      }
      h *= dir;
      State y1, f1;
      const double err = try_step(h, y1, f1);
      if (!(err <= 1.0) || !detail::all_finite(y1)) {
        ++stats_.rejected;
        const double fac =
            std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h_ = std::abs(h) * fac;
        if (h_ < opts_.min_step) {
          throw NumericalError("step size underflow at t=" + std::to_string(t_));
        }
        continue;
      }
      ++stats_.accepted;
      stats_.max_error = std::max(stats_.max_error, err);
      const double t1 = last ? t_target : t_ + h;
      if (project_) {
        project_(y1);
        f1 = rhs_(t1, y1);
      }
      if (observer_) observer_(t_, y_, f_, t1, y1, f1);
      t_ = t1;
      y_ = std::move(y1);
      f_ = std::move(f1);
      const double grow =
          err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
      // A step clipped to hit the target says nothing about the natural size.
      if (!last) h_ = std::abs(h) * grow;
      if (stop && stop(t_, y_)) return;
    }
  }

 private:
  double try_step(double h, State& y1, State& f1) const {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                            a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                            b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                            b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                            e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                            e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    const State& k1 = f_;
    const State k2 = rhs_(t_ + h / 5.0, State(y_ + h * (a21 * k1)));
    const State k3 = rhs_(t_ + 3.0 * h / 10.0,
                          State(y_ + h * (a31 * k1 + a32 * k2)));
    const State k4 = rhs_(t_ + 4.0 * h / 5.0,
                          State(y_ + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 =
        rhs_(t_ + 8.0 * h / 9.0,
             State(y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs_(
        t_ + h,
        State(y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y1 = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f1 = rhs_(t_ + h, y1);
    const State err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * f1);
    return detail::scaled_error(err, y_, y1, opts_.atol, opts_.rtol);
  }

  Rhs rhs_;
  Projection project_;
  Observer observer_;
  OdeOptions opts_;
  double t_;
  State y_;
  State f_;
  double h_;
  StepStats stats_;
};

/// Cubic Hermite interpolation between (t0, y0, f0) and (t1, y1, f1).
double hermite_interpolate(double t0, double y0, double f0, double t1,
                           double y1, double f1, double t);

/// Bisection for a sign change of `f` on [lo, hi]. Stops once the bracket is
/// narrower than `rel_tol * max(|lo|, |hi|)`. Throws when f(lo), f(hi) do not
/// bracket a root.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol = 1e-13, int max_iter = 400);

/// Radical-inverse Halton sequence over the first `dim` primes.
class Halton {
 public:
  explicit Halton(int dim, std::uint64_t skip = 0);
  /// Next point in [0,1)^dim.
  std::vector<double> next();

 private:
  std::vector<int> bases_;
  std::uint64_t index_;
};

/// Quasi-uniform points on the unit sphere S^{dim-1}: Halton points pushed
/// through a Box-Muller map, then normalized. A Cranley-Patterson shift drawn
/// from `seed` decorrelates different seeds deterministically.
std::vector<Vec> sphere_points(int dim, std::size_t count, std::uint64_t seed);

/// Spectral derivative of uniformly sampled periodic data (samples at
/// t_k = k*period/N, k = 0..N-1). Each row of `samples` is one sample point.
std::vector<Vec> periodic_derivative(const std::vector<Vec>& samples,
                                     double period);

/// FNV-1a 64-bit hash; used for stable file names and fingerprints.
std::uint64_t fnv1a(std::string_view bytes);

/// Decimal with 17 significant digits (round-trips every double).
std::string format_double(double v);

}  // namespace numerics
}  // namespace reebpinch
