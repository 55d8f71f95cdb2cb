#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "reebpinch/numerics.hpp"
#include "reebpinch/radial_profile.hpp"

namespace reebpinch::ode {

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Samples of F(s) = exp(G(s)) solving G' = 1 - h_s'(e^G), G = log A for
/// s <= -1. Grid points are s_k = k / grid_per_unit for consecutive integers
/// k, so grids built with the same resolution line up exactly.
struct ConnectingTrajectory {
  struct Node {
    double s;
    double G;
    double dG;
  };

  std::shared_ptr<const profile::MonotoneHomotopy> homotopy;
  std::uint64_t homotopy_id = 0;
  int grid_per_unit = 1000;
  long k_first = 0;  // index of s.front()
  std::vector<double> s;
  std::vector<double> F;
  std::vector<double> G;
  /// Accepted integrator nodes on [-1, s_stop], for residual checks.
  std::vector<Node> nodes;
  numerics::StepStats step_stats;
  double tol = 1e-10;
  double s_stop = 0.0;     // where integration actually ended
  bool converged = false;  // |F - R0 B| < tol reached before s_end

  /// Dense value of F at s (Hermite between integrator nodes).
  double F_at(double s_query) const;
  double G_at(double s_query) const;
};

struct BarrierCurve {
  int grid_per_unit = 1000;
  long k_first = 0;
  std::vector<double> s;
  std::vector<double> rho;
};

/// The unique rho in (0, R0 B] with h_s'(rho) = 1, by bisection on
/// [delta_bar, R0 B].
double slope_one_level(const profile::MonotoneHomotopy& H, double s);

struct IntegrateOptions {
  double s_start = -5.0;  // first grid point (frozen part), must be <= -1
  int grid_per_unit = 1000;
  double max_step = 1e-3;
};

/// Integrates the connecting ODE from s = -1 with an adaptive Dormand-Prince
/// scheme (rtol = atol = tol) and stops at s_end or once |F - R0 B| < tol.
ConnectingTrajectory integrate_connecting(
    std::shared_ptr<const profile::MonotoneHomotopy> H, double s_end = 50.0,
    double tol = 1e-10, IntegrateOptions opts = {});

/// rho(s) on the grid points of [-1, 0].
BarrierCurve barrier_curve(const profile::MonotoneHomotopy& H,
                           int grid_per_unit = 1000);

/// min over the interior grid points of (-1, 0) of rho(s) - F(s). Throws
/// OdeError when the two grids do not line up.
double verify_gap(const ConnectingTrajectory& traj, const BarrierCurve& barrier);

/// Largest per-unit-s mismatch between each accepted step's increment of G
/// and a 5-point Gauss-Legendre quadrature of 1 - h_s'(e^G) along the dense
/// interpolant.
double ode_residual(const ConnectingTrajectory& traj);

struct DivergenceReport {
  double F0 = 0.0;
  double F_back = 0.0;
  double ratio = 0.0;  // |F(s_back) - A| / |F0 - A|
  double growth_factor = 10.0;
  bool blow_up = false;
  bool fixed_point = false;
  bool diverged() const { return blow_up || ratio >= growth_factor; }
};

/// Integrates the frozen (s <= -1) autonomous equation backward from
/// (s0, F0) to s_back and measures the drift away from F = A.
DivergenceReport uniqueness_probe(const profile::MonotoneHomotopy& H, double s0,
                                  double F0, double s_back,
                                  double growth_factor = 10.0);

/// F(s) * d^2/dr^2 h_s(F(s)). Exactly c for s <= -1.
double zeta2_coefficient(const ConnectingTrajectory& traj, double s);

struct AdjointProfile {
  std::vector<double> s;
  std::vector<double> log_x2;
  std::vector<double> x2;
  std::vector<double> dlog;  // d/ds log X2 at the grid points
};

/// X2(s) = exp(int_0^s (-1 - d_s h_s'(F) / (G' F)) ds), fraction taken as 0
/// for s <= -1 and beyond s = 0. Refuses when the gap margin is not positive
/// or when |G'| < 1e-14 inside (-1, 0).
AdjointProfile radial_adjoint_profile(const ConnectingTrajectory& traj,
                                      const BarrierCurve& barrier);

struct MinorReport {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
  double minor1 = 0.0;
  double det = 0.0;
  bool skipped = false;
  std::string note;
};

/// Leading principal minors of the second-order coefficient matrix
/// [[x^2 (1+q), xy (q - 4 pi^2)], [xy (q - 4 pi^2), y^2 (1+q)]],
/// q = sin^2(sigma)/sigma^2. Values are reported, not judged.
std::vector<MinorReport> ellipticity_grid_report(
    const std::vector<std::pair<double, double>>& grid);

/// CSV "s,F,G,rho,margin" (rho and margin only on [-1, 0]).
std::string trajectory_csv(const ConnectingTrajectory& traj,
                           const BarrierCurve* barrier = nullptr);

}  // namespace reebpinch::ode
