#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reebpinch::profile {

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Guard band used when deciding membership in the forbidden action set.
inline constexpr double kForbiddenGuard = 1e-12;

/// The three free constants of the construction. B is derived.
struct CoreParams {
  double R0 = 1.5;
  double A = 0.5;
  double c = 0.8;

  double B() const;
  /// c(B - A): width of the action window [A, A + c(B - A)].
  double window_width() const;
};

struct ConstraintCheck {
  std::string name;
  double slack = 0.0;  // positive iff satisfied
  bool ok = false;
};

struct ValidationReport {
  bool pass = false;
  std::vector<ConstraintCheck> checks;
  std::optional<double> B;
  std::optional<double> window_width;
  std::string diagnostic;  // first failing constraint, empty on pass
};

/// Checks 1 < R0 < 2, 0 < A < 1, 0 < c < 1, c < (R0-1)/(1 - log R0) and
/// A c (exp((R0-1)/c) - 1) < 1. Non-finite inputs are rejected with a
/// diagnostic rather than a throw.
ValidationReport validate_core(double R0, double A, double c);

/// Validated construction; throws ProfileError naming the failing constraint.
CoreParams make_core(double R0, double A, double c);

struct LogCoreValue {
  double k;
  double dk;
  double ddk;
};

/// k(r) = c r log r - c r + r (1 - c log A) + A c - A and its derivatives.
LogCoreValue log_core_eval(const CoreParams& core, double r);

/// Signed distance from v to [A, A + c(B - A)) + Z: negative (or -0) inside,
/// positive outside.
double forbidden_distance(const CoreParams& core, double v);
/// Membership with the half-open convention and a kForbiddenGuard band.
bool in_forbidden_set(const CoreParams& core, double v);

/// Tunable shape constants. Zero means "use the default".
struct ShapeOptions {
  double eps = 0.0;
  double delta = 0.0;
  double delta_bar = 0.0;
};

/// Resolved shape constants of a built profile.
struct ShapeParams {
  double eps = 0.0;
  double delta = 0.0;
  double delta_bar = 0.0;
  double C = 0.0;       // second slope-R0 radius
  double D = 0.0;       // second slope-1 radius
  double r_flat = 0.0;  // h is constant beyond this radius
  double h0 = 0.0;      // value of h on [0, delta_bar]
  double h_inf = 0.0;   // value of h on [r_flat, inf)
};

enum class PieceKind { flat, log_core, hermite };
std::string_view to_string(PieceKind kind);
PieceKind piece_kind_from_string(std::string_view s);

/// One smooth piece of h' on [r_lo, r_hi].
///
/// - flat: h' = coeffs[0].
/// - log_core: h' = k'(r) with coeffs = {A, c}.
/// - hermite: h' = sum_i coeffs[i] * t^i with t = log(r / r_lo).
struct Piece {
  PieceKind kind = PieceKind::flat;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::array<double, 4> coeffs{};
};

enum class ProfileKind { base, rescaled };

struct ProfileValue {
  double h;
  double dh;
  double ddh;
};

/// Piecewise radial Hamiltonian profile. h' is stored piecewise; h is
/// recovered by exact integration anchored at h(A) = 0. Immutable.
class RadialProfile {
 public:
  /// Assemble from pieces. The pieces must tile [0, inf) with the last one
  /// unbounded (r_hi = inf). Without explicit anchors (h at each piece's left
  /// end) they are integrated from h(A) = 0; explicit anchors are taken as
  /// given, which allows user-supplied (possibly invalid) profiles.
  static RadialProfile from_pieces(
      CoreParams core, ShapeParams shape, std::vector<Piece> pieces,
      std::optional<std::vector<double>> anchors = std::nullopt);

  const CoreParams& core() const { return core_; }
  const ShapeParams& shape() const { return shape_; }
  ProfileKind kind() const { return kind_; }
  /// 1 for the base profile, R0 for the rescaled one.
  double scale() const { return scale_; }
  /// Pieces of the underlying base profile (in base coordinates).
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<double>& anchors() const { return h_lo_; }

  double h(double r) const;
  double dh(double r) const;
  double ddh(double r) const;
  /// r * h''(r), evaluated without forming h'' first. Exact (c) on the log
  /// piece.
  double log_hessian(double r) const;
  ProfileValue eval(double r) const;

  /// Knot radii in this profile's coordinates.
  std::vector<double> knots() const;

  RadialProfile rescaled_copy() const;

 private:
  RadialProfile() = default;
  std::size_t locate(double base_r) const;
  ProfileValue eval_base(double base_r) const;
  double log_hessian_base(double base_r) const;

  CoreParams core_;
  ShapeParams shape_;
  std::vector<Piece> pieces_;
  std::vector<double> h_lo_;  // h at each piece's left end
  ProfileKind kind_ = ProfileKind::base;
  double scale_ = 1.0;
};

/// Deterministic defaults: eps = min(0.1, (2-R0)/2, (R0-1)/2),
/// delta = delta_bar = A/10.
ShapeOptions default_shape_options(const CoreParams& core);

/// Builds h: constant on [0, delta_bar], a monotone ramp up to the log core,
/// the log core k on [A - delta_bar, B + delta], a ramp up to slope R0+eps,
/// then plateau/descent pairs through slopes R0-eps, 1-eps and 0. Plateau
/// lengths are tuned so the class (3) and (4) actions and C R0 - h(C) sit
/// well away from the forbidden set. Throws ProfileError on infeasible input.
RadialProfile build_profile(const CoreParams& core, ShapeOptions opts = {});

/// l(r) = h(r / R0). Refuses to rescale a rescaled profile.
RadialProfile rescaled(const RadialProfile& p);

/// r h'(r) - h(r).
double action_at(const RadialProfile& p, double r);

struct BulletCheck {
  int id = 0;
  std::string name;
  double margin = 0.0;  // worst margin; > 0 (or >= 0 for equalities) passes
  bool pass = false;
};

struct PropertyReport {
  bool pass = false;
  std::vector<BulletCheck> bullets;
  double min_hessian_margin = 0.0;  // min over grid of 1 - |r h''(r)|
  double max_slope = 0.0;
  std::size_t grid_points = 0;
};

/// Checks the thirteen defining properties of h on a log-spaced grid with at
/// least `grid_density` points per unit of log r, plus exact checks at the
/// knots. For a rescaled profile the bullets are checked on the underlying
/// base profile and the Hessian bound on the rescaled one.
PropertyReport verify_profile(const RadialProfile& p, int grid_density = 2000);

/// A profile that passed verify_profile. Only constructible through certify.
class CertifiedProfile {
 public:
  const RadialProfile& profile() const { return *profile_; }
  const PropertyReport& report() const { return report_; }
  std::shared_ptr<const RadialProfile> shared() const { return profile_; }

 private:
  friend CertifiedProfile certify(RadialProfile p, int grid_density);
  CertifiedProfile(std::shared_ptr<const RadialProfile> p, PropertyReport r)
      : profile_(std::move(p)), report_(std::move(r)) {}
  std::shared_ptr<const RadialProfile> profile_;
  PropertyReport report_;
};

/// Runs verify_profile; throws ProfileError listing failed bullets.
CertifiedProfile certify(RadialProfile p, int grid_density = 2000);

struct OrbitClass {
  int cls = 0;  // 1..4
  double r_lo = 0.0;
  double r_hi = 0.0;  // r_lo == r_hi for isolated levels; inf for class 4
  int slope = 0;      // 0 or 1
  double action = 0.0;
  bool forbidden = false;
};

/// The four classes of 1-periodic orbits with their natural-capping actions.
std::vector<OrbitClass> periodic_levels(const CertifiedProfile& p);

/// Cutoff beta: 1 for s <= -1, 0 for s >= 0, reversed quintic smoothstep in
/// between.
struct Cutoff {
  double value(double s) const;
  double derivative(double s) const;
};

struct HomotopyValue {
  double h;      // h_s(r)
  double dr;     // d/dr h_s
  double drr;    // d^2/dr^2 h_s
  double dsdr;   // d/ds d/dr h_s
};

/// h_s(r) = beta(s) h(r) + (1 - beta(s)) h(r / R0).
class MonotoneHomotopy {
 public:
  explicit MonotoneHomotopy(const CertifiedProfile& base);

  const RadialProfile& base() const { return *base_; }
  const RadialProfile& target() const { return target_; }
  const Cutoff& cutoff() const { return cutoff_; }
  /// Stable identifier of (core, shape); used to match derived artifacts.
  std::uint64_t fingerprint() const { return fingerprint_; }

  HomotopyValue eval(double s, double r) const;
  double dr(double s, double r) const;
  /// r * d^2/dr^2 h_s(r); equals exactly c at (s <= -1, r = A).
  double log_hessian(double s, double r) const;
  /// d/ds h_s(r) = beta'(s) (h(r) - h(r/R0)).
  double ds(double s, double r) const;

 private:
  std::shared_ptr<const RadialProfile> base_;
  RadialProfile target_;
  Cutoff cutoff_;
  std::uint64_t fingerprint_;
};

HomotopyValue homotopy_eval(const MonotoneHomotopy& H, double s, double r);

// JSON profile document (see profile_io.cpp).
inline constexpr int kProfileFormatVersion = 1;
std::string profile_to_json(const RadialProfile& p);
RadialProfile profile_from_json(std::string_view text);
/// Plot-ready CSV "r,h,dh,ddh" on a log grid.
std::string profile_curve_csv(const RadialProfile& p, int points = 2000);

}  // namespace reebpinch::profile
