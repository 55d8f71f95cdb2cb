#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "reebpinch/numerics.hpp"
#include "reebpinch/radial_profile.hpp"

namespace reebpinch::contact {

class ContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// <nu(x), x - x0> <= 0 somewhere it is needed.
class HypothesisError : public ContactError {
 public:
  using ContactError::ContactError;
};

/// J(x_j, y_j) = (-y_j, x_j) on interleaved coordinates (x_1, y_1, x_2, ...).
Vec apply_J(const Vec& v);
/// omega(u, v) = <J u, v>.
double omega(const Vec& u, const Vec& v);

/// One monomial term of a radial series: coef * prod_i theta_i^exponents[i].
struct SeriesTerm {
  double coef = 0.0;
  std::vector<int> exponents;
};

enum class SurfaceKind { sphere, ellipsoid, radial_series, custom };
std::string_view to_string(SurfaceKind k);

/// Hypersurface {x0 + rho(theta) theta : theta in S^{2n-1}} of R^{2n}.
class StarshapedSurface {
 public:
  using RadialFn = std::function<double(const Vec&)>;

  static StarshapedSurface sphere(int n, double R, Vec center = Vec());
  /// sum_j |z_j|^2 / r_j^2 = 1; one radius per complex coordinate.
  static StarshapedSurface ellipsoid(std::vector<double> radii, Vec center = Vec());
  /// rho(theta) = R (1 + sum_k a_k psi_k(theta)), psi_k monomials in theta.
  static StarshapedSurface radial_series(int n, double R, std::vector<SeriesTerm> terms,
                                         Vec center = Vec());
  /// Arbitrary radial function; its differential uses central differences.
  static StarshapedSurface custom(int n, RadialFn rho, Vec center = Vec(),
                                  std::string label = "custom");

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  SurfaceKind kind() const { return kind_; }
  const Vec& center() const { return center_; }
  const std::vector<double>& radii() const { return radii_; }
  double R() const { return R_; }
  const std::vector<SeriesTerm>& terms() const { return terms_; }
  std::string label() const;

  /// theta need not be normalized; it is normalized first.
  double rho(const Vec& theta) const;
  /// Gradient in R^{2n} of the radial function extended to a neighbourhood
  /// of the unit sphere (only its tangential part is meaningful).
  Vec rho_gradient(const Vec& theta) const;

  Vec point_at(const Vec& theta) const;
  /// Radial projection of x onto the surface.
  Vec project(const Vec& x) const;
  double radial_residual(const Vec& x) const;
  /// Gradient of phi(x) = |x - x0| - rho((x - x0)/|x - x0|); defined off the
  /// surface as well.
  Vec level_gradient(const Vec& x) const;

 private:
  StarshapedSurface() = default;
  void check_center();

  int n_ = 0;
  SurfaceKind kind_ = SurfaceKind::sphere;
  Vec center_;
  double R_ = 1.0;
  std::vector<double> radii_;
  std::vector<SeriesTerm> terms_;
  RadialFn custom_;
  std::string label_;
  double fd_step_ = 1e-6;
};

/// Unit exterior normal; x must be on the surface (radial residual < 1e-9).
Vec normal_at(const StarshapedSurface& S, const Vec& x);
/// alpha_x(v) = 1/2 <v, J (x - x0)>.
double contact_alpha(const StarshapedSurface& S, const Vec& x, const Vec& v);
/// (2 / <nu, x - x0>) J nu. Throws HypothesisError when <nu, x - x0> <= 0.
Vec reeb_field(const StarshapedSurface& S, const Vec& x);
/// Same field without the on-surface check (for integrator stages).
Vec reeb_field_unchecked(const StarshapedSurface& S, const Vec& x);

struct FlowResult {
  Vec end;
  double elapsed = 0.0;
  double action = 0.0;  // integral of alpha(xdot)
  double radial_residual = 0.0;
  std::vector<Vec> samples;  // uniform in time, t_k = k T / N, k < N
  numerics::StepStats stats;
};

/// Integrates xdot = R(x) for time T with radial re-projection after every
/// step. When `samples` > 0, records that many uniformly spaced points
/// (excluding the end point).
FlowResult flow(const StarshapedSurface& S, const Vec& x, double T, double tol = 1e-10,
                std::size_t samples = 0);

/// min over quasi-uniform samples of <nu(z), z - x0> - R1.
double hypothesis_margin(const StarshapedSurface& S, double R1,
                         std::size_t sample_count = 4096);

struct PinchRadii {
  double R1 = 0.0;
  double R2 = 0.0;
  double ratio = 0.0;
  bool ratio_ok = false;
};
/// Extremes of rho. Exact for spheres and ellipsoids, sampled and locally
/// refined otherwise.
PinchRadii pinch_radii(const StarshapedSurface& S, std::size_t sample_count = 4096);

struct ReebOrbit {
  std::vector<Vec> points;  // t_k = k T / N
  double period = 0.0;
  double action = 0.0;
  double closure_residual = 0.0;
  int multiplicity = 1;
};

/// 1/2 closed integral of <gamma', J(gamma - x0)> by spectral quadrature.
double orbit_action(const StarshapedSurface& S, const std::vector<Vec>& points,
                    double period);

// ---------------------------------------------------------------------------
// Graph side: the unit sphere S^{2n-1} with alpha0 = (1/2pi) <v, Jx>, whose
// Reeb flow 2 pi J x is 1-periodic, and its symplectization (x, r).

/// alpha0_x(v).
double alpha0(const Vec& x, const Vec& v);
/// d alpha0 (u, v) = (1/pi) <J u, v>.
double d_alpha0(const Vec& u, const Vec& v);
/// 2 pi J x.
Vec reeb0(const Vec& x);
/// Orthonormal basis of xi_x = T_x S^{2n-1} cap ker alpha0 (Gram-Schmidt of
/// the coordinate vectors after removing x and Jx).
std::vector<Vec> xi_basis(const Vec& x);

/// f on the unit sphere with values >= 1 (after normalization).
class GraphFunction {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  static GraphFunction constant(int n, double value);
  /// `grad` may be empty, in which case central differences are used.
  static GraphFunction custom(int n, ValueFn f, GradFn grad = {});

  int n() const { return n_; }
  /// x is normalized before evaluation.
  double value(const Vec& x) const;
  /// Tangential gradient on the sphere at x / |x|.
  Vec gradient(const Vec& x) const;
  double df(const Vec& x, const Vec& v) const { return gradient(x).dot(v); }

 private:
  int n_ = 0;
  ValueFn f_;
  GradFn grad_;
};

struct GraphEncoding {
  GraphFunction f;
  double scale = 0.0;  // pi R1^2: graph action * scale = ambient action
  double R1 = 0.0;
  double max_f = 0.0;  // (R2 / R1)^2
  bool pinching_ok = false;
};

/// f(theta) = rho(theta)^2 / R1^2. Requires the surface to be centered at 0.
GraphEncoding radial_to_graph(const StarshapedSurface& S, std::size_t sample_count = 4096);

/// Unique V in xi_x with d alpha0(V, e) = df(R) alpha0(e) - df(e) for e in xi_x.
Vec v_f_field(const GraphFunction& f, const Vec& x);

/// Tangent vector of the symplectization S^{2n-1} x (0, inf).
struct SymplVec {
  Vec x;
  double r = 0.0;
};

/// Sign of the radial term r df(R) d_r in X_{h_f}; fixed by the contraction
/// identity i_X d(r alpha0) = -d h_f.
inline constexpr int kRadialSign = +1;

/// X_{h_f} at (x, r) for h_f(x, r) = h(r / f(x)):
/// (h'(r/f)/f^2) (f R - V_f + sign r df(R) d_r).
SymplVec graph_hamiltonian_field(const profile::RadialProfile& p, const GraphFunction& f,
                                 const Vec& x, double r, int radial_sign = kRadialSign);

/// max over test vectors Y of |d(r alpha0)(X, Y) + d h_f(Y)|, with Y running
/// over d_r, R and the xi basis.
double contraction_residual(const profile::RadialProfile& p, const GraphFunction& f,
                            const Vec& x, double r, const SymplVec& X);

/// R_f = U + df(U) d_r with U = R / f - V_f / f^2.
SymplVec reeb_on_graph(const GraphFunction& f, const Vec& x);

/// Samples of a closed orbit of the Hamiltonian flow, t_k = k period / N.
struct HamiltonianOrbit {
  std::vector<Vec> x;
  std::vector<double> r;
  double period = 1.0;
  double closure = 0.0;  // |(x, r)(period) - (x, r)(0)|
};

/// Integrates X_{h_f} from (x, r) for time T, recording N uniform samples.
HamiltonianOrbit graph_hamiltonian_flow(const profile::RadialProfile& p,
                                        const GraphFunction& f, const Vec& x, double r,
                                        double T, std::size_t samples = 256,
                                        double tol = 1e-12);

struct Correspondence {
  double c = 0.0;
  double spread = 0.0;    // max |r/f - c|
  double period = 0.0;    // h'(c)
  double residual = 0.0;  // max |zeta' - U(zeta)|
  ReebOrbit zeta;
};

/// z(t) = x(t / h'(c)) with c the constant value of r/f. Refuses when r/f
/// varies by more than `spread_tol` or the input does not close up.
Correspondence orbit_correspondence(const profile::RadialProfile& p,
                                    const GraphFunction& f,
                                    const HamiltonianOrbit& gamma,
                                    double spread_tol = 1e-7);

/// int r alpha0(x') dt - int h_f dt over one period (spectral quadrature).
double hamiltonian_action(const profile::RadialProfile& p, const GraphFunction& f,
                          const HamiltonianOrbit& gamma);

// ---------------------------------------------------------------------------
// I/O

/// {n, center, kind, params} with params {R} | {radii} | {R, terms}.
StarshapedSurface surface_from_json(std::string_view text);
std::string surface_to_json(const StarshapedSurface& S);
/// CSV "t,x_1,...,x_2n".
std::string orbit_csv(const ReebOrbit& o);
/// {T, action, residual, multiplicity}.
std::string orbit_summary_json(const ReebOrbit& o);

}  // namespace reebpinch::contact
