#include "reebpinch/numerics.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace reebpinch::numerics {

double hermite_interpolate(double t0, double y0, double f0, double t1,
                           double y1, double f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw NumericalError(fmt::format(
        "bisection bracket [{}, {}] has no sign change (f = {}, {})", lo, hi,
        flo, fhi));
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(hi - lo) <= rel_tol * std::max(std::abs(lo), std::abs(hi)) ||
        mid == lo || mid == hi) {
      return mid;
    }
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {
constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}
}  // namespace

Halton::Halton(int dim, std::uint64_t skip) : index_(skip + 1) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("Halton: unsupported dimension");
  }
  bases_.assign(kPrimes, kPrimes + dim);
}

std::vector<double> Halton::next() {
  std::vector<double> p(bases_.size());
  for (std::size_t k = 0; k < bases_.size(); ++k) {
    p[k] = radical_inverse(index_, bases_[k]);
  }
  ++index_;
  return p;
}

std::vector<Vec> sphere_points(int dim, std::size_t count, std::uint64_t seed) {
  const int pairs = (dim + 1) / 2;
  Halton halton(2 * pairs, 16);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(2 * pairs);
  for (auto& s : shift) s = unif(rng);

  std::vector<Vec> out;
  out.reserve(count);
  while (out.size() < count) {
    auto u = halton.next();
    Vec g(2 * pairs);
    for (int k = 0; k < pairs; ++k) {
      double u1 = u[2 * k] + shift[2 * k];
      double u2 = u[2 * k + 1] + shift[2 * k + 1];
      u1 -= std::floor(u1);
      u2 -= std::floor(u2);
      u1 = std::max(u1, 1e-300);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      g[2 * k] = rad * std::cos(2 * std::numbers::pi * u2);
      g[2 * k + 1] = rad * std::sin(2 * std::numbers::pi * u2);
    }
    Vec p = g.head(dim);
    const double nrm = p.norm();
    if (nrm < 1e-12) continue;
    out.emplace_back(p / nrm);
  }
  return out;
}

std::vector<Vec> periodic_derivative(const std::vector<Vec>& samples,
                                     double period) {
  const std::size_t n = samples.size();
  if (n == 0) return {};
  const Eigen::Index dim = samples.front().size();
  // Trigonometric interpolation; the Nyquist mode (even n) is dropped so the
  // derivative stays real.
  std::vector<double> cs(n), sn(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2 * std::numbers::pi * static_cast<double>(k) / n;
    cs[k] = std::cos(a);
    sn[k] = std::sin(a);
  }
  const std::size_t kmax = (n - 1) / 2;
  std::vector<Vec> re(kmax + 1, Vec::Zero(dim)), im(kmax + 1, Vec::Zero(dim));
  for (std::size_t m = 1; m <= kmax; ++m) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (m * j) % n;
      re[m] += cs[idx] * samples[j];
      im[m] -= sn[idx] * samples[j];
    }
  }
  std::vector<Vec> out(n, Vec::Zero(dim));
  const double w = 2 * std::numbers::pi / period;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 1; m <= kmax; ++m) {
      const std::size_t idx = (m * j) % n;
      // d/dt [c e^{i m w t}] = i m w c e^{i m w t}; real part of 2/N sum.
      const double fm = static_cast<double>(m) * w;
      out[j] += (2.0 / n) * fm * (-(re[m] * sn[idx]) - im[m] * cs[idx]);
    }
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

}  // namespace reebpinch::numerics
