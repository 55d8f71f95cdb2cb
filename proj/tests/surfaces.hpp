#pragma once

#include <random>

#include "reebpinch/contact_dynamics.hpp"

namespace fixtures {

using reebpinch::contact::SeriesTerm;
using reebpinch::contact::StarshapedSurface;

// A torus-invariant radial series rho = R (1 + sum_j a_j |theta_j|^2) plus a
// few small generic monomials that break the symmetry. Deterministic in
// `index`.
inline StarshapedSurface random_surface(unsigned index) {
  std::mt19937_64 rng(0x51f15eedULL + index);
  std::uniform_real_distribution<double> coef(-0.08, 0.08);
  std::uniform_real_distribution<double> tiny(-1e-3, 1e-3);
  std::uniform_real_distribution<double> radius(0.8, 1.3);
  const int n = index % 4 == 3 ? 3 : 2;
  const int d = 2 * n;
  std::vector<SeriesTerm> terms;
  for (int j = 0; j < n; ++j) {
    const double a = coef(rng) + 0.05 * j;
    for (int k = 0; k < 2; ++k) {
      SeriesTerm t{a, std::vector<int>(d, 0)};
      t.exponents[2 * j + k] = 2;
      terms.push_back(t);
    }
  }
  std::uniform_int_distribution<int> pick(0, d - 1);
  for (int m = 0; m < 3; ++m) {
    SeriesTerm t{tiny(rng), std::vector<int>(d, 0)};
    ++t.exponents[pick(rng)];
    ++t.exponents[pick(rng)];
    terms.push_back(t);
  }
  return StarshapedSurface::radial_series(n, radius(rng), terms);
}

}  // namespace fixtures
