#pragma once

#include <complex>
#include <random>

#include "ctbg/lattice.hpp"

namespace testutil {

using ctbg::cplx;

// Distance from a - b to the nearest direct-lattice point.
inline double dist_mod_lattice(cplx a, cplx b) {
  const ctbg::Lattice& L = ctbg::Lattice::direct();
  const cplx r = L.reduce(a - b);
  double best = 1e300;
  for (int m = -1; m <= 1; ++m)
    for (int n = -1; n <= 1; ++n)
      best = std::min(best, std::abs(r - L.point(m, n)));
  return best;
}

inline cplx rand_cplx(std::mt19937& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> d(-radius, radius);
  const double re = d(rng), im = d(rng);
  return cplx{re, im};
}

}  // namespace testutil
