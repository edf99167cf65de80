#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ctbg/lattice.hpp"

namespace ctbg {

// Positively oriented generators of the dual cell used by every k-grid:
// Q1 = (4 pi i / sqrt 3) omega^2, Q2 = -(4 pi i / sqrt 3) omega.
// k(s,t) = base + s Q1 + t Q2; the Dirac point K sits at s = t = 1/3 and the
// published grid coordinates are (k1,k2) = 3(s,t).
std::array<cplx, 2> dual_frame();

double dual_cell_area();

struct KGrid {
  int n = 0;
  bool offset = false;
  cplx base{0.0, 0.0};
  std::vector<cplx> k;  // row-major, index(is,it) = is*n+it

  static KGrid make(int n, bool offset = false, cplx base = cplx{0.0, 0.0});
  int index(int is, int it) const { return is * n + it; }
  double coord1(int is) const;  // k1 = 3 s
  double coord2(int it) const;
};

// Momentum cross-section through K' , Gamma and K: the real segment
// [-3K/2, 3K/2] sampled uniformly.
std::vector<cplx> cross_section(int count);

int max_threads();
void set_threads(int t);

// Index-parallel map; `serial` forces the reference path used by tests and
// the benchmark. Exceptions from tasks are rethrown after the loop.
void parallel_for(int count, const std::function<void(int)>& fn,
                  bool serial = false);

}  // namespace ctbg
