#pragma once

#include <array>
#include <vector>

#include "ctbg/linalg.hpp"
#include "ctbg/operators.hpp"

namespace ctbg {

struct BlochState {
  cplx alpha;
  cplx k;  // (D(alpha)+k) u = 0 is the defining residual
  FrequencyBasis basis;
  Vector coeff;  // unit norm, largest coefficient positive real
  double residual = 0.0;
};

// Deterministic phase: rotate so the largest-magnitude coefficient (lowest
// index among ties within 1e-12) is positive real.
void fix_phase(Vector& coeff);

// Kernel element of D(alpha)+k for k in {+K, -K}; exists for every alpha.
BlochState protected_state(cplx alpha, const PotentialPair& pot, cplx k,
                           int N);

// tau(K) E tau(K) pipeline sending the k=K state to a k=-K kernel element;
// no re-phasing (applying it twice gives minus the original).
BlochState partner_state(const BlochState& u_K, const PotentialPair& pot);

// Fourier synthesis at one point.
std::array<cplx, 2> evaluate(const BlochState& s, cplx z);

struct ComponentGrid {
  int n = 0;
  double shift = 0.0;  // grid z = ((i+shift)/n) + ((j+shift)/n) omega
  Eigen::MatrixXcd c1, c2;
  cplx point(int i, int j) const {
    return cplx(double(i) + shift, 0.0) / double(n) +
           (double(j) + shift) / double(n) * omega;
  }
};

// Separable Fourier synthesis over an n x n cell grid.
ComponentGrid evaluate_grid(const BlochState& s, int n, double shift = 0.0);

// det( tau(K) u_K , tau(-K) u_{-K} )(z) averaged over the samples; throws
// when the sample values are not constant to 1e-8 * (1+|mean|).
cplx wronskian(cplx alpha, const PotentialPair& pot, int N,
               const std::vector<cplx>& z_samples);

struct ZeroRecord {
  cplx location;  // reduced mod the direct lattice
  int order = 0;
  double residual = 0.0;  // |u| at the refined location
};

// Coarse |u|^2 scan, Gauss-Newton refinement of the (x,y) -> (Re u, Im u)
// map, winding-number order, dedup mod the lattice.
std::vector<ZeroRecord> locate_zeros(const BlochState& s, int n,
                                     double refine_tol = 1e-10);

struct ZeroTestResult {
  double at_zS = 0.0;
  double at_minus_zS = 0.0;
  double max_abs = 0.0;
  bool magic = false;  // min of the two values < 1e-5 * max |u|
};

ZeroTestResult flatband_zero_test(cplx alpha, const PotentialPair& pot, int N);

struct KernelState {
  BlochState state;
  double overlap_deficit = 0.0;  // against the theta-kernel construction
};

// Kernel element at generic k for magic alpha, cross-checked against
// F_{k-K}(z - z0) u_K(z) with z0 the located zero of u_K.
KernelState kernel_state_at_k(cplx alpha_magic, const PotentialPair& pot,
                              cplx k, int N);

}  // namespace ctbg
