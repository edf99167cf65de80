#pragma once

#include <vector>

#include "ctbg/grid.hpp"
#include "ctbg/linalg.hpp"
#include "ctbg/operators.hpp"

namespace ctbg {

// Generic probe momentum away from the protected points and the dual lattice.
inline const cplx default_probe{0.31, 0.17};

// The `count` smallest singular values of D(alpha)+k, ascending.
std::vector<double> bands(cplx alpha, const PotentialPair& pot, cplx k,
                          int count, int N);

struct MagicCandidate {
  cplx alpha;
  double residual = 0.0;  // smallest singular value of D(alpha)+k_probe
  int multiplicity = 0;
  bool converged = false;
};

struct MagicAngleSet {
  std::vector<MagicCandidate> angles;  // sorted by |alpha| then arg
  int trunc = 0;
  cplx probe;
};

struct RefineResult {
  cplx alpha;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Root-polish of the flat-band criterion: drives the smallest singular value
// of D(alpha)+k_probe to zero, one complex Gauss-Newton step per singular
// triplet; step clamp 0.05, leash 0.1 around the start.
RefineResult refine_magic(cplx alpha0, const PotentialPair& pot, int N,
                          cplx k_probe = default_probe);

// Spectral detection through the compact operator T_k: candidate alphas are
// +-1/lambda for eigenvalues lambda, kept when |alpha| <= search_radius,
// sorted by |alpha| then arg, truncated to `count`, then refined.  A
// refined candidate's negative is mirrored exactly (the component sign flip
// conjugates D(alpha) into D(-alpha)).
MagicAngleSet magic_angles(const PotentialPair& pot, int N,
                           cplx k_probe = default_probe, int count = 2,
                           double search_radius = 1.0);

// Number of singular values of D(alpha)+k below tol * (largest singular
// value); tol is relative.
int kernel_dim(cplx alpha, const PotentialPair& pot, cplx k, int N,
               double tol = 1e-7);

struct FlatnessResult {
  KGrid grid;                   // offset n x n
  std::vector<double> E1, E2;   // per grid index
  double max_E1 = 0.0;
  cplx argmax_k;
  double min_E2 = 0.0;
};

FlatnessResult flatness_scan(cplx alpha, const PotentialPair& pot, int n,
                             int N);

struct RescaledBand {
  KGrid grid;                 // plain n x n (contains Gamma and +-K)
  std::vector<double> E1_hat; // E1 / max E1
  std::vector<double> comp_u; // |U(z(k))| normalized to max 1
  std::vector<double> comp_du;// |2 dU/dz(-4 sqrt3 pi i k / 9)| normalized
  double dist_u = 0.0;        // ||E1_hat - comp||_2 / ||E1_hat||_2
  double dist_du = 0.0;
};

RescaledBand rescaled_band(cplx alpha, const PotentialPair& pot, int n, int N);

// Analytic |d E1 / d alpha| at a magic alpha from the kernel vector:
// |v^T V v| with v the unit right kernel vector of D(alpha)+k (the left
// kernel vector is its conjugate since D+k is complex symmetric).
double dE1_dalpha(cplx alpha_magic, const PotentialPair& pot, cplx k, int N);

}  // namespace ctbg
