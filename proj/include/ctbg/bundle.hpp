#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ctbg/grid.hpp"
#include "ctbg/protected_states.hpp"
#include "ctbg/theta.hpp"

namespace ctbg {

// Holomorphic line-bundle frame u(k, z) = F_{k-K}(z - z0) u_K(z) over the
// momentum torus, with z0 a zero of the flat-band state u_K.  The metric
// h(k) = mean |u(k)|^2, its curvature H = (1/4) Laplacian_k log h, and the
// Chern number by three routes: curvature quadrature, overlap plaquettes,
// and the multiplier holonomy around one dual cell.
struct BlochFamily {
  cplx alpha;
  BlochState u_K;
  cplx zero;  // z0
  int nz = 96;
  ThetaEvaluator theta;
  // Quadrature samples on the half-spacing-offset nz x nz cell grid.
  ComponentGrid base;              // u_K values
  std::vector<cplx> zc;            // zeta - z0, flattened row-major
  std::vector<double> y_imag;      // Im(zeta - z0)
  std::vector<cplx> theta_den;     // theta(zeta - z0)
  std::vector<double> weight;      // |u_K(zeta)|^2
};

BlochFamily make_family(const BlochState& u_K, int nz = 96);
BlochFamily make_family(cplx alpha, const PotentialPair& pot, int N,
                        int nz = 96);

// u(k) sampled on the family grid.
ComponentGrid u_of_k(const BlochFamily& fam, cplx k);

// h(k) = mean |u(k)|^2 over the cell; h(K) = 1 by Parseval.
double h_of_k(const BlochFamily& fam, cplx k);

// e_p(k - K), the constant in u(k)(z) = e_p(k-K) e^{i<z-z0,p>} u(k+p)(z);
// consequently h(k) = |e_p(k-K)|^2 h(k+p) for dual lattice p.
cplx multiplier(const BlochFamily& fam, cplx p, cplx k);

// Gauge-invariant curvature [h ||d_k u||^2 - |<u, d_k u>|^2] / h^2 using the
// analytic k-derivative d_k log F; equals (1/4) Laplacian_k log h >= 0.
double curvature_analytic(const BlochFamily& fam, cplx k);

// Five-point finite-difference Laplacian of log h over 4, as a cross-check.
double curvature_fd(const BlochFamily& fam, cplx k, double step = 1e-3);

// Route 1: Chern number as -(1/pi) sum H dA over the offset n x n dual
// cell grid.
double chern_integral(const BlochFamily& fam, int n);

struct PlaquetteResult {
  int chern = 0;
  double residual = 0.0;  // distance of the phase sum / 2 pi from chern
};

// Route 2: overlap-plaquette phase sum over an (n+1)^2 node grid spanning
// one dual cell; quantized because seam multipliers telescope exactly.
// `conjugate` conjugates every link (opposite orientation of the fibre).
PlaquetteResult chern_plaquette(const BlochFamily& fam, int n,
                                bool conjugate = false);

// Route 3: branch-continued multiplier holonomy around the dual cell with
// base corner c; imaginary part must vanish (checked to 1e-9).
double chern_boundary(const BlochFamily& fam, cplx base_corner = cplx{0.0,
                                                                      0.0});

struct CurvatureReport {
  int n = 0;
  KGrid grid;                       // offset k grid
  Eigen::MatrixXd H;                // H(grid.index(is, it)) row = is
  double H_Gamma = 0.0, H_K = 0.0, H_Kprime = 0.0;
  double grad_Gamma = 0.0, grad_K = 0.0, grad_Kprime = 0.0;
  double max_H = 0.0, min_H = 0.0;
  cplx argmax_k, argmin_k;
  std::vector<cplx> section_k;      // real-axis cross-section
  std::vector<double> section_H;
};

CurvatureReport curvature_report(const BlochFamily& fam, int n,
                                 int section_count = 121);

}  // namespace ctbg
