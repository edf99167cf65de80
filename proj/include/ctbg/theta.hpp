#pragma once

#include <stdexcept>

#include "ctbg/lattice.hpp"

namespace ctbg {

// Jacobi theta function theta_1 with modular parameter fixed to omega,
//   theta(z) = -sum_n exp(pi i (n+1/2)^2 omega + 2 pi i (n+1/2)(z+1/2)),
// together with the quasi-periodic kernel F_k, the delta weight c(k) and
// the translation multipliers e_p(k).
class ThetaEvaluator {
 public:
  explicit ThetaEvaluator(int series_cutoff = 12);

  // theta and its z-derivative; arguments are reduced to the fundamental
  // cell first so large |Im z| stays well-conditioned.
  cplx theta(cplx z) const;
  cplx theta_prime(cplx z) const;
  cplx theta_prime0() const { return dtheta0_; }

  // F_k(z) = e^{(i/2)(z - conj z) k} theta(z - z(k)) / theta(z);
  // Lambda-periodic in z.  Throws when z is a lattice point.
  cplx F(cplx k, cplx z) const;

  // c(k) = 2 pi i theta(z(k)) / theta'(0), the delta weight of (2D_zbar+k)F_k.
  cplx c(cplx k) const;

  // e_p(k) = theta(z(k)) / theta(z(k+p)).
  cplx multiplier_e(cplx p, cplx k) const;

  // d/dk log F_k(z) = (i/2)(z - conj z) - sigma theta'/theta(z - z(k)),
  // sigma = sqrt(3)/(4 pi i); Lambda-periodic in z.
  cplx dk_logF(cplx k, cplx z) const;

  // log e_p(k0 + t(k1-k0)) continued by steps from the principal branch at
  // k0; each increment of the argument must stay below pi/2 or the step
  // count is doubled (up to a limit, then an error is thrown).
  cplx log_multiplier_continued(cplx p, cplx k0, cplx k1, int steps = 64) const;

 private:
  int M_;
  cplx dtheta0_;

  cplx theta_raw(cplx z) const;
  cplx theta_prime_raw(cplx z) const;
  // z = z0 + m + n omega with z0 in the fundamental cell; theta(z) =
  // (-1)^{m+n} exp(-pi i n^2 omega - 2 pi i n z0) theta(z0), and the same
  // factor relates the derivatives up to the -2 pi i n theta(z0) term.
  void reduce(cplx z, cplx& z0, long& m, long& n) const;
};

// Fourier-synthesized Green function of (2D_zbar + k)^{-1} on C/Lambda:
//   G_k(z) = (1/|cell|) sum_{p in Lambda*} w(|p|) e^{i<z,p>} / (p + k),
// cut off at |m|,|n| <= box with a smooth radial window for superalgebraic
// convergence.  Oracle for the identity G_k = c(k)^{-1} F_k.
cplx green_fourier(cplx k, cplx z, int box = 160);

}  // namespace ctbg
