#include "ctbg/theta.hpp"

#include <cmath>

namespace ctbg {

namespace {
const cplx I{0.0, 1.0};
}

ThetaEvaluator::ThetaEvaluator(int series_cutoff) : M_(series_cutoff) {
  dtheta0_ = theta_prime_raw(cplx{0.0, 0.0});
}

cplx ThetaEvaluator::theta_raw(cplx z) const {
  cplx acc{0.0, 0.0};
  for (int n = -M_; n < M_; ++n) {
    const double h = n + 0.5;
    acc += std::exp(pi * I * (h * h * omega + 2.0 * h * (z + 0.5)));
  }
  return -acc;
}

cplx ThetaEvaluator::theta_prime_raw(cplx z) const {
  cplx acc{0.0, 0.0};
  for (int n = -M_; n < M_; ++n) {
    const double h = n + 0.5;
    acc += 2.0 * pi * I * h *
           std::exp(pi * I * (h * h * omega + 2.0 * h * (z + 0.5)));
  }
  return -acc;
}

void ThetaEvaluator::reduce(cplx z, cplx& z0, long& m, long& n) const {
  LatticePoint shift;
  z0 = Lattice::direct().reduce(z, shift);
  m = shift.m;
  n = shift.n;
}

cplx ThetaEvaluator::theta(cplx z) const {
  cplx z0;
  long m, n;
  reduce(z, z0, m, n);
  const double sign = ((m + n) % 2 == 0) ? 1.0 : -1.0;
  const cplx factor =
      sign * std::exp(-pi * I * double(n) * double(n) * omega -
                      2.0 * pi * I * double(n) * z0);
  return factor * theta_raw(z0);
}

cplx ThetaEvaluator::theta_prime(cplx z) const {
  cplx z0;
  long m, n;
  reduce(z, z0, m, n);
  const double sign = ((m + n) % 2 == 0) ? 1.0 : -1.0;
  const cplx factor =
      sign * std::exp(-pi * I * double(n) * double(n) * omega -
                      2.0 * pi * I * double(n) * z0);
  return factor *
         (theta_prime_raw(z0) - 2.0 * pi * I * double(n) * theta_raw(z0));
}

cplx ThetaEvaluator::F(cplx k, cplx z) const {
  const cplx den = theta(z);
  if (std::abs(den) < 1e-13)
    throw std::runtime_error("F_k evaluated at a lattice point (theta pole)");
  const cplx phase = std::exp(0.5 * I * (z - std::conj(z)) * k);
  return phase * theta(z - zmap(k)) / den;
}

cplx ThetaEvaluator::c(cplx k) const {
  return 2.0 * pi * I * theta(zmap(k)) / dtheta0_;
}

cplx ThetaEvaluator::multiplier_e(cplx p, cplx k) const {
  const cplx den = theta(zmap(k + p));
  if (std::abs(den) < 1e-13)
    throw std::runtime_error("multiplier_e: theta zero in denominator");
  return theta(zmap(k)) / den;
}

cplx ThetaEvaluator::dk_logF(cplx k, cplx z) const {
  const cplx zz = z - zmap(k);
  const cplx th = theta(zz);
  if (std::abs(th) < 1e-13)
    throw std::runtime_error("dk_logF evaluated at the zero of F_k");
  const cplx sigma = std::sqrt(3.0) / (cplx{0.0, 4.0 * pi});
  return 0.5 * I * (z - std::conj(z)) - sigma * theta_prime(zz) / th;
}

cplx ThetaEvaluator::log_multiplier_continued(cplx p, cplx k0, cplx k1,
                                              int steps) const {
  for (int attempt = 0; attempt < 5; ++attempt, steps *= 2) {
    cplx prev = multiplier_e(p, k0);
    cplx log_val = std::log(prev);
    bool ok = true;
    for (int j = 1; j <= steps; ++j) {
      const cplx k = k0 + (double(j) / steps) * (k1 - k0);
      const cplx cur = multiplier_e(p, k);
      const cplx ratio = cur / prev;
      const double darg = std::arg(ratio);
      if (std::abs(darg) >= 0.5 * pi) {
        ok = false;
        break;
      }
      log_val += std::log(ratio);
      prev = cur;
    }
    if (ok) return log_val;
  }
  throw std::runtime_error(
      "log_multiplier_continued: branch tracking step rejection");
}

cplx green_fourier(cplx k, cplx z, int box) {
  const Lattice& dual = Lattice::dual();
  const double pmax = std::abs(dual.point(box, 0));
  const double r0 = 0.40 * pmax, r1 = 0.98 * pmax;
  auto smooth_step = [](double t) {
    // C-infinity step: 0 for t<=0, 1 for t>=1.
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  };
  cplx acc{0.0, 0.0};
  for (long m = -box; m <= box; ++m) {
    for (long n = -box; n <= box; ++n) {
      const cplx p = dual.point(m, n);
      const double ap = std::abs(p);
      const double w = 1.0 - smooth_step((ap - r0) / (r1 - r0));
      if (w == 0.0) continue;
      acc += w * std::exp(I * pairing(z, p)) / (p + k);
    }
  }
  const double cell_area = omega.imag();  // |Im omega| = sqrt(3)/2
  return acc / cell_area;
}

}  // namespace ctbg
