#include "ctbg/lattice.hpp"

#include <cmath>

namespace ctbg {

namespace {
const cplx dual_scale{0.0, 4.0 * pi / std::sqrt(3.0)};
}

const Lattice& Lattice::direct() {
  static const Lattice l(cplx{1.0, 0.0});
  return l;
}

const Lattice& Lattice::dual() {
  static const Lattice l(dual_scale);
  return l;
}

void Lattice::coords(cplx z, double& s, double& t) const {
  const cplx w = z / scale_;
  // w = s + t omega with omega = (-1/2, sqrt(3)/2).
  t = w.imag() / omega.imag();
  s = w.real() + 0.5 * t;
}

std::optional<LatticePoint> Lattice::round_point(cplx z, double tol) const {
  double s, t;
  coords(z, s, t);
  const double mr = std::round(s), nr = std::round(t);
  if (std::abs(s - mr) > tol || std::abs(t - nr) > tol) return std::nullopt;
  LatticePoint p;
  p.m = long(mr);
  p.n = long(nr);
  p.value = point(p.m, p.n);
  return p;
}

cplx Lattice::reduce(cplx z) const {
  LatticePoint shift;
  return reduce(z, shift);
}

cplx Lattice::reduce(cplx z, LatticePoint& shift) const {
  double s, t;
  coords(z, s, t);
  double mf = std::floor(s), nf = std::floor(t);
  double sr = s - mf, tr = t - nf;
  // Guard against round-off placing the representative at 1.0.
  if (sr >= 1.0) { sr -= 1.0; mf += 1.0; }
  if (tr >= 1.0) { tr -= 1.0; nf += 1.0; }
  shift.m = long(mf);
  shift.n = long(nf);
  shift.value = point(shift.m, shift.n);
  return scale_ * (cplx(sr, 0.0) + tr * omega);
}

std::vector<cplx> high_symmetry_points() {
  return {cplx{0.0, 0.0}, cplx{K_point, 0.0}, cplx{-K_point, 0.0}};
}

cplx translate_coordinates(cplx value, Direction dir) {
  const cplx f{0.0, 4.0 * pi / 3.0};
  return dir == Direction::z_to_zeta ? value * f : value / f;
}

cplx translate_momentum(cplx value, Direction dir) {
  const cplx f = 3.0 / (cplx{0.0, 4.0 * pi});
  return dir == Direction::z_to_zeta ? value * f : value / f;
}

}  // namespace ctbg
