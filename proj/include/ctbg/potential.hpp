#pragma once

#include <string>
#include <vector>

#include "ctbg/lattice.hpp"

namespace ctbg {

enum class Side { plus, minus };
enum class PotentialTag { bm, theta_family, custom };

// One Fourier term; the frequency is side*K + Lambda*(m,n).
struct PotentialTerm {
  long m = 0;
  long n = 0;
  cplx coeff{0.0, 0.0};
};

struct FourierPotential {
  Side side = Side::plus;
  PotentialTag tag = PotentialTag::custom;
  std::vector<PotentialTerm> terms;

  double side_sign() const { return side == Side::plus ? 1.0 : -1.0; }
  cplx frequency(const PotentialTerm& t) const {
    return cplx{side_sign() * K_point, 0.0} + Lattice::dual().point(t.m, t.n);
  }
  cplx eval(cplx z) const;
  // Holomorphic derivative d/dz of the trigonometric sum.
  cplx eval_dz(cplx z) const;
};

struct PotentialPair {
  FourierPotential u_plus;
  FourierPotential u_minus;
  PotentialTag tag = PotentialTag::custom;
};

// Reference tunneling potential U(z) = -(4/3) pi i sum_l w^l e^{i<z,w^l K>},
// with U_minus(z) = U_plus(-z).
PotentialPair build_bm();

// One-parameter deformation preserving the rotation and translation
// symmetries: in the companion zeta-convention
//   U_theta(zeta) = cos(theta) U(zeta) + sin(theta) sum_l w^l e^{zbar w^l - z wbar^l},
// stored here after translation to the z-convention (the deformation terms
// sit at frequencies -2K w^l with coefficients -(4/3) pi i sin(theta) w^l).
PotentialPair build_theta_family(double theta);

struct SymmetryReport {
  double translation = 0.0;  // max |U(z+g) - e^{i side <g,K>} U(z)|
  double rotation = 0.0;     // max |U(wz) - w U(z)|
  double reality = 0.0;      // max |conj U(zbar) + U(-z)|
  bool reality_checked = false;
  double worst() const {
    double w = translation > rotation ? translation : rotation;
    return reality_checked && reality > w ? reality : w;
  }
};

// Max violations over a deterministic 32x32 cell grid.
SymmetryReport validate_symmetries(const PotentialPair& pot,
                                   bool check_reality = true);

// Throws if any frequency of the pair falls outside its side class.
void check_frequency_classes(const PotentialPair& pot);

// Text format, one line per term: side m n re(coeff) im(coeff), side = +1/-1.
PotentialPair load_potential(const std::string& path);
void save_potential(const PotentialPair& pot, const std::string& path);

}  // namespace ctbg
