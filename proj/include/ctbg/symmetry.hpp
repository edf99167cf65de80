#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ctbg/basis.hpp"
#include "ctbg/potential.hpp"

namespace ctbg {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Permutation-with-phases realization of a symmetry on coefficient vectors.
// Antilinear operators conjugate the coefficients first; src/dst bases may
// differ (sector-changing operators carry the re-indexing).
struct SymmetryOperator {
  enum class Kind { translation, rotation, chiral, e_swap, antilinear_q, boost };
  Kind kind;
  bool antilinear = false;
  FrequencyBasis src;
  FrequencyBasis dst;
  std::vector<int> perm;    // dst index per src index, -1 = leaves truncation
  std::vector<cplx> phase;  // multiplier per src index

  Vector apply(const Vector& v) const;
  Matrix matrix() const;
};

// L_gamma: translation by gamma in Lambda with the +/-K component twist;
// diagonal on any sector basis, identity on the moire-periodic sector.
SymmetryOperator make_translation_L(const FrequencyBasis& basis, cplx gamma);

// Rotation u(z) -> u(omega z) componentwise, with the extra conj(omega)
// phase on components 3,4 of a four-spinor.  Requires offsets fixed by the
// rotation mod Lambda*.
SymmetryOperator make_rotation_C(const FrequencyBasis& basis);

// Chiral grading diag(1,1,-1,-1) on four-spinors.
SymmetryOperator make_chiral_W(const FrequencyBasis& basis4);

// E v(z) = J v(-z), J = [[0,1],[-1,0]]; swaps components with a sign and
// negates frequencies; dst offsets are (-o2, -o1).
SymmetryOperator make_E_swap(const FrequencyBasis& basis);

// Antilinear Q: coefficient conjugation (QDQ = D* for the symmetric D).
SymmetryOperator make_Q(const FrequencyBasis& basis);

// Boost tau(p): multiplication by e^{i<z,p>}; pure offset retag, coefficients
// unchanged.
SymmetryOperator make_tau(const FrequencyBasis& basis, cplx p);

// Indices whose full rotation orbit stays inside the truncation box; on this
// core all rotation identities are exact.
std::vector<bool> rotation_core(const FrequencyBasis& basis);

struct RelationReport {
  std::vector<std::pair<std::string, double>> residuals;
  double worst() const {
    double w = 0.0;
    for (const auto& r : residuals) w = std::max(w, r.second);
    return w;
  }
};

// Residuals of the commutation identities on the truncated basis (rotation
// identities evaluated on the rotation core, where they are exact).
RelationReport check_relations(cplx alpha, const PotentialPair& pot, int N,
                               cplx k);

}  // namespace ctbg
