#pragma once

#include <Eigen/Dense>

#include "ctbg/basis.hpp"
#include "ctbg/potential.hpp"

namespace ctbg {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class OperatorKind { D, D_plus_k, H_k, H_mass, T_k, V, projector };

struct OperatorMatrix {
  OperatorKind kind;
  Matrix mat;
  int N = 0;
  Spinor spinor = Spinor::two;
};

// D(alpha) + k on a two-spinor basis: diagonal entries q + k, each potential
// term of frequency f contributing alpha*coeff at (row q+f, col q) in the
// off-diagonal component blocks; couplings leaving the truncation box are
// dropped.
OperatorMatrix assemble_D(cplx alpha, const PotentialPair& pot,
                          const FrequencyBasis& basis, cplx k);

// Formal adjoint D(alpha)* + k assembled symbolically (diagonal conj(q) + k,
// conjugated potential couplings in swapped blocks).
OperatorMatrix assemble_D_adjoint(cplx alpha, const PotentialPair& pot,
                                  const FrequencyBasis& basis, cplx k);

// Off-diagonal coupling V alone (the alpha-derivative of D).
OperatorMatrix assemble_V(const PotentialPair& pot, const FrequencyBasis& basis);

// Four-spinor Hermitian block matrix [[m I, (D+k)^H], [D+k, -m I]].
OperatorMatrix assemble_Hk(cplx alpha, const PotentialPair& pot,
                           const FrequencyBasis& basis4, cplx k, double mass);

// T_k = diag(1/(q - k)) V.  Throws a pole error when k is within 1e-6 of a
// basis frequency.
OperatorMatrix assemble_Tk(const PotentialPair& pot, const FrequencyBasis& basis,
                           cplx k);

// Half-size block product whose spectrum gives the nonzero eigenvalues of
// T_k as +/- sqrt(mu): M = R_1 U_+ R_2 U_- on component 1.
Matrix assemble_Tk_block_product(const PotentialPair& pot,
                                 const FrequencyBasis& basis, cplx k);

// Spectral projector onto the rotation sector p (0,1,2) for a basis whose
// offsets are fixed by the rotation mod Lambda*.  Exact projector identities
// hold: frequencies whose rotation orbit leaves the truncation box cannot be
// classified and are assigned to the p = 0 sector.
OperatorMatrix rotation_sector_projector(const FrequencyBasis& basis, int p);

}  // namespace ctbg
