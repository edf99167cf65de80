#include "ctbg/operators.hpp"

#include <sstream>

#include "ctbg/symmetry.hpp"

namespace ctbg {

namespace {

struct TermShift {
  long dm, dn;
  cplx coeff;
};

// Potential terms as coordinate shifts src component -> dst component,
// including the offset mismatch resolved into exact dual coordinates.
std::vector<TermShift> term_shifts(const FourierPotential& u, cplx src_offset,
                                   cplx dst_offset) {
  std::vector<TermShift> out;
  out.reserve(u.terms.size());
  for (const auto& t : u.terms) {
    const cplx rem = u.frequency(t) + src_offset - dst_offset;
    const auto lp = Lattice::dual().round_point(rem);
    if (!lp)
      throw std::invalid_argument(
          "potential frequency does not map between the component classes");
    out.push_back({lp->m, lp->n, t.coeff});
  }
  return out;
}

void add_coupling(Matrix& A, const FrequencyBasis& basis, int src_comp,
                  int dst_comp, const std::vector<TermShift>& shifts,
                  cplx scale, bool conj_coeff) {
  const int N = basis.truncation();
  for (long m = -N; m <= N; ++m) {
    for (long n = -N; n <= N; ++n) {
      const int col = basis.index(src_comp, m, n);
      for (const auto& s : shifts) {
        const int row = basis.index(dst_comp, m + s.dm, n + s.dn);
        if (row < 0) continue;
        A(row, col) += scale * (conj_coeff ? std::conj(s.coeff) : s.coeff);
      }
    }
  }
}

}  // namespace

OperatorMatrix assemble_D(cplx alpha, const PotentialPair& pot,
                          const FrequencyBasis& basis, cplx k) {
  if (basis.spinor() != Spinor::two)
    throw std::invalid_argument("assemble_D needs a two-spinor basis");
  Matrix A = Matrix::Zero(basis.size(), basis.size());
  for (int i = 0; i < basis.size(); ++i) A(i, i) = basis.frequency(i) + k;
  add_coupling(A, basis, 2, 1,
               term_shifts(pot.u_plus, basis.offset(2), basis.offset(1)), alpha,
               false);
  add_coupling(A, basis, 1, 2,
               term_shifts(pot.u_minus, basis.offset(1), basis.offset(2)), alpha,
               false);
  return {OperatorKind::D_plus_k, std::move(A), basis.truncation(), Spinor::two};
}

OperatorMatrix assemble_D_adjoint(cplx alpha, const PotentialPair& pot,
                                  const FrequencyBasis& basis, cplx k) {
  if (basis.spinor() != Spinor::two)
    throw std::invalid_argument("assemble_D_adjoint needs a two-spinor basis");
  Matrix A = Matrix::Zero(basis.size(), basis.size());
  for (int i = 0; i < basis.size(); ++i)
    A(i, i) = std::conj(basis.frequency(i)) + k;
  // (mult by U)^* = mult by conj U: conj U_minus couples 2 -> 1 with
  // negated coordinate shifts and conjugated coefficients.
  {
    FourierPotential neg_minus = pot.u_minus;
    neg_minus.side = Side::plus;
    for (auto& t : neg_minus.terms) {
      t.m = -t.m;
      t.n = -t.n;
    }
    add_coupling(A, basis, 2, 1,
                 term_shifts(neg_minus, basis.offset(2), basis.offset(1)),
                 std::conj(alpha), true);
  }
  {
    FourierPotential neg_plus = pot.u_plus;
    neg_plus.side = Side::minus;
    for (auto& t : neg_plus.terms) {
      t.m = -t.m;
      t.n = -t.n;
    }
    add_coupling(A, basis, 1, 2,
                 term_shifts(neg_plus, basis.offset(1), basis.offset(2)),
                 std::conj(alpha), true);
  }
  return {OperatorKind::D, std::move(A), basis.truncation(), Spinor::two};
}

OperatorMatrix assemble_V(const PotentialPair& pot, const FrequencyBasis& basis) {
  if (basis.spinor() != Spinor::two)
    throw std::invalid_argument("assemble_V needs a two-spinor basis");
  Matrix A = Matrix::Zero(basis.size(), basis.size());
  add_coupling(A, basis, 2, 1,
               term_shifts(pot.u_plus, basis.offset(2), basis.offset(1)),
               cplx{1.0, 0.0}, false);
  add_coupling(A, basis, 1, 2,
               term_shifts(pot.u_minus, basis.offset(1), basis.offset(2)),
               cplx{1.0, 0.0}, false);
  return {OperatorKind::V, std::move(A), basis.truncation(), Spinor::two};
}

OperatorMatrix assemble_Hk(cplx alpha, const PotentialPair& pot,
                           const FrequencyBasis& basis4, cplx k, double mass) {
  if (basis4.spinor() != Spinor::four)
    throw std::invalid_argument("assemble_Hk needs a four-spinor basis");
  FrequencyBasis b2(basis4.truncation(), Spinor::two,
                    {basis4.offset(1), basis4.offset(2)});
  const Matrix D = assemble_D(alpha, pot, b2, k).mat;
  const int B = b2.size();
  Matrix H = Matrix::Zero(2 * B, 2 * B);
  H.topLeftCorner(B, B) = mass * Matrix::Identity(B, B);
  H.bottomRightCorner(B, B) = -mass * Matrix::Identity(B, B);
  H.topRightCorner(B, B) = D.adjoint();
  H.bottomLeftCorner(B, B) = D;
  return {OperatorKind::H_k, std::move(H), basis4.truncation(), Spinor::four};
}

namespace {
void check_pole(const FrequencyBasis& basis, cplx k) {
  for (int i = 0; i < basis.size(); ++i) {
    const cplx q = basis.frequency(i);
    if (std::abs(q - k) <= 1e-6) {
      const auto e = basis.entry(i);
      std::ostringstream msg;
      msg << "T_k pole: k within 1e-6 of basis frequency q = (" << q.real()
          << ", " << q.imag() << ") at component " << e.component << ", (m,n)=("
          << e.m << "," << e.n << ")";
      throw std::runtime_error(msg.str());
    }
  }
}
}  // namespace

OperatorMatrix assemble_Tk(const PotentialPair& pot, const FrequencyBasis& basis,
                           cplx k) {
  check_pole(basis, k);
  Matrix A = assemble_V(pot, basis).mat;
  for (int i = 0; i < basis.size(); ++i)
    A.row(i) /= (basis.frequency(i) - k);
  return {OperatorKind::T_k, std::move(A), basis.truncation(), Spinor::two};
}

Matrix assemble_Tk_block_product(const PotentialPair& pot,
                                 const FrequencyBasis& basis, cplx k) {
  check_pole(basis, k);
  const int B = basis.per_comp();
  Matrix T = assemble_Tk(pot, basis, k).mat;
  // T = [[0, A],[B, 0]]; nonzero spectrum of T is +/- sqrt(Spec(A B)).
  return T.topRightCorner(B, B) * T.bottomLeftCorner(B, B);
}

OperatorMatrix rotation_sector_projector(const FrequencyBasis& basis, int p) {
  if (p < 0 || p > 2)
    throw std::invalid_argument("rotation sector label must be 0, 1 or 2");
  const SymmetryOperator C = make_rotation_C(basis);
  const int n = basis.size();
  Matrix P = Matrix::Zero(n, n);
  const cplx w1 = p == 0 ? cplx{1, 0} : (p == 1 ? omega : std::conj(omega));
  const cplx w2 = std::conj(w1);
  // Core indices: full rotation orbit inside the box.  On the core the three
  // terms form an exact permutation average; outside it the orbit is
  // unclassifiable at this truncation and is assigned to the p = 0 sector.
  const std::vector<bool> core = rotation_core(basis);
  for (int j = 0; j < n; ++j) {
    if (core[j]) {
      const int j1 = C.perm[j];
      const int j2 = C.perm[j1];
      P(j, j) += 1.0 / 3.0;
      P(j1, j) += w1 * C.phase[j] / 3.0;
      P(j2, j) += w2 * C.phase[j] * C.phase[j1] / 3.0;
    } else if (p == 0) {
      P(j, j) = 1.0;
    }
  }
  return {OperatorKind::projector, std::move(P), basis.truncation(),
          basis.spinor()};
}

}  // namespace ctbg
