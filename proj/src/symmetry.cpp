#include "ctbg/symmetry.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "ctbg/operators.hpp"

namespace ctbg {

Vector SymmetryOperator::apply(const Vector& v) const {
  if (v.size() != src.size())
    throw std::invalid_argument("vector length does not match source basis");
  Vector out = Vector::Zero(dst.size());
  for (int j = 0; j < src.size(); ++j) {
    if (perm[j] < 0) continue;
    const cplx x = antilinear ? std::conj(v[j]) : v[j];
    out[perm[j]] += phase[j] * x;
  }
  return out;
}

Matrix SymmetryOperator::matrix() const {
  Matrix M = Matrix::Zero(dst.size(), src.size());
  for (int j = 0; j < src.size(); ++j)
    if (perm[j] >= 0) M(perm[j], j) = phase[j];
  return M;
}

namespace {

std::vector<int> identity_perm(int n) {
  std::vector<int> p(n);
  for (int j = 0; j < n; ++j) p[j] = j;
  return p;
}

// Offset displacement conj(omega) * o - o resolved into dual coordinates,
// one pair per component; fails when an offset class is not rotation stable.
std::vector<std::array<long, 2>> rotation_deltas(const FrequencyBasis& basis) {
  std::vector<std::array<long, 2>> d;
  const cplx wbar = std::conj(omega);
  for (int c = 1; c <= basis.ncomp(); ++c) {
    const cplx rem = wbar * basis.offset(c) - basis.offset(c);
    const auto lp = Lattice::dual().round_point(rem);
    if (!lp)
      throw std::invalid_argument("basis offsets are not rotation stable");
    d.push_back({lp->m, lp->n});
  }
  return d;
}

}  // namespace

SymmetryOperator make_translation_L(const FrequencyBasis& basis, cplx gamma) {
  if (!Lattice::direct().contains(gamma))
    throw std::invalid_argument("translation must be a direct lattice vector");
  SymmetryOperator op{SymmetryOperator::Kind::translation, false, basis, basis,
                      identity_perm(basis.size()),
                      std::vector<cplx>(basis.size())};
  for (int j = 0; j < basis.size(); ++j) {
    const BasisEntry e = basis.entry(j);
    const double s = (e.component % 2 == 1) ? 1.0 : -1.0;
    op.phase[j] = std::polar(1.0, pairing(gamma, e.freq + s * K_point));
  }
  return op;
}

SymmetryOperator make_rotation_C(const FrequencyBasis& basis) {
  const auto deltas = rotation_deltas(basis);
  SymmetryOperator op{SymmetryOperator::Kind::rotation, false, basis, basis,
                      std::vector<int>(basis.size(), -1),
                      std::vector<cplx>(basis.size(), cplx{1.0, 0.0})};
  const cplx wbar = std::conj(omega);
  for (int j = 0; j < basis.size(); ++j) {
    const BasisEntry e = basis.entry(j);
    const auto& d = deltas[e.component - 1];
    // conj(omega) * (offset + p(m,n)) = offset + p(n-m+dm, -m+dn).
    op.perm[j] = basis.index(e.component, e.n - e.m + d[0], -e.m + d[1]);
    if (basis.spinor() == Spinor::four && e.component >= 3) op.phase[j] = wbar;
  }
  return op;
}

SymmetryOperator make_chiral_W(const FrequencyBasis& basis4) {
  if (basis4.spinor() != Spinor::four)
    throw std::invalid_argument("chiral grading needs a four-spinor basis");
  SymmetryOperator op{SymmetryOperator::Kind::chiral, false, basis4, basis4,
                      identity_perm(basis4.size()),
                      std::vector<cplx>(basis4.size())};
  for (int j = 0; j < basis4.size(); ++j)
    op.phase[j] = basis4.entry(j).component <= 2 ? 1.0 : -1.0;
  return op;
}

SymmetryOperator make_E_swap(const FrequencyBasis& basis) {
  if (basis.spinor() != Spinor::two)
    throw std::invalid_argument("component swap needs a two-spinor basis");
  FrequencyBasis dst(basis.truncation(), Spinor::two,
                     {-basis.offset(2), -basis.offset(1)});
  SymmetryOperator op{SymmetryOperator::Kind::e_swap, false, basis, dst,
                      std::vector<int>(basis.size(), -1),
                      std::vector<cplx>(basis.size())};
  for (int j = 0; j < basis.size(); ++j) {
    const BasisEntry e = basis.entry(j);
    const int tgt_comp = e.component == 1 ? 2 : 1;
    op.perm[j] = dst.index(tgt_comp, -e.m, -e.n);
    op.phase[j] = e.component == 1 ? -1.0 : 1.0;
  }
  return op;
}

SymmetryOperator make_Q(const FrequencyBasis& basis) {
  return SymmetryOperator{SymmetryOperator::Kind::antilinear_q, true, basis,
                          basis, identity_perm(basis.size()),
                          std::vector<cplx>(basis.size(), cplx{1.0, 0.0})};
}

SymmetryOperator make_tau(const FrequencyBasis& basis, cplx p) {
  std::vector<cplx> offs = basis.offsets();
  for (auto& o : offs) o += p;
  FrequencyBasis dst(basis.truncation(), basis.spinor(), offs);
  return SymmetryOperator{SymmetryOperator::Kind::boost, false, basis, dst,
                          identity_perm(basis.size()),
                          std::vector<cplx>(basis.size(), cplx{1.0, 0.0})};
}

std::vector<bool> rotation_core(const FrequencyBasis& basis) {
  const SymmetryOperator C = make_rotation_C(basis);
  std::vector<bool> core(basis.size(), false);
  for (int j = 0; j < basis.size(); ++j) {
    const int j1 = C.perm[j];
    if (j1 < 0) continue;
    core[j] = C.perm[j1] >= 0;
  }
  return core;
}

namespace {

double core_masked_max(const Matrix& M, const std::vector<bool>& core) {
  double mx = 0.0;
  for (int j = 0; j < M.cols(); ++j) {
    if (!core[j]) continue;
    for (int i = 0; i < M.rows(); ++i)
      if (core[i]) mx = std::max(mx, std::abs(M(i, j)));
  }
  return mx;
}

double full_max(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

RelationReport check_relations(cplx alpha, const PotentialPair& pot, int N,
                               cplx k) {
  RelationReport rep;
  auto add = [&rep](const char* name, double r) {
    rep.residuals.emplace_back(name, r);
  };

  FrequencyBasis b2(N, Spinor::two);
  const Matrix D = assemble_D(alpha, pot, b2, cplx{0.0, 0.0}).mat;
  const Matrix Om = make_rotation_C(b2).matrix();
  const std::vector<bool> core2 = rotation_core(b2);

  // Rotation covariance and its cube, exact on the rotation core.
  add("rotation_intertwines_D",
      core_masked_max(Om * D - omega * (D * Om), core2));
  {
    const Matrix Om3 = Om * Om * Om;
    double r = 0.0;
    for (int j = 0; j < b2.size(); ++j) {
      if (!core2[j]) continue;
      Vector col = Om3.col(j);
      col(j) -= 1.0;
      r = std::max(r, col.cwiseAbs().maxCoeff());
    }
    add("rotation_cubed_is_identity", r);
  }

  // Antilinear conjugation Q D Q = conj(D) is matrix symmetry of D.
  add("antilinear_q_symmetry", full_max(D - D.transpose()));

  // Component swap anti-commutes with D; an exact box bijection.
  {
    const Matrix E = make_E_swap(b2).matrix();
    add("component_swap_anticommutes_D", full_max(E * D + D * E));
  }

  // The independently assembled adjoint agrees with the matrix adjoint.
  {
    const Matrix Dk = assemble_D(alpha, pot, b2, k).mat;
    const Matrix Dk_adj =
        assemble_D_adjoint(alpha, pot, b2, std::conj(k)).mat;
    add("independent_adjoint_assembly", full_max(Dk_adj - Dk.adjoint()));
  }

  // Translation symmetry: identity on the periodic sector, a constant phase
  // e^{i<k,gamma>} on the k = K sector.
  {
    double r0 = 0.0, rK = 0.0;
    FrequencyBasis bK(N, Spinor::two,
                      {cplx{0.0, 0.0}, cplx{2.0 * K_point, 0.0}});
    for (const cplx g : {cplx{1.0, 0.0}, omega}) {
      const SymmetryOperator L0 = make_translation_L(b2, g);
      const SymmetryOperator LK = make_translation_L(bK, g);
      const cplx expect = std::polar(1.0, pairing(cplx{K_point, 0.0}, g));
      for (int j = 0; j < b2.size(); ++j) {
        r0 = std::max(r0, std::abs(L0.phase[j] - cplx{1.0, 0.0}));
        rK = std::max(rK, std::abs(LK.phase[j] - expect));
      }
    }
    add("translation_fixes_periodic_sector", r0);
    add("translation_eigenvalue_on_K_sector", rK);
  }

  // Component swap sends the k = K sector basis to the k = -K one.
  {
    FrequencyBasis bK(N, Spinor::two,
                      {cplx{0.0, 0.0}, cplx{2.0 * K_point, 0.0}});
    const SymmetryOperator E = make_E_swap(bK);
    add("component_swap_maps_K_sectors",
        std::abs(E.dst.offset(1) + 2.0 * K_point) + std::abs(E.dst.offset(2)));
  }

  // Four-spinor relations for the Hamiltonian.
  {
    FrequencyBasis b4(N, Spinor::four);
    const std::vector<bool> core4 = rotation_core(b4);
    const Matrix C4 = make_rotation_C(b4).matrix();
    const Matrix W = make_chiral_W(b4).matrix();
    const Matrix H0 = assemble_Hk(alpha, pot, b4, cplx{0.0, 0.0}, 0.0).mat;
    const Matrix Hm = assemble_Hk(alpha, pot, b4, cplx{0.0, 0.0}, 0.35).mat;
    const Matrix Hk = assemble_Hk(alpha, pot, b4, k, 0.35).mat;
    add("rotation_commutes_hamiltonian",
        core_masked_max(C4 * Hm - Hm * C4, core4));
    add("chiral_grading_anticommutes_massless", full_max(W * H0 + H0 * W));
    add("chiral_rotation_commute", full_max(W * C4 - C4 * W));
    add("hamiltonian_hermitian", full_max(Hk - Hk.adjoint()));
  }

  // Rotation sector projectors: idempotent and a resolution of the identity.
  {
    Matrix sum = Matrix::Zero(b2.size(), b2.size());
    double idem = 0.0;
    for (int p = 0; p < 3; ++p) {
      const Matrix P = rotation_sector_projector(b2, p).mat;
      idem = std::max(idem, full_max(P * P - P));
      sum += P;
    }
    add("sector_projectors_idempotent", idem);
    add("sector_projectors_resolve_identity",
        full_max(sum - Matrix::Identity(b2.size(), b2.size())));
  }

  return rep;
}

}  // namespace ctbg
