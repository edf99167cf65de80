#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ctbg/linalg.hpp"
#include "ctbg/operators.hpp"
#include "ctbg/potential.hpp"
#include "ctbg/spectra.hpp"
#include "ctbg/symmetry.hpp"
#include "helpers.hpp"

using namespace ctbg;
using testutil::rand_cplx;

namespace {

Vector random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rand_cplx(rng, 1.0);
  return v;
}

std::vector<double> top_moduli(const Vector& vals, int count) {
  std::vector<double> mags(vals.size());
  for (int i = 0; i < vals.size(); ++i) mags[i] = std::abs(vals[i]);
  std::sort(mags.rbegin(), mags.rend());
  mags.resize(size_t(count));
  return mags;
}

}  // namespace

TEST_SUITE("basis_operators") {
  TEST_CASE("placeholder basis and constructor guards") {
    const FrequencyBasis empty;
    CHECK(empty.size() == 0);
    CHECK(empty.ncomp() == 0);
    CHECK_THROWS_AS(FrequencyBasis(0, Spinor::two), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyBasis(2, Spinor::two, {cplx{0, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FrequencyBasis(400, Spinor::four), std::runtime_error);
  }

  TEST_CASE("layout and indexing") {
    const FrequencyBasis b4(2, Spinor::four);
    CHECK(b4.per_comp() == 25);
    CHECK(b4.size() == 100);
    CHECK(b4.ncomp() == 4);
    const FrequencyBasis b2(3, Spinor::two);
    CHECK(b2.size() == 2 * 49);
    CHECK(std::abs(b2.offset(1) + K_point) < 1e-15);
    CHECK(std::abs(b2.offset(2) - K_point) < 1e-15);
    CHECK(std::abs(b4.offset(3) + K_point) < 1e-15);
    CHECK(std::abs(b4.offset(4) - K_point) < 1e-15);

    const Lattice& dual = Lattice::dual();
    for (int idx = 0; idx < b4.size(); ++idx) {
      const BasisEntry e = b4.entry(idx);
      CHECK(b4.index(e.component, e.m, e.n) == idx);
      CHECK(e.offset == b4.offset(e.component));
      CHECK(std::abs(e.freq - (e.offset + dual.point(e.m, e.n))) < 1e-15);
      CHECK(std::abs(b4.frequency(idx) - e.freq) < 1e-15);
    }
    CHECK(b4.index(1, 3, 0) == -1);
    CHECK(b4.index(2, 0, -3) == -1);
    CHECK(!b4.in_box(-3, 1));
    CHECK_THROWS_AS(b4.entry(-1), std::out_of_range);
    CHECK_THROWS_AS(b4.entry(b4.size()), std::out_of_range);
  }

  TEST_CASE("default sector frequencies sit in the two momentum classes") {
    const FrequencyBasis b(3, Spinor::two);
    const Lattice& dual = Lattice::dual();
    for (int idx = 0; idx < b.size(); ++idx) {
      const BasisEntry e = b.entry(idx);
      const cplx shifted = e.freq + (e.component == 1 ? K_point : -K_point);
      CHECK(dual.round_point(shifted).has_value());
    }
  }

  TEST_CASE("same_layout compares truncation, spinor and offsets") {
    const FrequencyBasis a(3, Spinor::two);
    CHECK(a.same_layout(FrequencyBasis(3, Spinor::two)));
    CHECK(!a.same_layout(FrequencyBasis(4, Spinor::two)));
    CHECK(!a.same_layout(FrequencyBasis(3, Spinor::four)));
    const FrequencyBasis nudged(
        3, Spinor::two, {cplx{-K_point, 1e-12}, cplx{K_point, 0.0}});
    CHECK(a.same_layout(nudged));
    const FrequencyBasis shifted(
        3, Spinor::two, {cplx{-K_point, 1e-6}, cplx{K_point, 0.0}});
    CHECK(!a.same_layout(shifted));
    CHECK(a.same_layout(shifted, 1e-5));
  }

  TEST_CASE("free operator is diagonal with an exact zero mode at K") {
    const PotentialPair pot = build_bm();
    const FrequencyBasis b(3, Spinor::two);
    const cplx k{0.37, 0.21};
    const Matrix D0 = assemble_D(0.0, pot, b, k).mat;
    for (int i = 0; i < b.size(); ++i) {
      CHECK(std::abs(D0(i, i) - (b.frequency(i) + k)) < 1e-15);
      for (int j = 0; j < b.size(); ++j)
        if (i != j) CHECK(D0(i, j) == cplx{0.0, 0.0});
    }

    const Matrix Dz = assemble_D(0.0, pot, b, 0.0).mat;
    double mn = 1e300;
    for (int i = 0; i < b.size(); ++i) mn = std::min(mn, std::abs(Dz(i, i)));
    CHECK(mn == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));

    const Matrix DK = assemble_D(0.0, pot, b, K_point).mat;
    int zeros = 0;
    for (int i = 0; i < b.size(); ++i)
      if (std::abs(DK(i, i)) < 1e-12) ++zeros;
    CHECK(zeros == 1);
    const Eigen::VectorXd sv = singular_values(DK);
    CHECK(sv[sv.size() - 1] < 1e-12);
    CHECK(sv[sv.size() - 2] > 1.0);
  }

  TEST_CASE("potential coupling is linear in alpha") {
    const FrequencyBasis b(4, Spinor::two);
    const cplx alpha{0.37, 0.29}, k{-0.11, 0.43};
    for (const PotentialPair& pot : {build_bm(), build_theta_family(0.8)}) {
      const Matrix DA = assemble_D(alpha, pot, b, k).mat;
      const Matrix D0 = assemble_D(0.0, pot, b, k).mat;
      const Matrix V = assemble_V(pot, b).mat;
      CHECK((DA - D0 - alpha * V).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(assemble_D(alpha, build_bm(), FrequencyBasis(2, Spinor::four), k),
                    std::invalid_argument);
  }

  TEST_CASE("assembled operator is complex symmetric") {
    std::mt19937 rng(77);
    const FrequencyBasis b(4, Spinor::two);
    for (const PotentialPair& pot : {build_bm(), build_theta_family(1.3)}) {
      const cplx alpha = rand_cplx(rng, 0.8), k = rand_cplx(rng, 1.5);
      const Matrix D = assemble_D(alpha, pot, b, k).mat;
      CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-13);

      // Antilinear conjugation realizes the formal adjoint of a symmetric
      // operator: Q (D+k) Q = conj(D+k) = (D+k)^H entrywise.
      const SymmetryOperator Q = make_Q(b);
      const Vector v = random_vector(b.size(), 123);
      const Vector lhs = Q.apply(D * Q.apply(v));
      const Vector rhs = D.adjoint() * v;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("independently assembled adjoint matches the matrix adjoint") {
    std::mt19937 rng(78);
    const FrequencyBasis b(4, Spinor::two);
    for (const PotentialPair& pot : {build_bm(), build_theta_family(0.6)}) {
      const cplx alpha = rand_cplx(rng, 0.8), k = rand_cplx(rng, 1.5);
      const Matrix D = assemble_D(alpha, pot, b, k).mat;
      const Matrix Dstar = assemble_D_adjoint(alpha, pot, b, std::conj(k)).mat;
      CHECK((Dstar - D.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("hermitian block operator pairs with the singular values") {
    const PotentialPair pot = build_bm();
    const int N = 3;
    const FrequencyBasis b4(N, Spinor::four), b2(N, Spinor::two);
    const cplx alpha{0.41, 0.13}, k{0.2, -0.33};

    const Matrix H0 = assemble_Hk(alpha, pot, b4, k, 0.0).mat;
    CHECK((H0 - H0.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::VectorXd ev = hermitian_eigenvalues(H0);
    const int B = b2.size();
    REQUIRE(ev.size() == 2 * B);
    for (int i = 0; i < B; ++i)
      CHECK(std::abs(ev[i] + ev[2 * B - 1 - i]) < 1e-10 * (1.0 + std::abs(ev[i])));
    Eigen::VectorXd sv = singular_values(assemble_D(alpha, pot, b2, k).mat);
    std::reverse(sv.data(), sv.data() + sv.size());
    for (int i = 0; i < B; ++i)
      CHECK(std::abs(ev[B + i] - sv[i]) < 1e-10 * (1.0 + sv[B - 1]));

    const double mass = 0.37;
    const Eigen::VectorXd evm =
        hermitian_eigenvalues(assemble_Hk(alpha, pot, b4, k, mass).mat);
    for (int i = 0; i < B; ++i) {
      const double expect = std::sqrt(sv[i] * sv[i] + mass * mass);
      CHECK(std::abs(evm[B + i] - expect) < 1e-10 * (1.0 + expect));
      CHECK(std::abs(evm[B - 1 - i] + expect) < 1e-10 * (1.0 + expect));
    }
  }

  TEST_CASE("protected zero mode pins the massive gap edge at K") {
    const PotentialPair pot = build_bm();
    const FrequencyBasis b4(10, Spinor::four);
    const double mass = 0.1;
    for (const cplx alpha : {cplx{0.3, 0.0}, cplx{0.58566355838955875, 0.0}}) {
      const Eigen::VectorXd ev =
          hermitian_eigenvalues(assemble_Hk(alpha, pot, b4, K_point, mass).mat);
      double below = -1e300, above = 1e300;
      for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] < 0.0) below = std::max(below, ev[i]);
        if (ev[i] > 0.0) above = std::min(above, ev[i]);
      }
      CHECK(std::abs(above - mass) < 1e-8);
      CHECK(std::abs(below + mass) < 1e-8);
    }
  }

  TEST_CASE("T_k rejects poles and realizes the row-scaled coupling") {
    const PotentialPair pot = build_bm();
    const FrequencyBasis b(4, Spinor::two);
    bool threw = false;
    try {
      assemble_Tk(pot, b, K_point);
    } catch (const std::runtime_error& e) {
      threw = true;
      CHECK(std::string(e.what()).find("T_k pole") == 0);
    }
    CHECK(threw);
    CHECK_THROWS_AS(assemble_Tk(pot, b, cplx{K_point + 5e-7, 0.0}),
                    std::runtime_error);

    const cplx k{0.31, 0.17};
    Matrix T = assemble_Tk(pot, b, k).mat;
    for (int i = 0; i < b.size(); ++i) T.row(i) *= (b.frequency(i) - k);
    const Matrix V = assemble_V(pot, b).mat;
    CHECK((T - V).cwiseAbs().maxCoeff() < 1e-13 * V.cwiseAbs().maxCoeff());
  }

  TEST_CASE("block product carries the nonzero T_k spectrum") {
    const PotentialPair pot = build_bm();
    const FrequencyBasis b(6, Spinor::two);
    const cplx k{0.31, 0.17};
    const Vector full = eigenvalues(assemble_Tk(pot, b, k).mat);
    const Vector mu = eigenvalues(assemble_Tk_block_product(pot, b, k));

    std::vector<int> order(size_t(mu.size()));
    for (int i = 0; i < mu.size(); ++i) order[size_t(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int c) { return std::abs(mu[a]) > std::abs(mu[c]); });
    for (int t = 0; t < 12; ++t) {
      const cplx root = std::sqrt(mu[order[size_t(t)]]);
      for (const cplx lam : {root, -root}) {
        double best = 1e300;
        for (int i = 0; i < full.size(); ++i)
          best = std::min(best, std::abs(full[i] - lam));
        CHECK(best < 1e-8 * (1.0 + std::abs(lam)));
      }
    }

    // The full spectrum itself is symmetric under negation.
    std::vector<int> big(size_t(full.size()));
    for (int i = 0; i < full.size(); ++i) big[size_t(i)] = i;
    std::sort(big.begin(), big.end(),
              [&](int a, int c) { return std::abs(full[a]) > std::abs(full[c]); });
    for (int t = 0; t < 10; ++t) {
      const cplx lam = full[big[size_t(t)]];
      double best = 1e300;
      for (int i = 0; i < full.size(); ++i)
        best = std::min(best, std::abs(full[i] + lam));
      CHECK(best < 1e-8 * (1.0 + std::abs(lam)));
    }
  }

  TEST_CASE("T_k spectrum is independent of the momentum probe") {
    const PotentialPair pot = build_bm();
    const FrequencyBasis b(12, Spinor::two);
    const std::vector<cplx> probes{{0.31, 0.17}, {-0.22, 0.45}, {0.77, -0.31}};
    std::vector<std::vector<double>> tops;
    for (const cplx k : probes)
      tops.push_back(top_moduli(eigenvalues(assemble_Tk(pot, b, k).mat), 10));
    for (size_t p = 1; p < tops.size(); ++p)
      for (int t = 0; t < 10; ++t)
        CHECK(std::abs(tops[p][size_t(t)] - tops[0][size_t(t)]) < 1e-8);
    // Largest modulus is the reciprocal of the first magic angle.
    CHECK(tops[0][0] == doctest::Approx(1.0 / 0.58566355838955875).epsilon(1e-8));
  }

  TEST_CASE("rotation sector projectors resolve the identity") {
    const FrequencyBasis b(4, Spinor::two);
    const int n = b.size();
    std::vector<Matrix> P;
    for (int p = 0; p < 3; ++p)
      P.push_back(rotation_sector_projector(b, p).mat);
    CHECK((P[0] + P[1] + P[2] - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-13);
    for (int p = 0; p < 3; ++p) {
      CHECK((P[size_t(p)] * P[size_t(p)] - P[size_t(p)]).cwiseAbs().maxCoeff() <
            1e-13);
      for (int q = 0; q < 3; ++q)
        if (q != p)
          CHECK((P[size_t(p)] * P[size_t(q)]).cwiseAbs().maxCoeff() < 1e-13);
    }
    CHECK_THROWS_AS(rotation_sector_projector(b, 3), std::invalid_argument);

    // A free rotation orbit splits evenly across the three sectors.
    Vector delta = Vector::Zero(n);
    delta[b.index(1, 0, 0)] = 1.0;
    for (int p = 0; p < 3; ++p)
      CHECK((P[size_t(p)] * delta).squaredNorm() ==
            doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    const FrequencyBasis b4(3, Spinor::four);
    Matrix S = Matrix::Zero(b4.size(), b4.size());
    for (int p = 0; p < 3; ++p) S += rotation_sector_projector(b4, p).mat;
    CHECK((S - Matrix::Identity(b4.size(), b4.size())).cwiseAbs().maxCoeff() <
          1e-13);
  }

  TEST_CASE("low bands converge in the truncation") {
    const PotentialPair pot = build_bm();
    const cplx k{0.2, 0.1};
    const auto coarse = bands(0.5, pot, k, 4, 12);
    const auto fine = bands(0.5, pot, k, 4, 16);
    REQUIRE(coarse.size() == 4);
    REQUIRE(fine.size() == 4);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(coarse[size_t(i)] - fine[size_t(i)]) < 1e-8);
  }
}
