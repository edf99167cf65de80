#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ctbg/operators.hpp"
#include "ctbg/spectra.hpp"
#include "helpers.hpp"

using namespace ctbg;
using testutil::rand_cplx;

namespace {

// First magic coupling of the stacking potential, machine-stable from
// truncation 8 upward.
constexpr double alpha1 = 0.58566355838955875;

double dist_mod_dual(cplx a, cplx b) {
  double best = 1e300;
  for (long m = -2; m <= 2; ++m)
    for (long n = -2; n <= 2; ++n)
      best = std::min(best, std::abs(a - b - Lattice::dual().point(m, n)));
  return best;
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("free bands reproduce the lattice distances") {
    const PotentialPair pot = build_bm();
    CHECK(bands(0.0, pot, 0.0, 1, 6)[0] ==
          doctest::Approx(4.0 * pi / 3.0).epsilon(1e-12));

    const cplx k{0.27, -0.42};
    const FrequencyBasis b(5, Spinor::two);
    std::vector<double> dist;
    for (int i = 0; i < b.size(); ++i)
      dist.push_back(std::abs(b.frequency(i) + k));
    std::sort(dist.begin(), dist.end());
    const auto e = bands(0.0, pot, k, 5, 5);
    for (int j = 0; j < 5; ++j)
      CHECK(e[size_t(j)] == doctest::Approx(dist[size_t(j)]).epsilon(1e-12));

    CHECK_THROWS_AS(bands(0.0, pot, k, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(bands(0.0, pot, k, 200, 4), std::invalid_argument);
  }

  TEST_CASE("bands agree with a reference decomposition") {
    const PotentialPair pot = build_theta_family(0.9);
    const cplx alpha{0.37, 0.2}, k{0.15, 0.08};
    const FrequencyBasis b(4, Spinor::two);
    Eigen::JacobiSVD<Matrix> ref(assemble_D(alpha, pot, b, k).mat);
    const auto e = bands(alpha, pot, k, 6, 4);
    REQUIRE(e.size() == 6);
    const int n = int(ref.singularValues().size());
    for (int j = 0; j < 6; ++j) {
      CHECK(e[size_t(j)] ==
            doctest::Approx(ref.singularValues()[n - 1 - j]).epsilon(1e-11));
      if (j > 0) CHECK(e[size_t(j)] >= e[size_t(j - 1)]);
    }
  }

  TEST_CASE("bands are periodic and rotation symmetric") {
    const PotentialPair pot = build_bm();
    const cplx Q1 = dual_frame()[0];
    for (const cplx k : {cplx{0.21, 0.13}, cplx{-0.43, 0.52}, cplx{1.1, -0.4}}) {
      const double e = bands(0.4, pot, k, 1, 8)[0];
      CHECK(std::abs(bands(0.4, pot, k + Q1, 1, 8)[0] - e) < 1e-12);
      CHECK(std::abs(bands(0.4, pot, omega * k, 1, 8)[0] - e) < 1e-12);
    }
  }

  TEST_CASE("refinement drives the first band to zero") {
    const PotentialPair pot = build_bm();
    const RefineResult r = refine_magic(0.5857, pot, 12);
    CHECK(r.converged);
    CHECK(r.residual < 1e-10);
    CHECK(r.alpha.imag() == 0.0);
    CHECK(std::abs(r.alpha.real() - alpha1) < 1e-12);

    // Probe independence of the refined root.
    for (const cplx probe : {cplx{-0.22, 0.45}, cplx{0.77, -0.31}}) {
      const RefineResult rp = refine_magic(0.5857, pot, 12, probe);
      CHECK(rp.converged);
      CHECK(std::abs(rp.alpha - r.alpha) < 1e-12);
    }

    // The mirrored start converges to the mirrored root.
    const RefineResult rm = refine_magic(-0.5857, pot, 12);
    CHECK(rm.converged);
    CHECK(std::abs(rm.alpha.real() + alpha1) < 1e-12);

    // Far from the magic set the polish cannot converge.
    const RefineResult bad = refine_magic(0.3, pot, 10);
    CHECK(!bad.converged);
    CHECK(bad.residual > 0.01);
    CHECK(std::abs(bad.alpha - 0.3) <= 0.1 + 1e-12);
  }

  TEST_CASE("magic angle detection through the compact operator") {
    const PotentialPair pot = build_bm();
    const MagicAngleSet set = magic_angles(pot, 10);
    REQUIRE(set.angles.size() == 2);
    CHECK(set.trunc == 10);
    const MagicCandidate& plus = set.angles[0];
    const MagicCandidate& minus = set.angles[1];
    CHECK(plus.alpha.real() > 0.0);
    CHECK(std::abs(plus.alpha.imag()) < 1e-10);
    CHECK(std::abs(plus.alpha.real() - alpha1) < 1e-10);
    // The negative candidate transfers exactly, never re-refined.
    CHECK(minus.alpha == -plus.alpha);
    CHECK(minus.residual == plus.residual);
    for (const auto& m : set.angles) {
      CHECK(m.converged);
      CHECK(m.residual < 1e-10);
      CHECK(m.multiplicity == 1);
    }

    CHECK_THROWS_AS(magic_angles(pot, 8, cplx{0.31, 0.17}, 0),
                    std::invalid_argument);
    bool threw = false;
    try {
      magic_angles(pot, 8, K_point);
    } catch (const std::runtime_error& e) {
      threw = true;
      CHECK(std::string(e.what()).find("magic candidate eigensolve") == 0);
    }
    CHECK(threw);
  }

  TEST_CASE("kernel dimensions at and away from protected momenta") {
    const PotentialPair pot = build_bm();
    const cplx probe{0.31, 0.17};
    CHECK(kernel_dim(0.4, pot, probe, 10) == 0);
    CHECK(kernel_dim(0.4, pot, K_point, 10) == 1);
    CHECK(kernel_dim(0.0, pot, K_point, 10) == 1);
    CHECK(kernel_dim(0.4, pot, -K_point, 10) == 1);

    std::mt19937 rng(71);
    for (int it = 0; it < 3; ++it)
      CHECK(kernel_dim(alpha1, pot, rand_cplx(rng, 1.2), 10) == 1);
  }

  TEST_CASE("flatness scan separates magic from generic couplings") {
    const PotentialPair pot = build_bm();
    const FlatnessResult flat = flatness_scan(alpha1, pot, 6, 8);
    CHECK(flat.grid.n == 6);
    CHECK(flat.grid.offset);
    REQUIRE(flat.E1.size() == 36);
    REQUIRE(flat.E2.size() == 36);
    CHECK(flat.max_E1 < 1e-10);
    CHECK(flat.min_E2 > 1.0);

    const FlatnessResult off = flatness_scan(0.3, pot, 6, 8);
    CHECK(off.max_E1 > 0.1);
    CHECK(off.min_E2 > 1.0);
    CHECK(dist_mod_dual(off.argmax_k, K_point) > 0.2);
    CHECK(dist_mod_dual(off.argmax_k, -K_point) > 0.2);
  }

  TEST_CASE("rescaled band regression and the protected zeros") {
    const PotentialPair pot = build_bm();
    const RescaledBand rb = rescaled_band(0.58, pot, 6, 8);
    CHECK(rb.dist_u == doctest::Approx(0.73638378626627343).epsilon(1e-9));
    CHECK(rb.dist_du == doctest::Approx(0.56414187230714108).epsilon(1e-9));
    double mx_e = 0.0, mx_u = 0.0, mx_du = 0.0;
    for (int i = 0; i < 36; ++i) {
      mx_e = std::max(mx_e, rb.E1_hat[size_t(i)]);
      mx_u = std::max(mx_u, rb.comp_u[size_t(i)]);
      mx_du = std::max(mx_du, rb.comp_du[size_t(i)]);
    }
    CHECK(mx_e == 1.0);
    CHECK(mx_u == 1.0);
    CHECK(mx_du == 1.0);
    // The plain 6-grid contains both protected momenta; the band vanishes
    // there for every coupling.
    int found = 0;
    for (int i = 0; i < 36; ++i) {
      const cplx k = rb.grid.k[size_t(i)];
      if (dist_mod_dual(k, K_point) < 1e-9 || dist_mod_dual(k, -K_point) < 1e-9) {
        ++found;
        CHECK(rb.E1_hat[size_t(i)] < 1e-7);
      }
    }
    CHECK(found == 2);

    const RefineResult r8 = refine_magic(0.5857, pot, 8);
    REQUIRE(r8.converged);
    CHECK_THROWS_AS(rescaled_band(r8.alpha, pot, 6, 8), std::runtime_error);
  }

  TEST_CASE("alpha derivative of the first band at a magic coupling") {
    const PotentialPair pot = build_bm();
    const RefineResult r = refine_magic(0.5857, pot, 10);
    REQUIRE(r.converged);
    const cplx probe{0.31, 0.17};

    const double dP = dE1_dalpha(r.alpha, pot, probe, 10);
    const double h = 1e-4;
    const double fd = (bands(r.alpha + h, pot, probe, 1, 10)[0] +
                       bands(r.alpha - h, pot, probe, 1, 10)[0]) /
                      (2.0 * h);
    CHECK(std::abs(dP - fd) < 1e-6 * fd);

    // The protected flat value at +-K does not move with alpha; the largest
    // slope sits at the cell center.
    CHECK(dE1_dalpha(r.alpha, pot, K_point, 10) < 1e-10);
    CHECK(dE1_dalpha(r.alpha, pot, -K_point, 10) < 1e-10);
    CHECK(dE1_dalpha(r.alpha, pot, 0.0, 10) > dP);

    CHECK_THROWS_AS(dE1_dalpha(0.4, pot, probe, 10), std::runtime_error);
  }

  TEST_CASE("magic root is stable under truncation growth") {
    const PotentialPair pot = build_bm();
    const RefineResult a = refine_magic(alpha1, pot, 16);
    const RefineResult b = refine_magic(alpha1, pot, 20);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(std::abs(a.alpha - b.alpha) < 1e-9);
    CHECK(std::abs(a.alpha.real() - alpha1) < 1e-12);
  }
}
