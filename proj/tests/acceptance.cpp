// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.  Heavier than the unit suites; runs in minutes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctbg/bundle.hpp"
#include "ctbg/grid.hpp"
#include "ctbg/linalg.hpp"
#include "ctbg/operators.hpp"
#include "ctbg/potential.hpp"
#include "ctbg/protected_states.hpp"
#include "ctbg/spectra.hpp"
#include "ctbg/theta.hpp"
#include "helpers.hpp"

using namespace ctbg;
using clk = std::chrono::steady_clock;

namespace {

double secs(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

cplx cell_point(std::mt19937& rng) {
  const auto [Q1, Q2] = dual_frame();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s = u(rng), t = u(rng);
  return s * Q1 + t * Q2;
}

}  // namespace

int main() {
  int failures = 0;
  const auto run = [&](const std::string& name,
                       const std::function<std::pair<bool, std::string>()>& fn) {
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = fn();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s %s (%s)\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
  };

  const PotentialPair pot = build_bm();
  const RefineResult mr = refine_magic(cplx{0.5857, 0.0}, pot, 12);
  if (!mr.converged) {
    std::printf("FAIL setup (magic refinement did not converge)\n");
    return 1;
  }

  run("magic-angle-detection", [&] {
    const auto t0 = clk::now();
    const MagicAngleSet set = magic_angles(pot, 16);
    const double dt = secs(t0, clk::now());
    double apos = 0.0;
    bool conv = false;
    for (const auto& c : set.angles)
      if (c.alpha.real() > 0.0 && std::abs(c.alpha.imag()) < 1e-9) {
        apos = c.alpha.real();
        conv = c.converged;
      }
    const bool ok =
        conv && std::abs(apos - 0.586) <= 0.002 && dt < 60.0;
    return std::make_pair(ok, fmt("alpha=%.12g, %.1fs", apos, dt));
  });

  run("tk-spectrum-k-independence", [&] {
    const FrequencyBasis basis(12, Spinor::two);
    const std::vector<cplx> probes{{0.31, 0.17}, {-0.22, 0.45}, {0.77, -0.31}};
    std::vector<std::vector<double>> tops;
    for (const cplx k : probes) {
      const Vector mu = eigenvalues(assemble_Tk_block_product(pot, basis, k));
      std::vector<double> lam;
      for (int i = 0; i < mu.size(); ++i) {
        lam.push_back(std::sqrt(std::abs(mu[i])));
        lam.push_back(std::sqrt(std::abs(mu[i])));
      }
      std::sort(lam.rbegin(), lam.rend());
      lam.resize(10);
      tops.push_back(std::move(lam));
    }
    double worst = 0.0;
    for (std::size_t p = 1; p < tops.size(); ++p)
      for (int t = 0; t < 10; ++t)
        worst = std::max(worst,
                         std::abs(tops[p][std::size_t(t)] - tops[0][std::size_t(t)]));
    return std::make_pair(worst < 1e-8, fmt("top-10 spread %.3g", worst));
  });

  double min_E2_at_magic = 0.0;
  run("flat-band-at-magic", [&] {
    const FlatnessResult fm = flatness_scan(mr.alpha, pot, 12, 12);
    const FlatnessResult fg = flatness_scan(cplx{0.3, 0.0}, pot, 12, 12);
    min_E2_at_magic = fm.min_E2;
    const bool ok =
        fm.max_E1 < 1e-5 && fm.min_E2 > 0.1 && fg.max_E1 > 0.01;
    return std::make_pair(
        ok, fmt("max E1=%.3g, min E2=%.3g, generic max E1=%.3g", fm.max_E1,
                fm.min_E2, fg.max_E1));
  });

  run("protected-states-at-dirac-points", [&] {
    const std::vector<cplx> alphas{{0.3, 0.0}, {0.586, 0.0}, {0.7, 0.2}};
    double worst = 0.0;
    std::vector<double> vals(alphas.size() * 2);
    parallel_for(int(vals.size()), [&](int i) {
      const cplx a = alphas[std::size_t(i / 2)];
      const cplx k = (i % 2) ? cplx{-K_point, 0.0} : cplx{K_point, 0.0};
      vals[std::size_t(i)] = bands(a, pot, k, 1, 12)[0];
    });
    for (double v : vals) worst = std::max(worst, v);
    return std::make_pair(worst < 1e-10, fmt("worst E1=%.3g", worst));
  });

  run("band-symmetries", [&] {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick_j(1, 5);
    const auto [Q1, Q2] = dual_frame();
    const int pairs = 50;
    std::vector<cplx> ks(pairs);
    std::vector<int> js(pairs);
    for (int i = 0; i < pairs; ++i) {
      ks[std::size_t(i)] = cell_point(rng);
      js[std::size_t(i)] = pick_j(rng);
    }
    std::vector<double> diffs(pairs);
    parallel_for(pairs, [&](int i) {
      const cplx k = ks[std::size_t(i)];
      const int j = js[std::size_t(i)] - 1;
      const auto E = bands(cplx{0.3, 0.0}, pot, k, 5, 10);
      const auto Er = bands(cplx{0.3, 0.0}, pot, omega * k, 5, 10);
      const auto Ep = bands(cplx{0.3, 0.0}, pot, k + Q1, 5, 10);
      diffs[std::size_t(i)] =
          std::max(std::abs(E[std::size_t(j)] - Er[std::size_t(j)]),
                   std::abs(E[std::size_t(j)] - Ep[std::size_t(j)]));
    });
    const double worst = *std::max_element(diffs.begin(), diffs.end());
    return std::make_pair(worst < 1e-8, fmt("worst asymmetry %.3g", worst));
  });

  run("kernel-simplicity-at-magic", [&] {
    std::mt19937 rng(11);
    bool ok = min_E2_at_magic > 0.0;
    int dims[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 5; ++i) {
      dims[i] = kernel_dim(mr.alpha, pot, cell_point(rng), 12);
      ok = ok && dims[i] == 1;
    }
    return std::make_pair(ok, fmt("dims %d%d%d%d%d, min E2=%.3g", dims[0],
                                  dims[1], dims[2], dims[3], dims[4],
                                  min_E2_at_magic));
  });

  run("zero-locations", [&] {
    const BlochState uMK = protected_state(mr.alpha, pot, -K_point, 12);
    const auto zs = locate_zeros(uMK, 48);
    bool ok = zs.size() == 1 && zs[0].order == 1;
    double d_protected = 1e300;
    if (ok) d_protected = testutil::dist_mod_lattice(zs[0].location, z_S);
    ok = ok && d_protected < 1e-6;

    const cplx kg{0.3, 0.2};
    const KernelState ks = kernel_state_at_k(mr.alpha, pot, kg, 12);
    const auto zk = locate_zeros(ks.state, 96);
    double d_moving = 1e300;
    for (const auto& rec : zk)
      d_moving = std::min(d_moving,
                          testutil::dist_mod_lattice(rec.location, zmap(kg)));
    ok = ok && d_moving < 1e-5;
    return std::make_pair(
        ok, fmt("protected-zero dist %.3g, moving-zero dist %.3g", d_protected,
                d_moving));
  });

  run("zero-test-vs-flatness-sweep", [&] {
    std::vector<double> alphas;
    for (int i = 0; i <= 90; ++i) alphas.push_back(0.10 + 0.01 * i);
    alphas.push_back(mr.alpha.real());  // the one magic point in range
    const int n = int(alphas.size());
    std::vector<int> by_zero(n), by_flat(n);
    parallel_for(n, [&](int i) {
      const cplx a{alphas[std::size_t(i)], 0.0};
      by_zero[std::size_t(i)] = flatband_zero_test(a, pot, 8).magic ? 1 : 0;
      by_flat[std::size_t(i)] =
          flatness_scan(a, pot, 3, 8).max_E1 < 1e-4 ? 1 : 0;
    });
    int disagree = 0, magic_hits = 0;
    for (int i = 0; i < n; ++i) {
      if (by_zero[std::size_t(i)] != by_flat[std::size_t(i)]) ++disagree;
      magic_hits += by_zero[std::size_t(i)];
    }
    const bool ok = disagree == 0 && by_zero[std::size_t(n - 1)] == 1 &&
                    magic_hits == 1;
    return std::make_pair(
        ok, fmt("%d alphas, %d disagreements, %d magic verdicts", n, disagree,
                magic_hits));
  });

  run("wronskian-constancy-and-dip", [&] {
    const std::vector<cplx> sA{{0.11, 0.23}, {-0.31, 0.17}, {0.05, -0.29}};
    const std::vector<cplx> sB{{0.41, 0.37}, {-0.23, -0.11}};
    const cplx wa = wronskian(cplx{0.3, 0.0}, pot, 12, sA);
    const cplx wb = wronskian(cplx{0.3, 0.0}, pot, 12, sB);
    const double dev = std::abs(wa - wb);
    const double w0 = std::abs(wronskian(cplx{0.0, 0.0}, pot, 12, sA));
    const double wm = std::abs(wronskian(mr.alpha, pot, 12, sA));
    const bool ok = dev < 1e-9 * (1.0 + std::abs(wa)) && wm <= 1e-4 * w0;
    return std::make_pair(
        ok, fmt("z-dev %.3g, |v(0)|=%.3g, dip ratio %.3g", dev, w0, wm / w0));
  });

  const BlochFamily fam = make_family(mr.alpha, pot, 12, 96);

  run("chern-number-minus-one", [&] {
    const PlaquetteResult p12 = chern_plaquette(fam, 12, false);
    const PlaquetteResult p24 = chern_plaquette(fam, 24, false);
    const PlaquetteResult conj = chern_plaquette(fam, 12, true);
    const double ci = chern_integral(fam, 24);
    const double cb = chern_boundary(fam);
    const bool ok = p12.chern == -1 && p24.chern == -1 &&
                    p12.residual < 1e-9 && p24.residual < 1e-9 &&
                    std::abs(ci + 1.0) < 1e-2 && std::abs(cb + 1.0) < 1e-6 &&
                    conj.chern == 1;
    return std::make_pair(
        ok, fmt("plaquette %d/%d, integral %.9g, boundary %.9g, conjugate %d",
                p12.chern, p24.chern, ci, cb, conj.chern));
  });

  run("curvature-symmetry-and-extrema", [&] {
    double rot_dev = 0.0;
    for (const cplx k : {cplx{0.4, 0.2}, cplx{-0.7, 0.5}, cplx{1.1, -0.3}})
      rot_dev = std::max(rot_dev, std::abs(curvature_analytic(fam, k) -
                                           curvature_analytic(fam, omega * k)));

    const CurvatureReport rep = curvature_report(fam, 12, 25);
    const auto [Q1, Q2] = dual_frame();
    const double step = std::abs(Q1) / 12.0;
    double gmax = 0.0;
    for (int is = 0; is < 12; ++is)
      for (int it = 0; it + 1 < 12; ++it) {
        gmax = std::max(gmax,
                        std::abs(rep.H(is, it + 1) - rep.H(is, it)) / step);
        gmax = std::max(gmax,
                        std::abs(rep.H(it + 1, is) - rep.H(it, is)) / step);
      }
    const double gsym =
        std::max(rep.grad_Gamma, std::max(rep.grad_K, rep.grad_Kprime));
    const bool ok = rot_dev < 1e-6 && gsym < 1e-3 * gmax &&
                    rep.H_Gamma >= rep.max_H - 1e-9 &&
                    rep.H_K <= rep.min_H + 1e-9 &&
                    std::abs(rep.H_K - rep.H_Kprime) < 1e-9;
    return std::make_pair(
        ok, fmt("rot dev %.3g, sym grads %.3g vs max %.3g, H: %.6g..%.6g",
                rot_dev, gsym, gmax, rep.H_K, rep.H_Gamma));
  });

  run("band-derivative-formula", [&] {
    const KGrid g = KGrid::make(6, true);
    const double h = 1e-4;
    std::vector<double> an(g.k.size()), fd(g.k.size());
    parallel_for(int(g.k.size()), [&](int i) {
      const cplx k = g.k[std::size_t(i)];
      an[std::size_t(i)] = dE1_dalpha(mr.alpha, pot, k, 12);
      fd[std::size_t(i)] = (bands(mr.alpha + h, pot, k, 1, 12)[0] +
                            bands(mr.alpha - h, pot, k, 1, 12)[0]) /
                           (2.0 * h);
    });
    double worst = 0.0, grid_max = 0.0;
    for (std::size_t i = 0; i < an.size(); ++i) {
      worst = std::max(worst, std::abs(an[i] - fd[i]) / std::max(fd[i], 1e-12));
      grid_max = std::max(grid_max, an[i]);
    }
    const double dG = dE1_dalpha(mr.alpha, pot, cplx{0.0, 0.0}, 12);
    const double dK = std::max(dE1_dalpha(mr.alpha, pot, K_point, 12),
                               dE1_dalpha(mr.alpha, pot, -K_point, 12));
    const bool ok = worst < 1e-3 && dK < 1e-8 && dG >= grid_max;
    return std::make_pair(
        ok, fmt("worst rel %.3g, slope at K %.3g, center %.6g >= grid %.6g",
                worst, dK, dG, grid_max));
  });

  run("theta-green-oracle", [&] {
    const ThetaEvaluator th;
    double tid = 0.0;
    for (const cplx z : {cplx{0.13, 0.31}, cplx{-0.42, 0.27}, cplx{0.55, -0.18}}) {
      tid = std::max(tid, std::abs(th.theta(-z) + th.theta(z)));
      tid = std::max(tid, std::abs(th.theta(z + 1.0) + th.theta(z)));
      const cplx factor =
          -std::exp(-cplx{0.0, pi} * omega - 2.0 * cplx{0.0, pi} * z);
      tid = std::max(tid, std::abs(th.theta(z + omega) - factor * th.theta(z)));
    }
    double green = 0.0;
    for (const cplx k : {cplx{0.31, 0.17}, cplx{-1.1, 0.4}})
      for (const cplx z : {cplx{0.21, 0.33}, cplx{-0.37, 0.51}})
        green = std::max(green,
                         std::abs(green_fourier(k, z) - th.F(k, z) / th.c(k)));
    const bool ok = tid < 1e-12 && green < 1e-6;
    return std::make_pair(ok, fmt("identities %.3g, kernel match %.3g", tid,
                                  green));
  });

  run("free-coupling-analytics", [&] {
    const auto [Q1, Q2] = dual_frame();
    const cplx zero{0.0, 0.0};
    const double e00 = bands(zero, pot, zero, 1, 12)[0];
    const int dK = kernel_dim(zero, pot, K_point, 12);
    const int dMK = kernel_dim(zero, pot, -K_point, 12);
    const int dKQ = kernel_dim(zero, pot, K_point + Q1, 12);
    const double away = bands(zero, pot, default_probe, 1, 12)[0];
    const bool ok = std::abs(e00 - K_point) < 1e-12 && dK == 1 && dMK == 1 &&
                    dKQ == 1 && away > 0.1;
    return std::make_pair(
        ok, fmt("E1(0,0)-4pi/3=%.3g, dims %d/%d/%d, off-kernel E1=%.3g",
                e00 - K_point, dK, dMK, dKQ, away));
  });

  run("theta-family-properties", [&] {
    double sym = 0.0, closure = 0.0, res = 0.0;
    bool conv = true;
    for (const double th : {0.1, 0.7, 1.3, 2.0, 2.9}) {
      const PotentialPair tp = build_theta_family(th);
      sym = std::max(sym, validate_symmetries(tp, false).worst());
      const MagicAngleSet set = magic_angles(tp, 8, default_probe, 4);
      for (const auto& c : set.angles) {
        conv = conv && c.converged;
        res = std::max(res, c.residual);
        double best = 1e300;
        for (const auto& d : set.angles)
          best = std::min(best, std::abs(d.alpha + c.alpha));
        closure = std::max(closure, best);
      }
    }
    const bool ok = sym < 1e-10 && conv && res < 1e-8 && closure < 1e-9;
    return std::make_pair(
        ok, fmt("symmetry %.3g, negation closure %.3g, residual %.3g", sym,
                closure, res));
  });

  std::printf("acceptance: %d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
