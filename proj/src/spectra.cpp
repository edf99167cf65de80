#include "ctbg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctbg {

namespace {

Matrix shifted(const Matrix& D0, cplx dk) {
  Matrix A = D0;
  A.diagonal().array() += dk;
  return A;
}

std::vector<double> smallest_sigmas(const Matrix& A, int count,
                                    double rtol = 1e-10) {
  SubspaceOptions o;
  o.rtol = rtol;
  o.block = count + 2;
  const auto pairs = smallest_singular_pairs(A, count, o);
  std::vector<double> s;
  s.reserve(pairs.size());
  for (const auto& p : pairs) s.push_back(p.sigma);
  return s;
}

}  // namespace

std::vector<double> bands(cplx alpha, const PotentialPair& pot, cplx k,
                          int count, int N) {
  FrequencyBasis basis(N, Spinor::two);
  if (count < 1 || count > basis.size())
    throw std::invalid_argument("band count out of range");
  const Matrix A = assemble_D(alpha, pot, basis, k).mat;
  const Eigen::VectorXd s = singular_values(A);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out[size_t(j)] = s(s.size() - 1 - j);
  return out;
}

RefineResult refine_magic(cplx alpha0, const PotentialPair& pot, int N,
                          cplx k_probe) {
  FrequencyBasis basis(N, Spinor::two);
  const Matrix D0 = assemble_D(cplx{0.0, 0.0}, pot, basis, k_probe).mat;
  const Matrix V = assemble_V(pot, basis).mat;
  const bool real_mode = std::abs(alpha0.imag()) < 1e-12;

  RefineResult best{alpha0, std::numeric_limits<double>::infinity(), false, 0};
  cplx alpha = alpha0;
  for (int it = 0; it < 30; ++it) {
    const Matrix A = D0 + alpha * V;
    SubspaceOptions o;
    o.block = 3;
    const auto pairs = smallest_singular_pairs(A, 1, o);
    const double sigma = pairs[0].sigma;
    if (sigma < best.residual) {
      best.residual = sigma;
      best.alpha = alpha;
    }
    best.iterations = it + 1;
    const cplx g = pairs[0].left.dot(V * pairs[0].right);
    cplx step;
    if (real_mode) {
      if (std::abs(g.real()) < 1e-14) break;
      step = cplx{-sigma / g.real(), 0.0};
    } else {
      if (std::abs(g) < 1e-14) break;
      step = -sigma * std::conj(g) / std::norm(g);
    }
    if (std::abs(step) > 0.05) step *= 0.05 / std::abs(step);
    alpha += step;
    if (std::abs(alpha - alpha0) > 0.1) break;  // left the trust region
    if (std::abs(step) < 1e-10) {
      const Matrix Af = D0 + alpha * V;
      const auto fin = smallest_singular_pairs(Af, 1, o);
      best = {alpha, fin[0].sigma, true, it + 1};
      return best;
    }
  }
  return best;  // non-converged: best iterate, flagged
}

int kernel_dim(cplx alpha, const PotentialPair& pot, cplx k, int N,
               double tol) {
  FrequencyBasis basis(N, Spinor::two);
  const Matrix A = assemble_D(alpha, pot, basis, k).mat;
  const double smax = norm2_estimate(A);
  const double thr = tol * smax;
  int probe = 4;
  for (;;) {
    const auto s = smallest_sigmas(A, std::min(probe, basis.size()));
    int dim = 0;
    for (const double v : s)
      if (v < thr) ++dim;
    if (dim < int(s.size()) || int(s.size()) == basis.size()) return dim;
    probe *= 2;  // every probed value was below threshold; widen
  }
}

MagicAngleSet magic_angles(const PotentialPair& pot, int N, cplx k_probe,
                           int count, double search_radius) {
  if (count < 1) throw std::invalid_argument("candidate count must be >= 1");
  FrequencyBasis basis(N, Spinor::two);
  Vector mu;
  try {
    mu = eigenvalues(assemble_Tk_block_product(pot, basis, k_probe));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("magic candidate eigensolve: ") +
                             e.what());
  }

  std::vector<cplx> cands;
  for (int i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i)) < 1e-300) continue;
    const cplx lam = std::sqrt(mu(i));  // Spec T_k = +-sqrt Spec(A B)
    const cplx a = 1.0 / lam;
    if (std::abs(a) <= search_radius) {
      cands.push_back(a);
      cands.push_back(-a);
    }
  }
  auto order = [](cplx a, cplx b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-14 * (ma + mb)) return ma < mb;
    return std::arg(a) < std::arg(b);
  };
  std::sort(cands.begin(), cands.end(), order);
  if (int(cands.size()) > count) cands.resize(size_t(count));

  MagicAngleSet set;
  set.trunc = N;
  set.probe = k_probe;
  std::vector<cplx> refined_from;
  for (const cplx a : cands) {
    // D(-alpha) is unitarily equivalent to D(alpha) by the component sign
    // flip, so a refined candidate transfers exactly to its negative.
    bool mirrored = false;
    for (size_t j = 0; j < refined_from.size(); ++j) {
      if (refined_from[j] == -a) {
        MagicCandidate m = set.angles[j];
        m.alpha = -m.alpha;
        set.angles.push_back(m);
        refined_from.push_back(a);
        mirrored = true;
        break;
      }
    }
    if (mirrored) continue;
    const RefineResult r = refine_magic(a, pot, N, k_probe);
    MagicCandidate m;
    m.alpha = r.alpha;
    m.residual = r.residual;
    m.converged = r.converged;
    m.multiplicity = kernel_dim(r.alpha, pot, k_probe, N);
    set.angles.push_back(m);
    refined_from.push_back(a);
  }
  std::sort(set.angles.begin(), set.angles.end(),
            [&](const MagicCandidate& x, const MagicCandidate& y) {
              return order(x.alpha, y.alpha);
            });
  return set;
}

FlatnessResult flatness_scan(cplx alpha, const PotentialPair& pot, int n,
                             int N) {
  FrequencyBasis basis(N, Spinor::two);
  const Matrix D0 = assemble_D(alpha, pot, basis, cplx{0.0, 0.0}).mat;
  FlatnessResult res;
  res.grid = KGrid::make(n, true);
  const int total = n * n;
  res.E1.assign(size_t(total), 0.0);
  res.E2.assign(size_t(total), 0.0);
  parallel_for(total, [&](int i) {
    const auto s = smallest_sigmas(shifted(D0, res.grid.k[size_t(i)]), 2, 1e-6);
    res.E1[size_t(i)] = s[0];
    res.E2[size_t(i)] = s[1];
  });
  res.max_E1 = -1.0;
  res.min_E2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < total; ++i) {
    if (res.E1[size_t(i)] > res.max_E1) {
      res.max_E1 = res.E1[size_t(i)];
      res.argmax_k = res.grid.k[size_t(i)];
    }
    res.min_E2 = std::min(res.min_E2, res.E2[size_t(i)]);
  }
  return res;
}

RescaledBand rescaled_band(cplx alpha, const PotentialPair& pot, int n,
                           int N) {
  FrequencyBasis basis(N, Spinor::two);
  const Matrix D0 = assemble_D(alpha, pot, basis, cplx{0.0, 0.0}).mat;
  RescaledBand res;
  res.grid = KGrid::make(n, false);
  const int total = n * n;
  res.E1_hat.assign(size_t(total), 0.0);
  res.comp_u.assign(size_t(total), 0.0);
  res.comp_du.assign(size_t(total), 0.0);
  parallel_for(total, [&](int i) {
    const cplx k = res.grid.k[size_t(i)];
    res.E1_hat[size_t(i)] = smallest_sigmas(shifted(D0, k), 1, 1e-9)[0];
    res.comp_u[size_t(i)] = std::abs(pot.u_plus.eval(zmap(k)));
    const cplx w = cplx{0.0, -4.0 * std::sqrt(3.0) * pi / 9.0} * k;
    res.comp_du[size_t(i)] = 2.0 * std::abs(pot.u_plus.eval_dz(w));
  });
  auto normalize = [total](std::vector<double>& v, double floor_val) {
    double mx = 0.0;
    for (int i = 0; i < total; ++i) mx = std::max(mx, v[size_t(i)]);
    if (mx <= floor_val) return false;
    for (int i = 0; i < total; ++i) v[size_t(i)] /= mx;
    return true;
  };
  // Below the flat-band detection threshold the shape of E1 is truncation
  // noise and the rescaled comparison is meaningless.
  if (!normalize(res.E1_hat, 1e-4))
    throw std::runtime_error(
        "band is numerically flat; rescaling needs alpha off the magic set");
  normalize(res.comp_u, 0.0);
  normalize(res.comp_du, 0.0);
  double n0 = 0.0, du = 0.0, ddu = 0.0;
  for (int i = 0; i < total; ++i) {
    n0 += res.E1_hat[size_t(i)] * res.E1_hat[size_t(i)];
    const double a = res.E1_hat[size_t(i)] - res.comp_u[size_t(i)];
    const double b = res.E1_hat[size_t(i)] - res.comp_du[size_t(i)];
    du += a * a;
    ddu += b * b;
  }
  res.dist_u = std::sqrt(du / n0);
  res.dist_du = std::sqrt(ddu / n0);
  return res;
}

double dE1_dalpha(cplx alpha_magic, const PotentialPair& pot, cplx k, int N) {
  FrequencyBasis basis(N, Spinor::two);
  const Matrix A = assemble_D(alpha_magic, pot, basis, k).mat;
  const double thr = 1e-7 * norm2_estimate(A);
  SubspaceOptions o;
  o.block = 4;
  const auto pairs = smallest_singular_pairs(A, 2, o);
  if (!(pairs[0].sigma < thr && pairs[1].sigma >= thr))
    throw std::runtime_error("kernel at this k is not simple");
  const Vector& v = pairs[0].right;
  const Matrix V = assemble_V(pot, basis).mat;
  return std::abs((v.transpose() * (V * v)).value());
}

}  // namespace ctbg
