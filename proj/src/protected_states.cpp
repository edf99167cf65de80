#include "ctbg/protected_states.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "ctbg/symmetry.hpp"
#include "ctbg/theta.hpp"

namespace ctbg {

namespace {

constexpr cplx I{0.0, 1.0};

bool near(cplx a, cplx b, double tol = 1e-9) { return std::abs(a - b) < tol; }

}  // namespace

void fix_phase(Vector& coeff) {
  double top = 0.0;
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    top = std::max(top, std::abs(coeff(i)));
  if (top == 0.0) return;
  Eigen::Index pivot = -1;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) {
    if (std::abs(coeff(i)) >= top - 1e-12) {
      pivot = i;
      break;
    }
  }
  const cplx c = coeff(pivot);
  coeff *= std::conj(c) / std::abs(c);
}

BlochState protected_state(cplx alpha, const PotentialPair& pot, cplx k,
                           int N) {
  if (!near(k, K_point) && !near(k, -K_point))
    throw std::invalid_argument(
        "protected_state: momentum must be +K or -K");
  FrequencyBasis basis(N, Spinor::two);
  const Matrix A = assemble_D(alpha, pot, basis, k).mat;
  SubspaceOptions opts;
  opts.block = 3;
  const auto pairs = smallest_singular_pairs(A, 1, opts);
  Vector v = pairs[0].right;
  v.normalize();
  fix_phase(v);
  const double residual = (A * v).norm();
  if (residual >= 1e-6)
    throw std::runtime_error(
        "protected_state: kernel residual too large; increase the "
        "truncation");
  return BlochState{alpha, k, std::move(basis), std::move(v), residual};
}

BlochState partner_state(const BlochState& u_K, const PotentialPair& pot) {
  if (!near(u_K.k, K_point))
    throw std::invalid_argument("partner_state: input must sit at k = +K");

  const SymmetryOperator t1 = make_tau(u_K.basis, K_point);
  Vector v = t1.apply(u_K.coeff);
  const SymmetryOperator sw = make_E_swap(t1.dst);
  v = sw.apply(v);
  const SymmetryOperator t2 = make_tau(sw.dst, K_point);
  v = t2.apply(v);

  FrequencyBasis basis(u_K.basis.truncation(), Spinor::two);
  if (!t2.dst.same_layout(basis))
    throw std::runtime_error(
        "partner_state: pipeline did not land in the canonical -K sector");
  const Matrix A = assemble_D(u_K.alpha, pot, basis, -K_point).mat;
  const double residual = (A * v).norm();
  return BlochState{u_K.alpha, -K_point, std::move(basis), std::move(v),
                    residual};
}

std::array<cplx, 2> evaluate(const BlochState& s, cplx z) {
  std::array<cplx, 2> out{cplx{0.0, 0.0}, cplx{0.0, 0.0}};
  for (int j = 0; j < s.basis.size(); ++j) {
    const BasisEntry e = s.basis.entry(j);
    out[e.component - 1] += s.coeff(j) * std::exp(I * pairing(z, e.freq));
  }
  return out;
}

ComponentGrid evaluate_grid(const BlochState& s, int n, double shift) {
  if (n < 1) throw std::invalid_argument("evaluate_grid: n must be positive");
  const int N = s.basis.truncation();
  const int w = 2 * N + 1;
  const double two_pi = 2.0 * pi;

  ComponentGrid grid;
  grid.n = n;
  grid.shift = shift;
  grid.c1.resize(n, n);
  grid.c2.resize(n, n);

  // <s + t omega, p(m, l)> = 2 pi (t m - s l), so the synthesis separates
  // into an l-sum indexed by s and an m-sum indexed by t.
  Eigen::MatrixXcd phase_s(w, n), phase_t(w, n);
  for (int is = 0; is < n; ++is) {
    const double sv = (double(is) + shift) / double(n);
    for (int l = -N; l <= N; ++l)
      phase_s(l + N, is) = std::exp(cplx{0.0, -two_pi * sv * double(l)});
  }
  for (int it = 0; it < n; ++it) {
    const double tv = (double(it) + shift) / double(n);
    for (int m = -N; m <= N; ++m)
      phase_t(m + N, it) = std::exp(cplx{0.0, two_pi * tv * double(m)});
  }

  for (int comp = 1; comp <= 2; ++comp) {
    Eigen::MatrixXcd C(w, w);  // C(m+N, l+N) = coefficient of p(m, l)
    for (int m = -N; m <= N; ++m)
      for (int l = -N; l <= N; ++l)
        C(m + N, l + N) = s.coeff(s.basis.index(comp, m, l));
    const Eigen::MatrixXcd B = C * phase_s;           // w x n, rows m
    const Eigen::MatrixXcd G = phase_t.transpose() * B;  // n x n, (it, is)

    const cplx offset = s.basis.offset(comp);
    Eigen::MatrixXcd& target = (comp == 1) ? grid.c1 : grid.c2;
    for (int is = 0; is < n; ++is)
      for (int it = 0; it < n; ++it) {
        const cplx z = grid.point(is, it);
        target(is, it) = G(it, is) * std::exp(I * pairing(z, offset));
      }
  }
  return grid;
}

cplx wronskian(cplx alpha, const PotentialPair& pot, int N,
               const std::vector<cplx>& z_samples) {
  if (z_samples.empty())
    throw std::invalid_argument("wronskian: need at least one sample");
  const BlochState uK = protected_state(alpha, pot, K_point, N);
  const BlochState uMK = protected_state(alpha, pot, -K_point, N);

  // Retag both states into the periodic sector before taking the
  // determinant so the result is a single Lambda-periodic function.
  const SymmetryOperator tK = make_tau(uK.basis, K_point);
  const SymmetryOperator tMK = make_tau(uMK.basis, -K_point);
  BlochState a{alpha, cplx{0.0, 0.0}, tK.dst, tK.apply(uK.coeff),
               uK.residual};
  BlochState b{alpha, cplx{0.0, 0.0}, tMK.dst, tMK.apply(uMK.coeff),
               uMK.residual};

  std::vector<cplx> vals;
  vals.reserve(z_samples.size());
  cplx mean{0.0, 0.0};
  for (cplx z : z_samples) {
    const auto av = evaluate(a, z);
    const auto bv = evaluate(b, z);
    const cplx det = av[0] * bv[1] - av[1] * bv[0];
    vals.push_back(det);
    mean += det;
  }
  mean /= double(vals.size());
  double dev = 0.0;
  for (cplx v : vals) dev = std::max(dev, std::abs(v - mean));
  if (dev > 1e-8 * (1.0 + std::abs(mean)))
    throw std::runtime_error("wronskian: sample values are not constant");
  return mean;
}

namespace {

// Gauss-Newton on (x, y) -> (Re u1, Im u1, Re u2, Im u2); returns false
// when the normal equations degenerate before the tolerance is met.
bool refine_zero(const BlochState& s, cplx& z, double tol, int max_steps) {
  for (int step = 0; step < max_steps; ++step) {
    cplx u[2] = {{0.0, 0.0}, {0.0, 0.0}};
    cplx ux[2] = {{0.0, 0.0}, {0.0, 0.0}};
    cplx uy[2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int j = 0; j < s.basis.size(); ++j) {
      const BasisEntry e = s.basis.entry(j);
      const cplx term = s.coeff(j) * std::exp(I * pairing(z, e.freq));
      const int c = e.component - 1;
      u[c] += term;
      ux[c] += I * std::real(e.freq) * term;
      uy[c] += I * std::imag(e.freq) * term;
    }
    double JtJ[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double Jtr[2] = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      const double r[2] = {std::real(u[c]), std::imag(u[c])};
      const double jx[2] = {std::real(ux[c]), std::imag(ux[c])};
      const double jy[2] = {std::real(uy[c]), std::imag(uy[c])};
      for (int row = 0; row < 2; ++row) {
        JtJ[0][0] += jx[row] * jx[row];
        JtJ[0][1] += jx[row] * jy[row];
        JtJ[1][1] += jy[row] * jy[row];
        Jtr[0] += jx[row] * r[row];
        Jtr[1] += jy[row] * r[row];
      }
    }
    JtJ[1][0] = JtJ[0][1];
    const double det = JtJ[0][0] * JtJ[1][1] - JtJ[0][1] * JtJ[1][0];
    if (!(std::abs(det) > 1e-300)) return false;
    const double dx = (-Jtr[0] * JtJ[1][1] + Jtr[1] * JtJ[0][1]) / det;
    const double dy = (Jtr[0] * JtJ[1][0] - Jtr[1] * JtJ[0][0]) / det;
    z += cplx{dx, dy};
    if (std::hypot(dx, dy) < tol) return true;
  }
  return false;
}

double state_abs(const BlochState& s, cplx z) {
  const auto v = evaluate(s, z);
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
}

// Winding number of the dominant component around z0; order of the zero.
int zero_order(const BlochState& s, cplx z0, double scale, bool& ok) {
  const int pts = 64;
  for (double radius : {0.02, 0.04}) {
    std::vector<std::array<cplx, 2>> ring(pts);
    double ring_min[2] = {std::numeric_limits<double>::max(),
                          std::numeric_limits<double>::max()};
    for (int i = 0; i < pts; ++i) {
      const double phi = 2.0 * pi * double(i) / double(pts);
      ring[i] = evaluate(s, z0 + radius * std::exp(I * phi));
      for (int c = 0; c < 2; ++c)
        ring_min[c] = std::min(ring_min[c], std::abs(ring[i][c]));
    }
    const int dom = (ring_min[0] >= ring_min[1]) ? 0 : 1;
    if (ring_min[dom] < 1e-9 * scale) continue;  // retry on a larger ring
    double total = 0.0;
    bool wrapped_ok = true;
    for (int i = 0; i < pts; ++i) {
      const cplx ratio = ring[(i + 1) % pts][dom] / ring[i][dom];
      const double darg = std::arg(ratio);
      if (std::abs(darg) > pi / 2.0) {
        wrapped_ok = false;
        break;
      }
      total += darg;
    }
    if (!wrapped_ok) continue;
    ok = true;
    return int(std::lround(total / (2.0 * pi)));
  }
  ok = false;
  return 0;
}

}  // namespace

std::vector<ZeroRecord> locate_zeros(const BlochState& s, int n,
                                     double refine_tol) {
  const ComponentGrid grid = evaluate_grid(s, n, 0.0);
  Eigen::MatrixXd f(n, n);
  double fmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      f(i, j) = std::norm(grid.c1(i, j)) + std::norm(grid.c2(i, j));
      fmax = std::max(fmax, f(i, j));
    }
  const double scale = std::sqrt(fmax);

  const Lattice& direct = Lattice::direct();
  std::vector<ZeroRecord> records;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (f(i, j) >= 1e-3 * fmax) continue;
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (f((i + di + n) % n, (j + dj + n) % n) < f(i, j)) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;

      cplx z = grid.point(i, j);
      if (!refine_zero(s, z, refine_tol, 40)) continue;
      const double residual = state_abs(s, z);
      if (residual >= 1e-8 * scale) continue;

      bool ok = false;
      const int order = zero_order(s, z, scale, ok);
      if (!ok)
        throw std::runtime_error(
            "locate_zeros: winding number ill-conditioned");

      ZeroRecord rec;
      rec.location = direct.reduce(z);
      rec.order = order;
      rec.residual = residual;

      bool duplicate = false;
      for (auto& prev : records) {
        cplx d = prev.location - rec.location;
        double cs = 0.0, ct = 0.0;
        direct.coords(d, cs, ct);
        d -= direct.point(long(std::lround(cs)), long(std::lround(ct)));
        if (std::abs(d) < 1e-6) {
          duplicate = true;
          if (rec.residual < prev.residual) prev = rec;
          break;
        }
      }
      if (!duplicate) records.push_back(rec);
    }

  std::sort(records.begin(), records.end(),
            [](const ZeroRecord& a, const ZeroRecord& b) {
              if (std::real(a.location) != std::real(b.location))
                return std::real(a.location) < std::real(b.location);
              return std::imag(a.location) < std::imag(b.location);
            });
  return records;
}

ZeroTestResult flatband_zero_test(cplx alpha, const PotentialPair& pot,
                                  int N) {
  const BlochState uK = protected_state(alpha, pot, K_point, N);
  const ComponentGrid grid = evaluate_grid(uK, 64, 0.0);
  double fmax = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      fmax = std::max(fmax,
                      std::norm(grid.c1(i, j)) + std::norm(grid.c2(i, j)));
  ZeroTestResult out;
  out.max_abs = std::sqrt(fmax);
  out.at_zS = state_abs(uK, z_S);
  out.at_minus_zS = state_abs(uK, -z_S);
  out.magic = std::min(out.at_zS, out.at_minus_zS) < 1e-5 * out.max_abs;
  return out;
}

KernelState kernel_state_at_k(cplx alpha_magic, const PotentialPair& pot,
                              cplx k, int N) {
  FrequencyBasis basis(N, Spinor::two);
  const Matrix A = assemble_D(alpha_magic, pot, basis, k).mat;
  SubspaceOptions opts;
  opts.block = 4;
  const auto pairs = smallest_singular_pairs(A, 2, opts);
  const double thr = 1e-7 * norm2_estimate(A);
  if (pairs[0].sigma >= thr)
    throw std::runtime_error(
        "kernel_state_at_k: no kernel at this k; alpha is not magic");
  if (pairs[1].sigma < thr)
    throw std::runtime_error(
        "kernel_state_at_k: kernel at this k is not simple");
  Vector v = pairs[0].right;
  v.normalize();
  fix_phase(v);
  BlochState state{alpha_magic, k, basis, std::move(v), pairs[0].sigma};

  // Cross-check against the quasi-periodic kernel built from the k = K
  // state and its zero.
  const BlochState uK = protected_state(alpha_magic, pot, K_point, N);
  const auto zeros = locate_zeros(uK, 48);
  if (zeros.empty())
    throw std::runtime_error(
        "kernel_state_at_k: reference state has no zero to anchor the "
        "kernel");
  cplx z0 = zeros[0].location;
  double best = zeros[0].residual;
  for (const auto& rec : zeros)
    if (rec.residual < best) {
      best = rec.residual;
      z0 = rec.location;
    }

  const int nz = 96;
  const ComponentGrid a = evaluate_grid(state, nz, 0.5);
  const ComponentGrid u = evaluate_grid(uK, nz, 0.5);
  const ThetaEvaluator th;
  cplx ip{0.0, 0.0};
  double na = 0.0, nb = 0.0;
  for (int i = 0; i < nz; ++i)
    for (int j = 0; j < nz; ++j) {
      const cplx zeta = a.point(i, j);
      const cplx Fv = th.F(k - K_point, zeta - z0);
      const cplx b1 = Fv * u.c1(i, j);
      const cplx b2 = Fv * u.c2(i, j);
      ip += std::conj(a.c1(i, j)) * b1 + std::conj(a.c2(i, j)) * b2;
      na += std::norm(a.c1(i, j)) + std::norm(a.c2(i, j));
      nb += std::norm(b1) + std::norm(b2);
    }
  const double deficit = 1.0 - std::abs(ip) / std::sqrt(na * nb);
  return KernelState{std::move(state), deficit};
}

}  // namespace ctbg
