#include "ctbg/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace ctbg {

namespace {

constexpr cplx I{0.0, 1.0};

// sigma = sqrt(3) / (4 pi i) from d_k log F.
const cplx sigma_dk{0.0, -std::sqrt(3.0) / (4.0 * pi)};

struct MetricMoments {
  double h = 0.0;    // mean W
  cplx g{0.0, 0.0};  // mean L W  = <u, d_k u> / count
  double n2 = 0.0;   // mean |L|^2 W
};

// One pass over the quadrature grid: W = |u(k)|^2 and the logarithmic
// k-derivative L(zeta) = d_k log F_{k-K}(zeta - z0).
MetricMoments moments(const BlochFamily& fam, cplx k, bool need_derivative) {
  const cplx kappa = k - K_point;
  const cplx zk = zmap(kappa);
  MetricMoments m;
  const std::size_t count = fam.zc.size();
  for (std::size_t i = 0; i < count; ++i) {
    const cplx w = fam.zc[i] - zk;
    const cplx num = fam.theta.theta(w);
    const cplx F = std::exp(-fam.y_imag[i] * kappa) * num / fam.theta_den[i];
    const double W = std::norm(F) * fam.weight[i];
    m.h += W;
    if (need_derivative) {
      const cplx L =
          -fam.y_imag[i] - sigma_dk * fam.theta.theta_prime(w) / num;
      m.g += L * W;
      m.n2 += std::norm(L) * W;
    }
  }
  const double inv = 1.0 / double(count);
  m.h *= inv;
  m.g *= inv;
  m.n2 *= inv;
  return m;
}

}  // namespace

BlochFamily make_family(const BlochState& u_K, int nz) {
  if (std::abs(u_K.k - cplx(K_point)) > 1e-9)
    throw std::invalid_argument("make_family: base state must sit at k = +K");
  BlochFamily fam;
  fam.alpha = u_K.alpha;
  fam.u_K = u_K;
  fam.nz = nz;

  const auto zeros = locate_zeros(u_K, 48);
  if (zeros.empty())
    throw std::runtime_error(
        "make_family: flat-band state has no zero; alpha is not magic");
  cplx z0 = zeros[0].location;
  double best = zeros[0].residual;
  for (const auto& rec : zeros)
    if (rec.residual < best) {
      best = rec.residual;
      z0 = rec.location;
    }
  fam.zero = z0;

  fam.base = evaluate_grid(u_K, nz, 0.5);
  fam.zc.resize(std::size_t(nz) * nz);
  fam.y_imag.resize(fam.zc.size());
  fam.theta_den.resize(fam.zc.size());
  fam.weight.resize(fam.zc.size());
  for (int i = 0; i < nz; ++i)
    for (int j = 0; j < nz; ++j) {
      const std::size_t idx = std::size_t(i) * nz + j;
      const cplx zeta = fam.base.point(i, j);
      fam.zc[idx] = zeta - z0;
      fam.y_imag[idx] = std::imag(zeta - z0);
      fam.theta_den[idx] = fam.theta.theta(zeta - z0);
      fam.weight[idx] =
          std::norm(fam.base.c1(i, j)) + std::norm(fam.base.c2(i, j));
      if (std::abs(fam.theta_den[idx]) < 1e-13)
        throw std::runtime_error(
            "make_family: quadrature node hit a theta zero");
    }
  return fam;
}

BlochFamily make_family(cplx alpha, const PotentialPair& pot, int N, int nz) {
  return make_family(protected_state(alpha, pot, K_point, N), nz);
}

ComponentGrid u_of_k(const BlochFamily& fam, cplx k) {
  const cplx kappa = k - K_point;
  const cplx zk = zmap(kappa);
  ComponentGrid out;
  out.n = fam.nz;
  out.shift = 0.5;
  out.c1.resize(fam.nz, fam.nz);
  out.c2.resize(fam.nz, fam.nz);
  for (int i = 0; i < fam.nz; ++i)
    for (int j = 0; j < fam.nz; ++j) {
      const std::size_t idx = std::size_t(i) * fam.nz + j;
      const cplx F = std::exp(-fam.y_imag[idx] * kappa) *
                     fam.theta.theta(fam.zc[idx] - zk) / fam.theta_den[idx];
      out.c1(i, j) = F * fam.base.c1(i, j);
      out.c2(i, j) = F * fam.base.c2(i, j);
    }
  return out;
}

double h_of_k(const BlochFamily& fam, cplx k) {
  return moments(fam, k, false).h;
}

cplx multiplier(const BlochFamily& fam, cplx p, cplx k) {
  return fam.theta.multiplier_e(p, k - K_point);
}

double curvature_analytic(const BlochFamily& fam, cplx k) {
  const MetricMoments m = moments(fam, k, true);
  return (m.h * m.n2 - std::norm(m.g)) / (m.h * m.h);
}

double curvature_fd(const BlochFamily& fam, cplx k, double step) {
  const double lc = std::log(h_of_k(fam, k));
  const double lpx = std::log(h_of_k(fam, k + step));
  const double lmx = std::log(h_of_k(fam, k - step));
  const double lpy = std::log(h_of_k(fam, k + I * step));
  const double lmy = std::log(h_of_k(fam, k - I * step));
  return (lpx + lmx + lpy + lmy - 4.0 * lc) / (4.0 * step * step);
}

double chern_integral(const BlochFamily& fam, int n) {
  const KGrid grid = KGrid::make(n, true);
  const double dA = dual_cell_area() / double(n) / double(n);
  std::vector<double> H(grid.k.size());
  parallel_for(int(grid.k.size()), [&](int i) {
    H[std::size_t(i)] = curvature_analytic(fam, grid.k[std::size_t(i)]);
  });
  double total = 0.0;
  for (double v : H) total += v;
  return -total * dA / pi;
}

PlaquetteResult chern_plaquette(const BlochFamily& fam, int n,
                                bool conjugate) {
  if (n < 2) throw std::invalid_argument("chern_plaquette: n must be >= 2");
  const auto frame = dual_frame();
  const cplx Q1 = frame[0], Q2 = frame[1];
  const std::size_t len = 2 * std::size_t(fam.nz) * fam.nz;

  // Stream two columns of normalized states across the (n+1)^2 node grid.
  const auto column = [&](int i) {
    std::vector<Vector> col(std::size_t(n) + 1);
    parallel_for(n + 1, [&](int j) {
      const cplx k =
          (double(i) / n) * Q1 + (double(j) / n) * Q2;
      const ComponentGrid u = u_of_k(fam, k);
      Vector v(len);
      std::size_t at = 0;
      for (int a = 0; a < fam.nz; ++a)
        for (int b = 0; b < fam.nz; ++b) {
          v(at++) = u.c1(a, b);
          v(at++) = u.c2(a, b);
        }
      v.normalize();
      col[std::size_t(j)] = std::move(v);
    });
    return col;
  };

  const auto link = [&](const Vector& a, const Vector& b) {
    cplx ov = a.dot(b);  // conjugate-linear in a
    if (std::abs(ov) < 1e-3)
      throw std::runtime_error(
          "chern_plaquette: overlap collapsed; k grid too coarse");
    if (conjugate) ov = std::conj(ov);
    return ov / std::abs(ov);
  };

  double total = 0.0;
  std::vector<Vector> left = column(0);
  for (int i = 0; i < n; ++i) {
    std::vector<Vector> right = column(i + 1);
    for (int j = 0; j < n; ++j) {
      const cplx P = link(left[j], right[j]) * link(right[j], right[j + 1]) *
                     link(right[j + 1], left[j + 1]) *
                     link(left[j + 1], left[j]);
      total += std::arg(P);
    }
    left = std::move(right);
  }

  const double turns = -total / (2.0 * pi);
  PlaquetteResult out;
  out.chern = int(std::lround(turns));
  out.residual = std::abs(turns - double(out.chern));
  return out;
}

double chern_boundary(const BlochFamily& fam, cplx base_corner) {
  const auto frame = dual_frame();
  const cplx Q1 = frame[0], Q2 = frame[1];
  const cplx c = base_corner - K_point;
  const ThetaEvaluator& th = fam.theta;
  // Continued log-multiplier increments along the two independent edges.
  const cplx d2 = th.log_multiplier_continued(Q2, c, c + Q1) -
                  std::log(th.multiplier_e(Q2, c));
  const cplx d1 = th.log_multiplier_continued(Q1, c, c + Q2) -
                  std::log(th.multiplier_e(Q1, c));
  const cplx value = I / (2.0 * pi) * (d2 - d1);
  if (std::abs(std::imag(value)) > 1e-9)
    throw std::runtime_error(
        "chern_boundary: holonomy has a non-real defect");
  return std::real(value);
}

CurvatureReport curvature_report(const BlochFamily& fam, int n,
                                 int section_count) {
  CurvatureReport rep;
  rep.n = n;
  rep.grid = KGrid::make(n, true);
  rep.H.resize(n, n);
  std::vector<double> flat(rep.grid.k.size());
  parallel_for(int(flat.size()), [&](int i) {
    flat[std::size_t(i)] = curvature_analytic(fam, rep.grid.k[std::size_t(i)]);
  });
  rep.max_H = -std::numeric_limits<double>::max();
  rep.min_H = std::numeric_limits<double>::max();
  for (int is = 0; is < n; ++is)
    for (int it = 0; it < n; ++it) {
      const double v = flat[std::size_t(rep.grid.index(is, it))];
      rep.H(is, it) = v;
      const cplx k = rep.grid.k[std::size_t(rep.grid.index(is, it))];
      if (v > rep.max_H) {
        rep.max_H = v;
        rep.argmax_k = k;
      }
      if (v < rep.min_H) {
        rep.min_H = v;
        rep.argmin_k = k;
      }
    }

  const double delta = 1e-3 * std::abs(dual_frame()[0]);
  const auto grad = [&](cplx k) {
    const double gx =
        (curvature_analytic(fam, k + delta) - curvature_analytic(fam, k - delta)) /
        (2.0 * delta);
    const double gy = (curvature_analytic(fam, k + I * delta) -
                       curvature_analytic(fam, k - I * delta)) /
                      (2.0 * delta);
    return std::hypot(gx, gy);
  };
  rep.H_Gamma = curvature_analytic(fam, cplx{0.0, 0.0});
  rep.H_K = curvature_analytic(fam, K_point);
  rep.H_Kprime = curvature_analytic(fam, -K_point);
  rep.grad_Gamma = grad(cplx{0.0, 0.0});
  rep.grad_K = grad(K_point);
  rep.grad_Kprime = grad(-K_point);

  rep.section_k = cross_section(section_count);
  rep.section_H.resize(rep.section_k.size());
  parallel_for(int(rep.section_k.size()), [&](int i) {
    rep.section_H[std::size_t(i)] =
        curvature_analytic(fam, rep.section_k[std::size_t(i)]);
  });
  return rep;
}

}  // namespace ctbg
