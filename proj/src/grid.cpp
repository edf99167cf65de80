#include "ctbg/grid.hpp"

#include <exception>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctbg {

std::array<cplx, 2> dual_frame() {
  const cplx scale = cplx{0.0, 4.0 * pi} / std::sqrt(3.0);
  return {scale * omega * omega, -scale * omega};
}

double dual_cell_area() {
  const auto [Q1, Q2] = dual_frame();
  return std::abs(std::imag(std::conj(Q1) * Q2));
}

KGrid KGrid::make(int n, bool offset, cplx base) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  KGrid g;
  g.n = n;
  g.offset = offset;
  g.base = base;
  g.k.resize(size_t(n) * size_t(n));
  const auto [Q1, Q2] = dual_frame();
  const double shift = offset ? 0.5 : 0.0;
  for (int is = 0; is < n; ++is) {
    const double s = (is + shift) / n;
    for (int it = 0; it < n; ++it) {
      const double t = (it + shift) / n;
      g.k[size_t(g.index(is, it))] = base + s * Q1 + t * Q2;
    }
  }
  return g;
}

double KGrid::coord1(int is) const { return 3.0 * (is + (offset ? 0.5 : 0.0)) / n; }
double KGrid::coord2(int it) const { return 3.0 * (it + (offset ? 0.5 : 0.0)) / n; }

std::vector<cplx> cross_section(int count) {
  if (count < 2) throw std::invalid_argument("cross-section needs >= 2 samples");
  std::vector<cplx> out(static_cast<std::size_t>(count));
  const double a = -1.5 * K_point, b = 1.5 * K_point;
  for (int i = 0; i < count; ++i)
    out[size_t(i)] = cplx{a + (b - a) * i / (count - 1), 0.0};
  return out;
}

namespace {
int thread_cap = 0;  // 0: library default
}

int max_threads() {
#ifdef _OPENMP
  return thread_cap > 0 ? thread_cap : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int t) {
  thread_cap = t > 0 ? t : 0;
#ifdef _OPENMP
  if (t > 0) omp_set_num_threads(t);
#endif
}

void parallel_for(int count, const std::function<void(int)>& fn, bool serial) {
#ifdef _OPENMP
  if (!serial && max_threads() > 1) {
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)serial;
#endif
  for (int i = 0; i < count; ++i) fn(i);
}

}  // namespace ctbg
