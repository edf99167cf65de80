#include "ctbg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float_real(z) ((z).real())
#define lapack_complex_float_imag(z) ((z).imag())
#define lapack_complex_double_real(z) ((z).real())
#define lapack_complex_double_imag(z) ((z).imag())
#include <lapacke.h>

namespace ctbg {

namespace {

void require(lapack_int info, const char* fn) {
  if (info != 0)
    throw std::runtime_error(std::string(fn) + " failed with info " +
                             std::to_string(info));
}

// Deterministic unit-interval doubles straight from the standard engine
// (distribution classes are implementation-defined sequences).
double canonical(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

Matrix random_block(int n, int b, unsigned seed) {
  std::mt19937_64 rng(seed);
  Matrix X(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i)
      X(i, j) = cplx{2.0 * canonical(rng) - 1.0, 2.0 * canonical(rng) - 1.0};
  return X;
}

}  // namespace

Vector eigenvalues(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("square matrix required");
  Matrix work = A;
  const lapack_int n = lapack_int(A.rows());
  Vector w(n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(),
                    nullptr, 1, nullptr, 1);
  require(info, "zgeev");
  return w;
}

void eigenpairs(const Matrix& A, Vector& values, Matrix& vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("square matrix required");
  Matrix work = A;
  const lapack_int n = lapack_int(A.rows());
  values.resize(n);
  vectors.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n,
                    values.data(), nullptr, 1, vectors.data(), n);
  require(info, "zgeev");
}

Eigen::VectorXd singular_values(const Matrix& A) {
  Matrix work = A;
  const lapack_int m = lapack_int(A.rows());
  const lapack_int n = lapack_int(A.cols());
  Eigen::VectorXd s(std::min(m, n));
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(),
                     nullptr, 1, nullptr, 1);
  require(info, "zgesdd");
  return s;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("square matrix required");
  Matrix work = A;
  const lapack_int n = lapack_int(A.rows());
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  require(info, "zheevd");
  return w;
}

double norm2_estimate(const Matrix& A, int iters, unsigned seed) {
  Vector v = random_block(int(A.cols()), 1, seed).col(0);
  v.normalize();
  double s = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vector w = A.adjoint() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    s = std::sqrt(nw);
    v = w / nw;
  }
  return s;
}

LuFactor::LuFactor(Matrix A) : lu_(std::move(A)) {
  if (lu_.rows() != lu_.cols())
    throw std::invalid_argument("square matrix required");
  const lapack_int n = lapack_int(lu_.rows());
  ipiv_.resize(size_t(n));
  const lapack_int info =
      LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, ipiv_.data());
  if (info < 0) require(info, "zgetrf");
  singular_ = info > 0;
}

double LuFactor::min_pivot() const {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) mn = std::min(mn, std::abs(lu_(i, i)));
  return mn;
}

Matrix LuFactor::solve(const Matrix& B, char trans) const {
  if (B.rows() != lu_.rows()) throw std::invalid_argument("rhs size mismatch");
  Matrix X = B;
  const lapack_int n = lapack_int(lu_.rows());
  const lapack_int info =
      LAPACKE_zgetrs(LAPACK_COL_MAJOR, trans, n, lapack_int(B.cols()),
                     lu_.data(), n, ipiv_.data(), X.data(), n);
  require(info, "zgetrs");
  return X;
}

Vector LuFactor::solve(const Vector& b, char trans) const {
  return Vector(solve(Matrix(b), trans).col(0));
}

namespace {

std::vector<SingularPair> extract_pairs(const Matrix& A, const Matrix& Q,
                                        int count) {
  // Rayleigh-Ritz on the range of Q: singular structure of the thin A Q.
  const Matrix W = A * Q;
  const Matrix G = W.adjoint() * W;
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  std::vector<SingularPair> out;
  for (int j = 0; j < count; ++j) {
    SingularPair p;
    p.sigma = std::sqrt(std::max(0.0, es.eigenvalues()(j)));
    p.right = Q * es.eigenvectors().col(j);
    p.right.normalize();
    Vector Av = A * p.right;
    const double nAv = Av.norm();
    p.left = nAv > 1e-300 ? Vector(Av / nAv)
                          : Vector(Vector::Unit(A.rows(), 0));
    p.residual = std::max((Av - p.sigma * p.left).norm(),
                          (A.adjoint() * p.left - p.sigma * p.right).norm());
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SingularPair> dense_smallest(const Matrix& A, int count) {
  Matrix work = A;
  const lapack_int n = lapack_int(A.rows());
  Eigen::VectorXd s(n);
  Matrix U(n, n), Vt(n, n);
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, s.data(),
                     U.data(), n, Vt.data(), n);
  require(info, "zgesdd");
  std::vector<SingularPair> out;
  for (int j = 0; j < count; ++j) {
    const int idx = int(n) - 1 - j;
    SingularPair p;
    p.sigma = s(idx);
    p.right = Vt.row(idx).adjoint();
    p.left = U.col(idx);
    p.residual = std::max((A * p.right - p.sigma * p.left).norm(),
                          (A.adjoint() * p.left - p.sigma * p.right).norm());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<SingularPair> smallest_singular_pairs(const Matrix& A, int count,
                                                  const SubspaceOptions& opts) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("square matrix required");
  const int n = int(A.rows());
  if (count < 1 || count > n) throw std::invalid_argument("bad pair count");
  const int b = std::min(n, opts.block > 0 ? std::max(opts.block, count)
                                           : count + 2);
  if (n <= 64 || b > n / 2) return dense_smallest(A, count);

  LuFactor lu(A);
  if (lu.singular()) return dense_smallest(A, count);

  Matrix Q = random_block(n, b, opts.seed);
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, -1.0);
  for (int it = 0; it < opts.max_iters; ++it) {
    // One step of inverse iteration with (A^H A)^{-1} via the single LU.
    Matrix Z = lu.solve(lu.solve(Q, 'C'), 'N');
    if (!Z.allFinite()) return dense_smallest(A, count);
    Eigen::HouseholderQR<Matrix> qr(Z);
    Q = qr.householderQ() * Matrix::Identity(n, b);

    const Matrix W = A * Q;
    const Matrix G = W.adjoint() * W;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    Eigen::VectorXd cur(count);
    for (int j = 0; j < count; ++j)
      cur(j) = std::sqrt(std::max(0.0, es.eigenvalues()(j)));
    bool done = it > 0;
    for (int j = 0; done && j < count; ++j)
      if (std::abs(cur(j) - prev(j)) > opts.rtol * (1.0 + cur(j))) done = false;
    prev = cur;
    if (done) break;
  }
  return extract_pairs(A, Q, count);
}

}  // namespace ctbg
