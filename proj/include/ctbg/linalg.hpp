#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ctbg/lattice.hpp"

namespace ctbg {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense non-Hermitian eigenvalues (unordered as returned by the solver).
Vector eigenvalues(const Matrix& A);

// Eigenvalues with right eigenvectors.
void eigenpairs(const Matrix& A, Vector& values, Matrix& vectors);

// All singular values, descending.
Eigen::VectorXd singular_values(const Matrix& A);

// Hermitian eigenvalues, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& A);

// Operator 2-norm estimate by power iteration on A^H A.
double norm2_estimate(const Matrix& A, int iters = 25, unsigned seed = 7);

// LU factorization with reusable solves against A and A^H.
class LuFactor {
 public:
  explicit LuFactor(Matrix A);
  int size() const { return int(lu_.rows()); }
  // getrf reported an exactly zero pivot.
  bool singular() const { return singular_; }
  double min_pivot() const;
  // trans 'N' solves A x = b, trans 'C' solves A^H x = b.
  Matrix solve(const Matrix& B, char trans = 'N') const;
  Vector solve(const Vector& b, char trans = 'N') const;

 private:
  Matrix lu_;
  std::vector<int> ipiv_;
  bool singular_ = false;
};

struct SingularPair {
  double sigma = 0.0;
  Vector right;     // v with A v = sigma u
  Vector left;      // u, unit norm
  double residual;  // max(|A v - sigma u|, |A^H u - sigma v|)
};

struct SubspaceOptions {
  int block = 0;          // 0: count + 2
  int max_iters = 80;
  double rtol = 1e-11;    // relative change of the wanted Ritz values
  unsigned seed = 12345;
};

// Smallest `count` singular pairs via LU shift-invert subspace iteration on
// A^H A with Rayleigh-Ritz extraction; falls back to the full dense SVD when
// the factorization is unusable.
std::vector<SingularPair> smallest_singular_pairs(const Matrix& A, int count,
                                                  const SubspaceOptions& opts = {});

}  // namespace ctbg
