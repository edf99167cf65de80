#pragma once

#include <stdexcept>
#include <vector>

#include "ctbg/lattice.hpp"

namespace ctbg {

enum class Spinor { two, four };

struct BasisEntry {
  int component = 1;  // 1-based
  long m = 0;
  long n = 0;
  cplx offset{0.0, 0.0};
  cplx freq{0.0, 0.0};
};

// Truncated plane-wave basis of a Bloch sector: per component, frequencies
// offset + Lambda*(m,n) with |m|,|n| <= N, ordered lexicographically in
// (component, m, n).  The default offsets (-K, +K[, -K, +K]) discretize the
// space of moire-periodic spinors; translated sectors carry shifted offsets.
class FrequencyBasis {
 public:
  // Empty placeholder (size 0); assign a real basis before use.
  FrequencyBasis() = default;
  FrequencyBasis(int N, Spinor spinor);
  FrequencyBasis(int N, Spinor spinor, std::vector<cplx> offsets);

  int truncation() const { return N_; }
  Spinor spinor() const { return spinor_; }
  int ncomp() const { return int(offsets_.size()); }
  int per_comp() const { return (2 * N_ + 1) * (2 * N_ + 1); }
  int size() const { return ncomp() * per_comp(); }
  cplx offset(int comp) const { return offsets_.at(comp - 1); }
  const std::vector<cplx>& offsets() const { return offsets_; }

  bool in_box(long m, long n) const {
    return m >= -N_ && m <= N_ && n >= -N_ && n <= N_;
  }
  // -1 when (m,n) leaves the truncation box.
  int index(int comp, long m, long n) const {
    if (!in_box(m, n)) return -1;
    return int(((comp - 1) * long(2 * N_ + 1) + (m + N_)) * (2 * N_ + 1) +
               (n + N_));
  }
  BasisEntry entry(int idx) const;
  cplx frequency(int idx) const { return entry(idx).freq; }

  bool same_layout(const FrequencyBasis& other, double tol = 1e-9) const;

 private:
  int N_ = 0;
  Spinor spinor_ = Spinor::two;
  std::vector<cplx> offsets_;
};

}  // namespace ctbg
