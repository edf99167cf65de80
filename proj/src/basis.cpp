#include "ctbg/basis.hpp"

namespace ctbg {

namespace {
std::vector<cplx> default_offsets(Spinor sp) {
  const cplx mK{-K_point, 0.0}, pK{K_point, 0.0};
  if (sp == Spinor::two) return {mK, pK};
  return {mK, pK, mK, pK};
}
}  // namespace

FrequencyBasis::FrequencyBasis(int N, Spinor spinor)
    : FrequencyBasis(N, spinor, default_offsets(spinor)) {}

FrequencyBasis::FrequencyBasis(int N, Spinor spinor, std::vector<cplx> offsets)
    : N_(N), spinor_(spinor), offsets_(std::move(offsets)) {
  if (N_ < 1) throw std::invalid_argument("FrequencyBasis: N must be >= 1");
  const int want = spinor_ == Spinor::two ? 2 : 4;
  if (int(offsets_.size()) != want)
    throw std::invalid_argument("FrequencyBasis: offset count mismatch");
  // Dense matrices on this basis take size^2 complex doubles; keep the
  // footprint of a single operator under ~8 GB.
  const double sz = double(want) * per_comp();
  if (sz * sz * 16.0 > 8e9)
    throw std::runtime_error("FrequencyBasis: truncation exceeds memory budget");
}

BasisEntry FrequencyBasis::entry(int idx) const {
  if (idx < 0 || idx >= size()) throw std::out_of_range("basis index");
  const int pc = per_comp(), w = 2 * N_ + 1;
  BasisEntry e;
  e.component = idx / pc + 1;
  const int r = idx % pc;
  e.m = r / w - N_;
  e.n = r % w - N_;
  e.offset = offsets_[e.component - 1];
  e.freq = e.offset + Lattice::dual().point(e.m, e.n);
  return e;
}

bool FrequencyBasis::same_layout(const FrequencyBasis& other, double tol) const {
  if (N_ != other.N_ || spinor_ != other.spinor_) return false;
  for (size_t i = 0; i < offsets_.size(); ++i)
    if (std::abs(offsets_[i] - other.offsets_[i]) > tol) return false;
  return true;
}

}  // namespace ctbg
