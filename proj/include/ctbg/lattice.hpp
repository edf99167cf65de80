#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace ctbg {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// omega = e^{2 pi i / 3}, the basic rotation of the moire lattice.
inline const cplx omega{-0.5, 0.8660254037844386467637231707529362};

// Dirac momentum K = 4 pi / 3 (a real number in this convention).
inline constexpr double K_point = 4.0 * pi / 3.0;

// Stacking point z_S = i / sqrt(3).
inline const cplx z_S{0.0, 0.5773502691896257645091487805019575};

// High-symmetry momenta in the zeta-convention of the companion coordinate
// system: Gamma at i, K at -i, K' at 0.
inline const cplx zeta_Gamma{0.0, 1.0};
inline const cplx zeta_K{0.0, -1.0};
inline const cplx zeta_Kprime{0.0, 0.0};

// Real pairing <z,w> = Re(z * conj(w)); bilinear over the reals, symmetric.
inline double pairing(cplx z, cplx w) {
  return z.real() * w.real() + z.imag() * w.imag();
}

// z(k) = sqrt(3) k / (4 pi i); maps the dual lattice onto the direct one.
inline cplx zmap(cplx k) {
  return std::sqrt(3.0) * k / (cplx{0.0, 4.0 * pi});
}

struct LatticePoint {
  long m = 0;
  long n = 0;
  cplx value{0.0, 0.0};
};

// Lattice scale * (Z + omega Z).  scale = 1 gives the moire lattice Lambda,
// scale = 4 pi i / sqrt(3) gives its dual Lambda* under the pairing above.
class Lattice {
 public:
  explicit Lattice(cplx scale) : scale_(scale) {}

  static const Lattice& direct();
  static const Lattice& dual();

  cplx scale() const { return scale_; }
  cplx point(long m, long n) const {
    return scale_ * (cplx(double(m), 0.0) + double(n) * omega);
  }
  std::array<cplx, 2> generators() const { return {point(1, 0), point(0, 1)}; }

  // Solve z = (s + t omega) * scale for real (s,t).
  void coords(cplx z, double& s, double& t) const;

  // Integer coordinates if z is a lattice point to within tol, else nullopt.
  std::optional<LatticePoint> round_point(cplx z, double tol = 1e-9) const;
  bool contains(cplx z, double tol = 1e-9) const {
    return round_point(z, tol).has_value();
  }

  // Representative of z mod the lattice in the fundamental parallelogram,
  // half-open convention [0,1)^2 in (s,t) coordinates.  The removed lattice
  // shift is returned through `shift` when requested.
  cplx reduce(cplx z) const;
  cplx reduce(cplx z, LatticePoint& shift) const;

 private:
  cplx scale_;
};

// Rotation-fixed momenta {0, K, -K} (mod Lambda*).
std::vector<cplx> high_symmetry_points();

enum class Direction { z_to_zeta, zeta_to_z };

// Position translation between conventions: zeta = (4/3) pi i z.
cplx translate_coordinates(cplx value, Direction dir);

// Momentum translation between conventions: k_zeta = 3 k / (4 pi i),
// so that K = 4 pi / 3 corresponds to -i.
cplx translate_momentum(cplx value, Direction dir);

}  // namespace ctbg
