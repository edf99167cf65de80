#include "ctbg/potential.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctbg {

namespace {
const cplx I{0.0, 1.0};

cplx omega_pow(int l) {
  l = ((l % 3) + 3) % 3;
  if (l == 0) return cplx{1.0, 0.0};
  return l == 1 ? omega : std::conj(omega);
}
}  // namespace

cplx FourierPotential::eval(cplx z) const {
  cplx acc{0.0, 0.0};
  for (const auto& t : terms) acc += t.coeff * std::exp(I * pairing(z, frequency(t)));
  return acc;
}

cplx FourierPotential::eval_dz(cplx z) const {
  // d/dz e^{i<z,f>} = (i conj(f)/2) e^{i<z,f>}.
  cplx acc{0.0, 0.0};
  for (const auto& t : terms) {
    const cplx f = frequency(t);
    acc += t.coeff * (I * std::conj(f) / 2.0) * std::exp(I * pairing(z, f));
  }
  return acc;
}

PotentialPair build_bm() {
  // Frequencies w^l K in the +K class: K = K + p(0,0), wK = K + p(1,1),
  // w^2 K = K + p(0,1).
  const cplx c0 = -(4.0 / 3.0) * pi * I;
  PotentialPair pot;
  pot.tag = PotentialTag::bm;
  pot.u_plus.side = Side::plus;
  pot.u_plus.tag = PotentialTag::bm;
  pot.u_plus.terms = {{0, 0, c0}, {1, 1, c0 * omega_pow(1)}, {0, 1, c0 * omega_pow(2)}};
  pot.u_minus.side = Side::minus;
  pot.u_minus.tag = PotentialTag::bm;
  pot.u_minus.terms = {
      {0, 0, c0}, {-1, -1, c0 * omega_pow(1)}, {0, -1, c0 * omega_pow(2)}};
  check_frequency_classes(pot);
  return pot;
}

PotentialPair build_theta_family(double theta) {
  const cplx c0 = -(4.0 / 3.0) * pi * I;
  const double ct = std::cos(theta), st = std::sin(theta);
  // Deformation frequencies -2K w^l in the +K class:
  // -2K = K + p(1,2), -2wK = K + p(-1,0), -2w^2K = K + p(1,0).
  PotentialPair pot;
  pot.tag = PotentialTag::theta_family;
  pot.u_plus.side = Side::plus;
  pot.u_plus.tag = PotentialTag::theta_family;
  pot.u_plus.terms = {{0, 0, ct * c0},
                      {1, 1, ct * c0 * omega_pow(1)},
                      {0, 1, ct * c0 * omega_pow(2)},
                      {1, 2, st * c0},
                      {-1, 0, st * c0 * omega_pow(1)},
                      {1, 0, st * c0 * omega_pow(2)}};
  pot.u_minus.side = Side::minus;
  pot.u_minus.tag = PotentialTag::theta_family;
  for (const auto& t : pot.u_plus.terms)
    pot.u_minus.terms.push_back({-t.m, -t.n, t.coeff});
  check_frequency_classes(pot);
  return pot;
}

void check_frequency_classes(const PotentialPair& pot) {
  // The operator needs each slot to shift one component class onto the
  // other: the +K slot couples the +K class to the -K class (remainder
  // freq + 2K in Lambda*) and the -K slot the reverse.
  auto check_slot = [](const FourierPotential& u, double slot_sign) {
    for (const auto& t : u.terms) {
      const cplx rem = u.frequency(t) + 2.0 * slot_sign * K_point;
      if (!Lattice::dual().contains(rem))
        throw std::invalid_argument("potential frequency outside its side class");
    }
  };
  check_slot(pot.u_plus, 1.0);
  check_slot(pot.u_minus, -1.0);
}

SymmetryReport validate_symmetries(const PotentialPair& pot, bool check_reality) {
  SymmetryReport rep;
  rep.reality_checked = check_reality;
  const Lattice& L = Lattice::direct();
  const auto gens = L.generators();
  for (const FourierPotential* u : {&pot.u_plus, &pot.u_minus}) {
    const double sgn = u->side_sign();
    for (int a = 0; a < 32; ++a) {
      for (int b = 0; b < 32; ++b) {
        const cplx z = (a + 0.5) / 32.0 * gens[0] + (b + 0.5) / 32.0 * gens[1];
        const cplx uz = u->eval(z);
        for (const cplx& g : gens) {
          const double viol = std::abs(
              u->eval(z + g) -
              std::exp(I * sgn * pairing(g, cplx{K_point, 0.0})) * uz);
          if (viol > rep.translation) rep.translation = viol;
        }
        const double rot = std::abs(u->eval(omega * z) - omega * uz);
        if (rot > rep.rotation) rep.rotation = rot;
        if (check_reality) {
          const double real_viol =
              std::abs(std::conj(u->eval(std::conj(z))) + u->eval(-z));
          if (real_viol > rep.reality) rep.reality = real_viol;
        }
      }
    }
  }
  return rep;
}

PotentialPair load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open potential file: " + path);
  PotentialPair pot;
  pot.tag = PotentialTag::custom;
  pot.u_plus.side = Side::plus;
  pot.u_plus.tag = PotentialTag::custom;
  pot.u_minus.side = Side::minus;
  pot.u_minus.tag = PotentialTag::custom;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    int side;
    long m, n;
    double re, im;
    if (!(ls >> side >> m >> n >> re >> im)) continue;
    if (side != 1 && side != -1)
      throw std::runtime_error("potential file: side must be +1 or -1");
    auto& u = side == 1 ? pot.u_plus : pot.u_minus;
    u.terms.push_back({m, n, cplx{re, im}});
  }
  if (pot.u_plus.terms.empty() && pot.u_minus.terms.empty())
    throw std::runtime_error("potential file has no terms: " + path);
  check_frequency_classes(pot);
  return pot;
}

void save_potential(const PotentialPair& pot, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write potential file: " + path);
  out.precision(17);
  for (const FourierPotential* u : {&pot.u_plus, &pot.u_minus}) {
    const int side = u->side == Side::plus ? 1 : -1;
    for (const auto& t : u->terms)
      out << side << " " << t.m << " " << t.n << " " << t.coeff.real() << " "
          << t.coeff.imag() << "\n";
  }
}

}  // namespace ctbg
