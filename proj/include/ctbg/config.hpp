#pragma once

#include <stdexcept>
#include <string>

#include "ctbg/lattice.hpp"

namespace ctbg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration; serialize() followed by parsing restores
// every field exactly (floats are written with 17 significant digits).
struct RunConfig {
  cplx alpha{0.3, 0.0};
  int trunc = 12;          // plane-wave truncation N
  int grid = 12;           // momentum grid n
  int zgrid = 96;          // position quadrature grid
  int zeros_grid = 48;     // coarse scan for zero location
  int count = 2;           // magic candidates kept
  int bands_count = 5;     // singular values per k
  double search_radius = 1.0;
  cplx k_probe{0.31, 0.17};
  double scan_min = 0.0;   // Wronskian scan over |alpha|
  double scan_max = 1.0;
  double scan_step = 0.01;
  int scan_trunc = 8;
  int cross_section = 121;
  int plaquette_grid = 12;
  std::string potential = "bm";  // bm | theta_family:<x> | file:<path>
  std::string out = "out";
  long seed = 1;
  int threads = 0;  // 0 = library default
  bool csv = true;
  bool json = true;
  bool svg = true;
  bool rescaled = false;
};

// "a", "a+bi", "a-bi", "bi" with float parts.
cplx parse_complex(const std::string& text);
std::string format_complex(cplx v);

// One "key = value" per line; '#' starts a comment.  Unknown keys and
// malformed values raise ConfigError.
void apply_config_line(RunConfig& cfg, const std::string& line);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace ctbg
