#include "ctbg/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctbg/io.hpp"

namespace ctbg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || t.empty())
    throw ConfigError("bad float for key '" + key + "': " + text);
  return v;
}

long parse_long(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || t.empty())
    throw ConfigError("bad integer for key '" + key + "': " + text);
  return v;
}

int parse_int(const std::string& text, const std::string& key) {
  return int(parse_long(text, key));
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("bad bool for key '" + key + "': " + text);
}

}  // namespace

cplx parse_complex(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty complex literal");
  if (t.back() != 'i') {
    char* end = nullptr;
    const double re = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      throw ConfigError("bad complex literal: " + text);
    return cplx{re, 0.0};
  }
  const std::string body = t.substr(0, t.size() - 1);
  // Split at the last +/- that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    char* end = nullptr;
    const double im = std::strtod(body.c_str(), &end);
    if (end != body.c_str() + body.size() || body.empty())
      throw ConfigError("bad complex literal: " + text);
    return cplx{0.0, im};
  }
  const std::string re_part = body.substr(0, split);
  std::string im_part = body.substr(split);
  if (im_part == "+" || im_part == "-") im_part += "1";
  char* end = nullptr;
  const double re = std::strtod(re_part.c_str(), &end);
  if (end != re_part.c_str() + re_part.size())
    throw ConfigError("bad complex literal: " + text);
  const double im = std::strtod(im_part.c_str(), &end);
  if (end != im_part.c_str() + im_part.size())
    throw ConfigError("bad complex literal: " + text);
  return cplx{re, im};
}

std::string format_complex(cplx v) {
  std::string out = format_float(v.real());
  const std::string im = format_float(v.imag());
  if (!im.empty() && im[0] != '-') out += '+';
  out += im;
  out += 'i';
  return out;
}

void apply_config_line(RunConfig& cfg, const std::string& raw) {
  std::string line = raw;
  const std::size_t hash = line.find('#');
  if (hash != std::string::npos) line.resize(hash);
  line = trim(line);
  if (line.empty()) return;
  const std::size_t eq = line.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected key = value, got: " + raw);
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));

  if (key == "alpha") cfg.alpha = parse_complex(value);
  else if (key == "trunc") cfg.trunc = parse_int(value, key);
  else if (key == "grid") cfg.grid = parse_int(value, key);
  else if (key == "zgrid") cfg.zgrid = parse_int(value, key);
  else if (key == "zeros_grid") cfg.zeros_grid = parse_int(value, key);
  else if (key == "count") cfg.count = parse_int(value, key);
  else if (key == "bands_count") cfg.bands_count = parse_int(value, key);
  else if (key == "search_radius") cfg.search_radius = parse_double(value, key);
  else if (key == "k_probe") cfg.k_probe = parse_complex(value);
  else if (key == "scan_min") cfg.scan_min = parse_double(value, key);
  else if (key == "scan_max") cfg.scan_max = parse_double(value, key);
  else if (key == "scan_step") cfg.scan_step = parse_double(value, key);
  else if (key == "scan_trunc") cfg.scan_trunc = parse_int(value, key);
  else if (key == "cross_section") cfg.cross_section = parse_int(value, key);
  else if (key == "plaquette_grid") cfg.plaquette_grid = parse_int(value, key);
  else if (key == "potential") cfg.potential = value;
  else if (key == "out") cfg.out = value;
  else if (key == "seed") cfg.seed = parse_long(value, key);
  else if (key == "threads") cfg.threads = parse_int(value, key);
  else if (key == "csv") cfg.csv = parse_bool(value, key);
  else if (key == "json") cfg.json = parse_bool(value, key);
  else if (key == "svg") cfg.svg = parse_bool(value, key);
  else if (key == "rescaled") cfg.rescaled = parse_bool(value, key);
  else throw ConfigError("unknown config key: " + key);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) apply_config_line(cfg, line);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "alpha = " << format_complex(cfg.alpha) << '\n';
  out << "trunc = " << cfg.trunc << '\n';
  out << "grid = " << cfg.grid << '\n';
  out << "zgrid = " << cfg.zgrid << '\n';
  out << "zeros_grid = " << cfg.zeros_grid << '\n';
  out << "count = " << cfg.count << '\n';
  out << "bands_count = " << cfg.bands_count << '\n';
  out << "search_radius = " << format_float(cfg.search_radius) << '\n';
  out << "k_probe = " << format_complex(cfg.k_probe) << '\n';
  out << "scan_min = " << format_float(cfg.scan_min) << '\n';
  out << "scan_max = " << format_float(cfg.scan_max) << '\n';
  out << "scan_step = " << format_float(cfg.scan_step) << '\n';
  out << "scan_trunc = " << cfg.scan_trunc << '\n';
  out << "cross_section = " << cfg.cross_section << '\n';
  out << "plaquette_grid = " << cfg.plaquette_grid << '\n';
  out << "potential = " << cfg.potential << '\n';
  out << "out = " << cfg.out << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "threads = " << cfg.threads << '\n';
  out << "csv = " << (cfg.csv ? "true" : "false") << '\n';
  out << "json = " << (cfg.json ? "true" : "false") << '\n';
  out << "svg = " << (cfg.svg ? "true" : "false") << '\n';
  out << "rescaled = " << (cfg.rescaled ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace ctbg
