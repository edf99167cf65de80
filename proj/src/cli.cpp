#include "ctbg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctbg/bundle.hpp"
#include "ctbg/config.hpp"
#include "ctbg/io.hpp"
#include "ctbg/potential.hpp"
#include "ctbg/protected_states.hpp"
#include "ctbg/spectra.hpp"
#include "ctbg/symmetry.hpp"
#include "ctbg/theta.hpp"

namespace ctbg {

namespace {

namespace fs = std::filesystem;

PotentialPair make_potential(const std::string& name) {
  if (name == "bm") return build_bm();
  const std::string theta_prefix = "theta_family:";
  if (name.rfind(theta_prefix, 0) == 0) {
    const std::string arg = name.substr(theta_prefix.size());
    char* end = nullptr;
    const double theta = std::strtod(arg.c_str(), &end);
    if (arg.empty() || end != arg.c_str() + arg.size())
      throw ConfigError("bad theta_family parameter: " + name);
    return build_theta_family(theta);
  }
  const std::string file_prefix = "file:";
  if (name.rfind(file_prefix, 0) == 0)
    return load_potential(name.substr(file_prefix.size()));
  throw ConfigError("unknown potential '" + name +
                    "' (expected bm, theta_family:<x> or file:<path>)");
}

void frame_coords(cplx k, double& k1, double& k2) {
  const auto f = dual_frame();
  const double a = f[0].real(), b = f[1].real();
  const double c = f[0].imag(), d = f[1].imag();
  const double det = a * d - b * c;
  k1 = 3.0 * (k.real() * d - b * k.imag()) / det;
  k2 = 3.0 * (a * k.imag() - k.real() * c) / det;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out) / name).string();
}

void ensure_out(const RunConfig& cfg) { fs::create_directories(cfg.out); }

void emit_error(const RunConfig& cfg, const std::string& command,
                const std::string& message) {
  std::cerr << "error (" << command << "): " << message << "\n";
  try {
    ensure_out(cfg);
    write_text_file(out_path(cfg, "error.json"), error_json(command, message));
  } catch (...) {
    // stderr already carries the message
  }
}

void apply_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) set_threads(cfg.threads);
}

std::vector<cplx> wronskian_samples() {
  return {cplx{0.11, 0.23}, cplx{-0.31, 0.17}, cplx{0.05, -0.29},
          cplx{0.41, 0.37}, cplx{-0.23, -0.11}};
}

int cmd_magic(const RunConfig& cfg) {
  const PotentialPair pot = make_potential(cfg.potential);
  const MagicAngleSet set =
      magic_angles(pot, cfg.trunc, cfg.k_probe, cfg.count, cfg.search_radius);

  if (cfg.json) {
    std::vector<std::string> angles;
    for (const auto& cand : set.angles) {
      JsonObject o;
      o.field("alpha_re", cand.alpha.real())
          .field("alpha_im", cand.alpha.imag())
          .field("residual", cand.residual)
          .field("multiplicity", long(cand.multiplicity));
      angles.push_back(o.str());
    }
    JsonObject root;
    root.field("trunc", long(set.trunc))
        .field("k_probe", format_complex(set.probe))
        .field("count", long(set.angles.size()))
        .field_raw("angles", json_array(angles));
    ensure_out(cfg);
    write_text_file(out_path(cfg, "magic.json"), root.str() + "\n");
  }

  // |alpha| scan of the Wronskian of the two protected states, with the
  // refined real candidates inserted so the dip is sampled exactly.
  std::vector<double> points;
  for (double a = cfg.scan_min; a <= cfg.scan_max + 1e-12; a += cfg.scan_step)
    points.push_back(a);
  for (const auto& cand : set.angles)
    if (std::abs(cand.alpha.imag()) < 1e-9 &&
        cand.alpha.real() >= cfg.scan_min - 1e-12 &&
        cand.alpha.real() <= cfg.scan_max + 1e-12)
      points.push_back(cand.alpha.real());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double x, double y) {
                             return std::abs(x - y) < 1e-12;
                           }),
               points.end());

  const auto samples = wronskian_samples();
  std::vector<std::vector<double>> rows(points.size());
  parallel_for(int(points.size()), [&](int i) {
    const cplx w =
        wronskian(cplx{points[std::size_t(i)], 0.0}, pot, cfg.scan_trunc,
                  samples);
    rows[std::size_t(i)] = {points[std::size_t(i)], w.real(), w.imag(),
                            std::abs(w)};
  });

  ensure_out(cfg);
  if (cfg.csv)
    write_text_file(out_path(cfg, "wronskian_scan.csv"),
                    csv_table({"alpha", "re_w", "im_w", "abs_w"}, rows));
  if (cfg.svg) {
    std::vector<double> xs, logw;
    for (const auto& r : rows) {
      xs.push_back(r[0]);
      logw.push_back(std::log10(std::max(r[3], 1e-300)));
    }
    write_text_file(out_path(cfg, "wronskian_scan.svg"),
                    svg_lines(xs, {logw}, "log10 |wronskian| vs alpha"));
  }
  return 0;
}

int cmd_bands(const RunConfig& cfg) {
  const PotentialPair pot = make_potential(cfg.potential);
  const std::vector<cplx> section = cross_section(cfg.cross_section);

  std::vector<std::vector<double>> rows(section.size());
  parallel_for(int(section.size()), [&](int i) {
    const cplx k = section[std::size_t(i)];
    const auto E = bands(cfg.alpha, pot, k, cfg.bands_count, cfg.trunc);
    double k1 = 0.0, k2 = 0.0;
    frame_coords(k, k1, k2);
    std::vector<double> row = {k1, k2, k.real(), k.imag()};
    row.insert(row.end(), E.begin(), E.end());
    rows[std::size_t(i)] = std::move(row);
  });

  std::vector<std::string> header = {"k1", "k2", "re_k", "im_k"};
  for (int b = 1; b <= cfg.bands_count; ++b)
    header.push_back("E" + std::to_string(b));

  ensure_out(cfg);
  if (cfg.csv)
    write_text_file(out_path(cfg, "bands.csv"), csv_table(header, rows));
  if (cfg.svg) {
    std::vector<double> xs;
    std::vector<std::vector<double>> ys(std::size_t(cfg.bands_count));
    for (const auto& r : rows) {
      xs.push_back(r[2]);
      for (int b = 0; b < cfg.bands_count; ++b)
        ys[std::size_t(b)].push_back(r[std::size_t(4 + b)]);
    }
    write_text_file(out_path(cfg, "bands.svg"),
                    svg_lines(xs, ys, "singular values along the section"));
  }

  if (cfg.rescaled) {
    const RescaledBand rb = rescaled_band(cfg.alpha, pot, cfg.grid, cfg.trunc);
    std::vector<std::vector<double>> rrows;
    for (int is = 0; is < cfg.grid; ++is)
      for (int it = 0; it < cfg.grid; ++it) {
        const int idx = rb.grid.index(is, it);
        rrows.push_back({rb.grid.coord1(is), rb.grid.coord2(it),
                         rb.E1_hat[std::size_t(idx)],
                         rb.comp_u[std::size_t(idx)],
                         rb.comp_du[std::size_t(idx)]});
      }
    if (cfg.csv)
      write_text_file(
          out_path(cfg, "rescaled.csv"),
          csv_table({"k1", "k2", "E1_hat", "comp_u", "comp_du"}, rrows));
    if (cfg.json) {
      JsonObject o;
      o.field("alpha_re", cfg.alpha.real())
          .field("alpha_im", cfg.alpha.imag())
          .field("dist_u", rb.dist_u)
          .field("dist_du", rb.dist_du);
      write_text_file(out_path(cfg, "rescaled.json"), o.str() + "\n");
    }
  }
  return 0;
}

int cmd_curvature(const RunConfig& cfg) {
  const PotentialPair pot = make_potential(cfg.potential);
  const BlochFamily fam =
      make_family(cfg.alpha, pot, cfg.trunc, cfg.zgrid);
  const CurvatureReport rep =
      curvature_report(fam, cfg.grid, cfg.cross_section);

  double total = 0.0;
  for (int is = 0; is < cfg.grid; ++is)
    for (int it = 0; it < cfg.grid; ++it) total += rep.H(is, it);
  const double dA = dual_cell_area() / double(cfg.grid) / double(cfg.grid);
  const double integral = -total * dA / pi;

  const PlaquetteResult plaq = chern_plaquette(fam, cfg.plaquette_grid, false);
  const PlaquetteResult conj = chern_plaquette(fam, cfg.plaquette_grid, true);
  const double boundary = chern_boundary(fam);

  ensure_out(cfg);
  if (cfg.csv) {
    std::vector<std::vector<double>> rows;
    for (int is = 0; is < cfg.grid; ++is)
      for (int it = 0; it < cfg.grid; ++it)
        rows.push_back(
            {rep.grid.coord1(is), rep.grid.coord2(it), rep.H(is, it)});
    write_text_file(out_path(cfg, "curvature.csv"),
                    csv_table({"k1", "k2", "H"}, rows));

    std::vector<std::vector<double>> srows;
    for (std::size_t i = 0; i < rep.section_k.size(); ++i) {
      double k1 = 0.0, k2 = 0.0;
      frame_coords(rep.section_k[i], k1, k2);
      srows.push_back({k1, k2, rep.section_H[i]});
    }
    write_text_file(out_path(cfg, "cross_section.csv"),
                    csv_table({"k1", "k2", "H"}, srows));
  }
  if (cfg.json) {
    JsonObject o;
    o.field("alpha_re", cfg.alpha.real())
        .field("alpha_im", cfg.alpha.imag())
        .field("trunc", long(cfg.trunc))
        .field("grid", long(cfg.grid))
        .field("integral", integral)
        .field("plaquette", long(plaq.chern))
        .field("plaquette_residual", plaq.residual)
        .field("conjugate_plaquette", long(conj.chern))
        .field("boundary", boundary)
        .field("H_Gamma", rep.H_Gamma)
        .field("H_K", rep.H_K)
        .field("H_Kprime", rep.H_Kprime)
        .field("grad_Gamma", rep.grad_Gamma)
        .field("grad_K", rep.grad_K)
        .field("grad_Kprime", rep.grad_Kprime)
        .field("max_H", rep.max_H)
        .field("min_H", rep.min_H);
    write_text_file(out_path(cfg, "chern.json"), o.str() + "\n");
  }
  if (cfg.svg)
    write_text_file(out_path(cfg, "curvature.svg"),
                    svg_heatmap(rep.H, "berry curvature"));
  return 0;
}

int cmd_zeros(const RunConfig& cfg, bool minus) {
  const PotentialPair pot = make_potential(cfg.potential);
  const cplx k = minus ? cplx{-K_point, 0.0} : cplx{K_point, 0.0};
  const BlochState state = protected_state(cfg.alpha, pot, k, cfg.trunc);
  const auto zeros = locate_zeros(state, cfg.zeros_grid);
  const ZeroTestResult ztest = flatband_zero_test(cfg.alpha, pot, cfg.trunc);

  ensure_out(cfg);
  if (cfg.csv) {
    std::vector<std::vector<double>> rows;
    for (const auto& rec : zeros)
      rows.push_back({rec.location.real(), rec.location.imag(),
                      double(rec.order), rec.residual});
    write_text_file(out_path(cfg, "zeros.csv"),
                    csv_table({"re_z", "im_z", "order", "residual"}, rows));
  }
  if (cfg.json) {
    JsonObject o;
    o.field("alpha_re", cfg.alpha.real())
        .field("alpha_im", cfg.alpha.imag())
        .field("momentum", std::string(minus ? "-K" : "+K"))
        .field("count", long(zeros.size()))
        .field("at_zS", ztest.at_zS)
        .field("at_minus_zS", ztest.at_minus_zS)
        .field("max_abs", ztest.max_abs)
        .field_bool("magic", ztest.magic);
    write_text_file(out_path(cfg, "zeros.json"), o.str() + "\n");
  }
  if (cfg.svg) {
    const int m = 64;
    const ComponentGrid g = evaluate_grid(state, m, 0.0);
    Eigen::MatrixXd field(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        field(i, j) = 0.5 * std::log10(std::max(
                                std::norm(g.c1(i, j)) + std::norm(g.c2(i, j)),
                                1e-300));
    write_text_file(out_path(cfg, "zeros.svg"),
                    svg_heatmap(field, "log10 |u| over the cell"));
  }
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  const PotentialPair pot = make_potential(cfg.potential);
  struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
  };
  std::vector<Check> checks;
  // A throwing check fails; its value is clamped for the JSON record.
  const auto guarded = [&](const std::string& name, double bound,
                           const std::function<double()>& fn) {
    double v = 0.0;
    bool threw = false;
    try {
      v = fn();
    } catch (const std::exception&) {
      threw = true;
      v = 1e308;
    }
    checks.push_back({name, !threw && v < bound, v});
  };

  guarded("potential_symmetries", 1e-10, [&] {
    return validate_symmetries(pot, pot.tag == PotentialTag::bm).worst();
  });
  guarded("frequency_classes", 0.5, [&] {
    check_frequency_classes(pot);
    return 0.0;
  });
  guarded("operator_relations", 1e-12, [&] {
    return check_relations(cfg.alpha, pot, 8, cfg.k_probe).worst();
  });
  guarded("theta_identities", 1e-12, [&] {
    const ThetaEvaluator th;
    double worst = 0.0;
    const std::vector<cplx> zs = {cplx{0.13, 0.31}, cplx{-0.42, 0.27},
                                  cplx{0.55, -0.18}};
    for (cplx z : zs) {
      worst = std::max(worst, std::abs(th.theta(-z) + th.theta(z)));
      worst = std::max(worst, std::abs(th.theta(z + 1.0) + th.theta(z)));
      const cplx factor =
          -std::exp(-cplx{0.0, pi} * omega - 2.0 * cplx{0.0, pi} * z);
      worst =
          std::max(worst, std::abs(th.theta(z + omega) - factor * th.theta(z)));
    }
    return worst;
  });
  guarded("green_kernel", 1e-6, [&] {
    const ThetaEvaluator th;
    double worst = 0.0;
    const std::vector<cplx> ks = {cplx{0.31, 0.17}, cplx{-1.1, 0.4}};
    const std::vector<cplx> zs = {cplx{0.21, 0.33}, cplx{-0.37, 0.51}};
    for (cplx k : ks)
      for (cplx z : zs)
        worst = std::max(worst,
                         std::abs(green_fourier(k, z) - th.F(k, z) / th.c(k)));
    return worst;
  });
  guarded("protected_residuals", 1e-6, [&] {
    const BlochState uK = protected_state(cfg.alpha, pot, K_point, cfg.trunc);
    const BlochState uMK =
        protected_state(cfg.alpha, pot, -K_point, cfg.trunc);
    return std::max(uK.residual, uMK.residual);
  });
  guarded("partner_residual", 1e-6, [&] {
    const BlochState uK = protected_state(cfg.alpha, pot, K_point, cfg.trunc);
    return partner_state(uK, pot).residual;
  });
  guarded("flat_derivative_at_K", 1e-8, [&] {
    const double dK = dE1_dalpha(cfg.alpha, pot, K_point, cfg.trunc);
    const double dMK = dE1_dalpha(cfg.alpha, pot, -K_point, cfg.trunc);
    return std::max(dK, dMK);
  });
  guarded("wronskian_constant", 0.5, [&] {
    const cplx w =
        wronskian(cfg.alpha, pot, cfg.scan_trunc, wronskian_samples());
    return (std::abs(w) > 0.0) ? 0.0 : 1.0;
  });

  bool all = true;
  std::vector<std::string> objs;
  for (const auto& c : checks) {
    all = all && c.pass;
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " ("
              << format_float(c.value) << ")\n";
    JsonObject o;
    o.field("name", c.name).field_bool("pass", c.pass).field("value", c.value);
    objs.push_back(o.str());
  }
  if (cfg.json) {
    ensure_out(cfg);
    JsonObject root;
    root.field_bool("all_pass", all).field_raw("checks", json_array(objs));
    write_text_file(out_path(cfg, "check.json"), root.str() + "\n");
  }
  return all ? 0 : 1;
}

int cmd_translate(const RunConfig& cfg, const std::string& kind,
                  const std::string& dir, const std::string& value) {
  const cplx in = parse_complex(value);
  Direction d;
  if (dir == "to_zeta") d = Direction::z_to_zeta;
  else if (dir == "to_z") d = Direction::zeta_to_z;
  else throw ConfigError("bad direction '" + dir + "' (to_zeta or to_z)");

  cplx out;
  if (kind == "position") out = translate_coordinates(in, d);
  else if (kind == "momentum") out = translate_momentum(in, d);
  else throw ConfigError("bad kind '" + kind + "' (position or momentum)");

  JsonObject o;
  o.field("kind", kind)
      .field("dir", dir)
      .field("in", format_complex(in))
      .field("out", format_complex(out))
      .field("out_re", out.real())
      .field("out_im", out.imag());
  const std::string text = o.str() + "\n";
  std::cout << text;
  if (cfg.json) {
    ensure_out(cfg);
    write_text_file(out_path(cfg, "translate.json"), text);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"spectral laboratory for the chiral twisted bilayer model"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, potential_s, alpha_s, kprobe_s;
  int trunc = 0, grid = 0, threads = 0, count = 0, bands_n = 0;
  int plaquette = 0, cross = 0, zgrid = 0, zeros_grid = 0, scan_trunc = 0;
  long seed = 0;
  double radius = 0.0;
  bool rescaled = false, minus = false;
  std::string kind = "momentum", dir = "to_zeta", value;

  auto* o_config = app.add_option("--config", config_path,
                                  "key = value configuration file");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_trunc = app.add_option("--trunc", trunc, "plane-wave truncation N");
  auto* o_grid = app.add_option("--grid", grid, "momentum grid size");
  auto* o_threads = app.add_option("--threads", threads, "worker threads");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_potential =
      app.add_option("--potential", potential_s,
                     "bm | theta_family:<x> | file:<path>");
  auto* o_alpha = app.add_option("--alpha", alpha_s, "coupling, a+bi");
  auto* o_kprobe = app.add_option("--k-probe", kprobe_s, "probe momentum");
  auto* o_zgrid = app.add_option("--zgrid", zgrid, "position quadrature grid");

  CLI::App* s_magic =
      app.add_subcommand("magic", "magic angles and the Wronskian scan");
  auto* o_count = s_magic->add_option("--count", count, "candidates kept");
  auto* o_radius =
      s_magic->add_option("--search-radius", radius, "candidate radius");
  auto* o_scan_trunc =
      s_magic->add_option("--scan-trunc", scan_trunc, "scan truncation");

  CLI::App* s_bands =
      app.add_subcommand("bands", "singular values along the k section");
  auto* o_bands = s_bands->add_option("--bands", bands_n, "bands per k");
  auto* o_cross_b =
      s_bands->add_option("--cross-section", cross, "section sample count");
  s_bands->add_flag("--rescaled", rescaled,
                    "also emit the rescaled-band comparison");

  CLI::App* s_curv = app.add_subcommand(
      "curvature", "berry curvature field and the chern number");
  auto* o_plaq = s_curv->add_option("--plaquette-grid", plaquette,
                                    "overlap plaquette grid");
  auto* o_cross_c =
      s_curv->add_option("--cross-section", cross, "section sample count");

  CLI::App* s_zeros =
      app.add_subcommand("zeros", "zeros of the protected state");
  s_zeros->add_flag("--minus", minus, "use k = -K instead of +K");
  auto* o_zeros_grid =
      s_zeros->add_option("--zeros-grid", zeros_grid, "coarse scan grid");

  CLI::App* s_check =
      app.add_subcommand("check", "invariant battery; fails with exit 1");

  CLI::App* s_translate =
      app.add_subcommand("translate", "convert between conventions");
  s_translate->add_option("--kind", kind, "position | momentum");
  s_translate->add_option("--dir", dir, "to_zeta | to_z");
  auto* o_value =
      s_translate->add_option("--value", value, "complex literal a+bi");
  o_value->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  RunConfig cfg;
  std::string command = "cli";
  try {
    if (o_config->count()) cfg = load_config(config_path);
    if (o_out->count()) cfg.out = out_dir;
    if (o_trunc->count()) cfg.trunc = trunc;
    if (o_grid->count()) cfg.grid = grid;
    if (o_threads->count()) cfg.threads = threads;
    if (o_seed->count()) cfg.seed = seed;
    if (o_potential->count()) cfg.potential = potential_s;
    if (o_alpha->count()) cfg.alpha = parse_complex(alpha_s);
    if (o_kprobe->count()) cfg.k_probe = parse_complex(kprobe_s);
    if (o_zgrid->count()) cfg.zgrid = zgrid;
    if (o_count->count()) cfg.count = count;
    if (o_radius->count()) cfg.search_radius = radius;
    if (o_scan_trunc->count()) cfg.scan_trunc = scan_trunc;
    if (o_bands->count()) cfg.bands_count = bands_n;
    if (o_cross_b->count() || o_cross_c->count()) cfg.cross_section = cross;
    if (o_plaq->count()) cfg.plaquette_grid = plaquette;
    if (o_zeros_grid->count()) cfg.zeros_grid = zeros_grid;

    if (cfg.trunc < 1 || cfg.grid < 1 || cfg.zgrid < 2 || cfg.count < 1 ||
        cfg.bands_count < 1 || cfg.scan_step <= 0.0 || cfg.scan_trunc < 1 ||
        cfg.cross_section < 2 || cfg.plaquette_grid < 2 || cfg.zeros_grid < 4)
      throw ConfigError("configuration value out of range");
  } catch (const ConfigError& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return 3;
  }

  try {
    apply_threads(cfg);
    if (app.got_subcommand(s_magic)) {
      command = "magic";
      return cmd_magic(cfg);
    }
    if (app.got_subcommand(s_bands)) {
      command = "bands";
      return cmd_bands(cfg);
    }
    if (app.got_subcommand(s_curv)) {
      command = "curvature";
      return cmd_curvature(cfg);
    }
    if (app.got_subcommand(s_zeros)) {
      command = "zeros";
      return cmd_zeros(cfg, minus);
    }
    if (app.got_subcommand(s_check)) {
      command = "check";
      return cmd_check(cfg);
    }
    if (app.got_subcommand(s_translate)) {
      command = "translate";
      return cmd_translate(cfg, kind, dir, value);
    }
    std::cerr << "error: no subcommand\n";
    return 3;
  } catch (const ConfigError& e) {
    emit_error(cfg, command, e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error(cfg, command, e.what());
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("ctbg");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run_cli(int(argv.size()), argv.data());
}

}  // namespace ctbg
