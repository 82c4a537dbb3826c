#include "fracspec/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "fracspec/extension.hpp"
#include "fracspec/fracops.hpp"
#include "fracspec/grid.hpp"
#include "fracspec/harnack.hpp"
#include "fracspec/spectral.hpp"
#include "fracspec/transfer.hpp"

namespace fracspec::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

/// thrown when a computation finishes but breaches its tolerance
struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
  const std::size_t n = std::fwrite(content.data(), 1, content.size(), f);
  const bool ok = (n == content.size()) && std::fflush(f) == 0;
  std::fclose(f);
  if (!ok || std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("write failed: " + path);
  }
}

/// report path empty: print to stdout instead
void emit_json(const std::string& path, const ordered_json& j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    std::fwrite(text.data(), 1, text.size(), stdout);
  else
    atomic_write(path, text);
}

// --- system selection -----------------------------------------------------

struct SysSpec {
  std::string name = "dirichlet";
  int modes = 64;
  double alpha = 0.5;
  double lambda = 1.5;
  std::vector<double> d;
  double lo = 0.0;
  double hi = std::numbers::pi;
  std::vector<int> cells;
  int dimension = 1;
  double xi_max = 40.0, x_max = 15.0, box_half = 12.0;
  double angle = 0.6;
  std::string boundary = "dirichlet";
};

std::shared_ptr<const SpectralSystem> make_system(const SysSpec& s) {
  if (s.modes < 1) throw std::invalid_argument("modes must be positive");
  const std::vector<double> d = s.d.empty() ? std::vector<double>{1.0} : s.d;
  const int per_axis = std::max(
      2, static_cast<int>(std::llround(std::sqrt(static_cast<double>(s.modes)))));
  if (s.name == "dirichlet") return make_dirichlet_interval(s.lo, s.hi, s.modes);
  if (s.name == "oscillator")
    return make_harmonic_oscillator(d, d.size() > 1 ? per_axis : s.modes, false);
  if (s.name == "oscillator_shifted")
    return make_harmonic_oscillator(d, d.size() > 1 ? per_axis : s.modes, true);
  if (s.name == "oscillator_rotated")
    return make_hermite_rotated(d.size() == 2 ? d : std::vector<double>{1.0, 2.0},
                                s.angle, per_axis);
  if (s.name == "gauss") return make_hermite_poly_gauss(d, s.modes);
  if (s.name == "laguerre_phi") return make_laguerre_phi({s.alpha}, s.modes);
  if (s.name == "laguerre_ell") return make_laguerre_ell(s.alpha, s.modes);
  if (s.name == "laguerre_psi") return make_laguerre_psi(s.alpha, s.modes);
  if (s.name == "laguerre_lfun") return make_laguerre_lfun(s.alpha, s.modes);
  if (s.name == "laguerre_poly") return make_laguerre_poly(s.alpha, s.modes);
  if (s.name == "ultraspherical_l") return make_ultraspherical_l(s.lambda, s.modes);
  if (s.name == "ultraspherical_poly")
    return make_ultraspherical_poly(s.lambda, s.modes);
  if (s.name == "bessel_s") return make_bessel_s(s.lambda, s.xi_max, s.x_max);
  if (s.name == "bessel_delta")
    return make_bessel_delta(s.lambda, s.xi_max, s.x_max);
  if (s.name == "fourier")
    return make_fourier_laplacian(s.dimension, s.box_half, s.xi_max);
  if (s.name == "fd") {
    FdGridSpec gs;
    gs.dim = s.cells.empty() ? 1 : static_cast<int>(s.cells.size());
    gs.cells = s.cells.empty() ? std::vector<int>{200} : s.cells;
    gs.lo.assign(static_cast<std::size_t>(gs.dim), s.lo);
    gs.hi.assign(static_cast<std::size_t>(gs.dim), s.hi);
    const ScalarField one = [](std::span<const double>) { return 1.0; };
    const ScalarField zero = [](std::span<const double>) { return 0.0; };
    const FdBoundary bc = s.boundary == "neumann" ? FdBoundary::neumann
                                                  : FdBoundary::dirichlet;
    return make_divergence_form_fd(one, zero, gs, 1.0, bc);
  }
  throw std::invalid_argument("unknown system: " + s.name);
}

ordered_json spec_json(const SysSpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["modes"] = s.modes;
  if (s.name.rfind("laguerre", 0) == 0) j["alpha"] = s.alpha;
  if (s.name.rfind("ultraspherical", 0) == 0 || s.name.rfind("bessel", 0) == 0)
    j["lambda"] = s.lambda;
  if (!s.d.empty()) j["d"] = s.d;
  if (s.name == "dirichlet" || s.name == "fd") {
    j["lo"] = s.lo;
    j["hi"] = s.hi;
  }
  if (s.name == "fd") {
    j["cells"] = s.cells.empty() ? std::vector<int>{200} : s.cells;
    j["boundary"] = s.boundary;
  }
  if (s.name == "fourier") {
    j["dimension"] = s.dimension;
    j["box_half"] = s.box_half;
  }
  if (s.name.rfind("bessel", 0) == 0 || s.name == "fourier")
    j["xi_max"] = s.xi_max;
  if (s.name == "oscillator_rotated") j["angle"] = s.angle;
  return j;
}

// --- config file ------------------------------------------------------------

ordered_json load_config(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::invalid_argument("config file not found: " + path);
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw std::invalid_argument("config file is not valid JSON: " + path);
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  static const char* known[] = {
      "system", "sigma",   "seed",     "trials", "scan",    "o",
      "k",      "generators", "fd_every", "fd_cells", "j_lo", "j_hi",
      "tol",    "y_count", "y_max",    "route",  "negative", "map",
      "gram_kmax", "input", "output",  "report", "csv",     "suite"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw std::invalid_argument("unknown config key: " + item.key());
  }
  if (j.contains("system")) {
    static const char* skeys[] = {"name",   "modes",    "alpha", "lambda",
                                  "d",      "lo",       "hi",    "cells",
                                  "dimension", "xi_max", "x_max", "box_half",
                                  "angle",  "boundary"};
    for (const auto& item : j["system"].items()) {
      bool ok = false;
      for (const char* k : skeys) ok = ok || item.key() == k;
      if (!ok)
        throw std::invalid_argument("unknown system config key: " + item.key());
    }
  }
  return j;
}

Box box_from_json(const ordered_json& j, const char* what) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
    throw std::invalid_argument(std::string(what) +
                                " region needs lo/hi arrays");
  Box b;
  b.lo = j["lo"].get<std::vector<double>>();
  b.hi = j["hi"].get<std::vector<double>>();
  if (b.lo.size() != b.hi.size() || b.lo.empty())
    throw std::invalid_argument(std::string(what) + " region is malformed");
  return b;
}

// --- small CSV builders -----------------------------------------------------

std::string coefficients_csv(const Coefficients& c) {
  const auto& sys = *c.system;
  const auto d = static_cast<std::size_t>(
      sys.mode_index(0).size());
  std::string out;
  for (std::size_t a = 0; a < d; ++a)
    out += "k" + std::to_string(a + 1) + ",";
  out += "lambda,coefficient\r\n";
  for (std::size_t m = 0; m < c.values.size(); ++m) {
    const auto idx = sys.mode_index(m);
    for (int k : idx) {
      out += std::to_string(k);
      out += ',';
    }
    out += format_double(sys.eigenvalue(m));
    out += ',';
    out += format_double(c.values[m]);
    out += "\r\n";
  }
  return out;
}

std::string trials_csv(const SurveyReport& rep) {
  std::string out;
  const std::size_t d = rep.records.empty() ? 1 : rep.records[0].center.size();
  out += "trial,";
  for (std::size_t a = 0; a < d; ++a)
    out += "center" + std::to_string(a + 1) + ",";
  for (std::size_t a = 0; a < d; ++a)
    out += "half_width" + std::to_string(a + 1) + ",";
  out += "height,ratio,sup,inf,residual,min_f,fd_ratio_gap,accepted,note\r\n";
  for (const auto& r : rep.records) {
    out += std::to_string(r.index);
    out += ',';
    for (double v : r.center) {
      out += format_double(v);
      out += ',';
    }
    for (double v : r.half_width) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(r.height);
    out += ',';
    out += format_double(r.ratio);
    out += ',';
    out += format_double(r.sup);
    out += ',';
    out += format_double(r.inf);
    out += ',';
    out += format_double(r.residual);
    out += ',';
    out += format_double(r.min_f);
    out += ',';
    out += format_double(r.fd_ratio_gap);
    out += ',';
    out += r.accepted ? "1" : "0";
    out += ',';
    out += r.note;
    out += "\r\n";
  }
  return out;
}

// --- shared option state ------------------------------------------------------

struct Options {
  SysSpec spec;
  double sigma = 0.5;
  std::uint64_t seed = 1;
  int trials = 200;
  int scan = 200;
  int fd_every = 0;
  std::size_t fd_cells = 48;
  int j_lo = 5, j_hi = 12;
  double tol = 1e-3;
  int y_count = 8;
  double y_max = 1.0;
  std::string route = "spectral";
  bool negative = false;
  std::string map_name = "all";
  std::size_t gram_kmax = 20;
  std::string input, output, report, csv, suite = "all";
  std::string config_path;
  // 1-d region shorthands for the survey
  double o_lo = 1.0, o_hi = 2.0;
  double k_lo = 1.25, k_hi = 1.75;
  double gen_lo = 2.3, gen_hi = 3.0;
  bool have_boxes = false;
  Box box_o, box_k, box_gen;
};

void apply_config(Options& o, const ordered_json& cfg) {
  if (cfg.contains("system")) {
    const auto& s = cfg["system"];
    if (s.contains("name")) o.spec.name = s["name"].get<std::string>();
    if (s.contains("modes")) o.spec.modes = s["modes"].get<int>();
    if (s.contains("alpha")) o.spec.alpha = s["alpha"].get<double>();
    if (s.contains("lambda")) o.spec.lambda = s["lambda"].get<double>();
    if (s.contains("d")) o.spec.d = s["d"].get<std::vector<double>>();
    if (s.contains("lo")) o.spec.lo = s["lo"].get<double>();
    if (s.contains("hi")) o.spec.hi = s["hi"].get<double>();
    if (s.contains("cells")) o.spec.cells = s["cells"].get<std::vector<int>>();
    if (s.contains("dimension")) o.spec.dimension = s["dimension"].get<int>();
    if (s.contains("xi_max")) o.spec.xi_max = s["xi_max"].get<double>();
    if (s.contains("x_max")) o.spec.x_max = s["x_max"].get<double>();
    if (s.contains("box_half")) o.spec.box_half = s["box_half"].get<double>();
    if (s.contains("angle")) o.spec.angle = s["angle"].get<double>();
    if (s.contains("boundary"))
      o.spec.boundary = s["boundary"].get<std::string>();
  }
  if (cfg.contains("sigma")) o.sigma = cfg["sigma"].get<double>();
  if (cfg.contains("seed")) o.seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.contains("trials")) o.trials = cfg["trials"].get<int>();
  if (cfg.contains("scan")) o.scan = cfg["scan"].get<int>();
  if (cfg.contains("fd_every")) o.fd_every = cfg["fd_every"].get<int>();
  if (cfg.contains("fd_cells"))
    o.fd_cells = cfg["fd_cells"].get<std::size_t>();
  if (cfg.contains("j_lo")) o.j_lo = cfg["j_lo"].get<int>();
  if (cfg.contains("j_hi")) o.j_hi = cfg["j_hi"].get<int>();
  if (cfg.contains("tol")) o.tol = cfg["tol"].get<double>();
  if (cfg.contains("y_count")) o.y_count = cfg["y_count"].get<int>();
  if (cfg.contains("y_max")) o.y_max = cfg["y_max"].get<double>();
  if (cfg.contains("route")) o.route = cfg["route"].get<std::string>();
  if (cfg.contains("negative")) o.negative = cfg["negative"].get<bool>();
  if (cfg.contains("map")) o.map_name = cfg["map"].get<std::string>();
  if (cfg.contains("gram_kmax"))
    o.gram_kmax = cfg["gram_kmax"].get<std::size_t>();
  if (cfg.contains("input")) o.input = cfg["input"].get<std::string>();
  if (cfg.contains("output")) o.output = cfg["output"].get<std::string>();
  if (cfg.contains("report")) o.report = cfg["report"].get<std::string>();
  if (cfg.contains("csv")) o.csv = cfg["csv"].get<std::string>();
  if (cfg.contains("suite")) o.suite = cfg["suite"].get<std::string>();
  if (cfg.contains("o")) {
    o.box_o = box_from_json(cfg["o"], "o");
    o.have_boxes = true;
  }
  if (cfg.contains("k")) o.box_k = box_from_json(cfg["k"], "k");
  if (cfg.contains("generators"))
    o.box_gen = box_from_json(cfg["generators"], "generators");
}

void check_sigma_range(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("sigma must lie in (0, 1)");
}

ordered_json base_config_echo(const std::string& command, const Options& o) {
  ordered_json c;
  c["command"] = command;
  c["system"] = spec_json(o.spec);
  c["sigma"] = o.sigma;
  c["seed"] = o.seed;
  return c;
}

// --- subcommand handlers ------------------------------------------------------

int cmd_catalog(const Options& o) {
  ordered_json j;
  j["quantity"] = "catalog";
  ordered_json systems = ordered_json::array();
  static const char* names[] = {
      "dirichlet",       "oscillator",         "oscillator_shifted",
      "oscillator_rotated", "gauss",           "laguerre_phi",
      "laguerre_ell",    "laguerre_psi",       "laguerre_lfun",
      "laguerre_poly",   "ultraspherical_l",   "ultraspherical_poly",
      "bessel_s",        "bessel_delta",       "fourier",
      "fd"};
  for (const char* n : names) {
    SysSpec s = o.spec;
    s.name = n;
    s.modes = 8;
    if (s.name == "fd") s.cells = {32};
    const auto sys = make_system(s);
    ordered_json row;
    row["name"] = n;
    row["label"] = sys->name();
    row["dim"] = sys->dim();
    row["flavor"] =
        sys->flavor() == Flavor::discrete ? "discrete" : "continuous";
    row["positivity_preserving"] = sys->positivity_preserving();
    row["eigenvalue_growth_exponent"] = sys->eigenvalue_growth_exponent();
    systems.push_back(row);
  }
  j["systems"] = systems;
  ordered_json maps = ordered_json::array();
  for (const auto& m : builtin_maps(8)) {
    ordered_json row;
    row["name"] = m.name;
    row["source"] = m.source->name();
    row["target"] = m.target->name();
    row["shift"] = m.shift;
    row["tolerance"] = m.tolerance;
    maps.push_back(row);
  }
  j["transference_maps"] = maps;
  emit_json(o.report.empty() ? o.output : o.report, j);
  return 0;
}

int cmd_analyze(const Options& o) {
  if (o.input.empty()) throw std::invalid_argument("--input is required");
  const auto sys = make_system(o.spec);
  const GridFunction samples = read_csv(o.input);
  const Coefficients c = sys->analyze(samples);
  if (!o.output.empty()) atomic_write(o.output, coefficients_csv(c));
  ordered_json j;
  j["quantity"] = "coefficients";
  j["config"] = base_config_echo("analyze", o);
  j["config"]["input"] = o.input;
  j["modes"] = c.values.size();
  j["input_norm2"] = c.input_norm2;
  j["coefficient_norm2"] = c.norm2();
  j["parseval_defect"] = c.parseval_defect();
  if (!o.output.empty()) j["coefficients_csv"] = o.output;
  emit_json(o.report, j);
  return 0;
}

int cmd_frac_apply(const Options& o) {
  check_sigma_range(o.sigma);
  if (o.input.empty()) throw std::invalid_argument("--input is required");
  if (o.route != "spectral" && o.route != "balakrishnan")
    throw std::invalid_argument("route must be spectral or balakrishnan");
  const auto sys = make_system(o.spec);
  const GridFunction samples = read_csv(o.input);
  const Coefficients c = sys->analyze(samples);
  Coefficients d;
  if (o.negative)
    d = neg_frac_power(c, o.sigma, ZeroModePolicy::drop);
  else if (o.route == "balakrishnan")
    d = frac_power_balakrishnan(c, o.sigma);
  else
    d = frac_power_spectral(c, o.sigma);
  GridFunction out = samples;
  out.values = sys->synthesize_values(d, samples);
  if (!o.output.empty()) atomic_write(o.output, to_csv(out));
  ordered_json j;
  j["quantity"] = o.negative ? "negative_fractional_apply" : "fractional_apply";
  j["config"] = base_config_echo("frac-apply", o);
  j["config"]["route"] = o.route;
  j["config"]["negative"] = o.negative;
  j["config"]["input"] = o.input;
  j["parseval_defect"] = c.parseval_defect();
  j["input_norm2"] = c.input_norm2;
  j["result_norm2"] = d.norm2();
  if (!o.output.empty()) j["samples_csv"] = o.output;
  emit_json(o.report, j);
  return 0;
}

int cmd_extend(const Options& o) {
  check_sigma_range(o.sigma);
  if (o.input.empty()) throw std::invalid_argument("--input is required");
  if (o.y_count < 1 || !(o.y_max > 0.0))
    throw std::invalid_argument("extension band is malformed");
  const auto sys = make_system(o.spec);
  const GridFunction samples = read_csv(o.input);
  const Coefficients c = sys->analyze(samples);
  std::vector<double> levels(static_cast<std::size_t>(2 * o.y_count));
  const double h = 2.0 * o.y_max / static_cast<double>(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i)
    levels[i] = -o.y_max + (static_cast<double>(i) + 0.5) * h;
  const GridFunction band = reflect_even(c, o.sigma, samples, levels);
  if (!o.output.empty()) atomic_write(o.output, to_csv(band));
  ordered_json j;
  j["quantity"] = "extension_samples";
  j["config"] = base_config_echo("extend", o);
  j["config"]["input"] = o.input;
  j["config"]["y_count"] = o.y_count;
  j["config"]["y_max"] = o.y_max;
  j["points"] = band.size();
  j["parseval_defect"] = c.parseval_defect();
  if (!o.output.empty()) j["samples_csv"] = o.output;
  emit_json(o.report, j);
  return 0;
}

int cmd_trace(const Options& o) {
  check_sigma_range(o.sigma);
  if (o.input.empty()) throw std::invalid_argument("--input is required");
  const auto sys = make_system(o.spec);
  const GridFunction samples = read_csv(o.input);
  const Coefficients c = sys->analyze(samples);
  const Coefficients exact = frac_power_spectral(c, o.sigma);
  const Coefficients ladder = trace_derivative(c, o.sigma, o.j_lo, o.j_hi);
  double scale = 0.0;
  for (double v : exact.values) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t m = 0; m < exact.values.size(); ++m) {
    if (std::abs(exact.values[m]) <= 1e-14 * scale) continue;
    worst = std::max(worst, std::abs(ladder.values[m] - exact.values[m]) /
                                std::abs(exact.values[m]));
  }
  if (!o.output.empty()) {
    std::string csv = "k1,lambda,spectral,trace\r\n";
    for (std::size_t m = 0; m < exact.values.size(); ++m) {
      csv += std::to_string(m) + ',' + format_double(sys->eigenvalue(m)) +
             ',' + format_double(exact.values[m]) + ',' +
             format_double(ladder.values[m]) + "\r\n";
    }
    atomic_write(o.output, csv);
  }
  ordered_json j;
  j["quantity"] = "neumann_trace";
  j["config"] = base_config_echo("trace", o);
  j["config"]["input"] = o.input;
  j["config"]["j_lo"] = o.j_lo;
  j["config"]["j_hi"] = o.j_hi;
  j["config"]["tol"] = o.tol;
  j["max_relative_gap"] = worst;
  if (!o.output.empty()) j["table_csv"] = o.output;
  emit_json(o.report, j);
  if (worst > o.tol)
    throw ToleranceError("trace ladder disagrees with the spectral route");
  return 0;
}

int cmd_transfer_check(const Options& o) {
  check_sigma_range(o.sigma);
  auto maps = builtin_maps(o.spec.modes);
  ordered_json rows = ordered_json::array();
  bool breach = false;
  for (const auto& m : maps) {
    if (o.map_name != "all" && o.map_name != m.name) continue;
    const auto rep = verify_intertwining(m, o.sigma, o.trials, o.seed);
    const double gram = gram_transport_defect(m, o.gram_kmax);
    const double invo = involution_defect(m, o.seed);
    ordered_json row;
    row["map"] = m.name;
    row["source"] = m.source->name();
    row["target"] = m.target->name();
    row["shift"] = m.shift;
    row["trials"] = rep.trials;
    row["intertwining_discrepancy"] = rep.discrepancy;
    row["intertwining_tolerance"] = m.tolerance;
    row["gram_defect"] = gram;
    row["involution_defect"] = invo;
    const bool ok =
        rep.discrepancy <= m.tolerance && gram <= 1e-8 && invo <= 1e-12;
    row["pass"] = ok;
    breach = breach || !ok;
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("unknown map: " + o.map_name);
  ordered_json j;
  j["quantity"] = "intertwining_check";
  j["config"] = base_config_echo("transfer-check", o);
  j["config"]["map"] = o.map_name;
  j["config"]["trials"] = o.trials;
  j["config"]["gram_kmax"] = o.gram_kmax;
  j["maps"] = rows;
  emit_json(o.report, j);
  if (breach) throw ToleranceError("transference verification breached");
  return 0;
}

int cmd_harnack(const Options& o) {
  check_sigma_range(o.sigma);
  SurveyConfig cfg;
  cfg.system = make_system(o.spec);
  cfg.sigma = o.sigma;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.scan_per_axis = o.scan;
  cfg.fd_every = o.fd_every;
  cfg.fd_cells = o.fd_cells;
  if (o.have_boxes) {
    cfg.region_o = o.box_o;
    cfg.compact_k = o.box_k;
    cfg.generators = o.box_gen;
  } else {
    cfg.region_o = Box{{o.o_lo}, {o.o_hi}};
    cfg.compact_k = Box{{o.k_lo}, {o.k_hi}};
    cfg.generators = Box{{o.gen_lo}, {o.gen_hi}};
  }
  const SurveyReport rep = run_survey(cfg);
  if (!o.csv.empty()) atomic_write(o.csv, trials_csv(rep));
  ordered_json j;
  j["quantity"] = "harnack_survey";
  j["config"] = base_config_echo("harnack", o);
  j["config"]["trials"] = o.trials;
  j["config"]["scan"] = o.scan;
  j["config"]["o"] = {{"lo", cfg.region_o.lo}, {"hi", cfg.region_o.hi}};
  j["config"]["k"] = {{"lo", cfg.compact_k.lo}, {"hi", cfg.compact_k.hi}};
  j["config"]["generators"] = {{"lo", cfg.generators.lo},
                               {"hi", cfg.generators.hi}};
  j["config"]["fd_every"] = o.fd_every;
  ordered_json stats;
  stats["accepted"] = rep.accepted;
  stats["excluded_support"] = rep.excluded_support;
  stats["excluded_negative"] = rep.excluded_negative;
  stats["excluded_residual"] = rep.excluded_residual;
  stats["excluded_unbounded"] = rep.excluded_unbounded;
  stats["c_emp"] = rep.c_emp;
  stats["quartile1"] = rep.quartile1;
  stats["median"] = rep.median;
  stats["quartile3"] = rep.quartile3;
  stats["fd_checked"] = rep.fd_checked;
  stats["fd_max_gap"] = rep.fd_max_gap;
  j["statistics"] = stats;
  if (!o.csv.empty()) j["trials_csv"] = o.csv;
  emit_json(o.report, j);
  return 0;
}

// --- verify suites -------------------------------------------------------------

ordered_json suite_route_agreement(bool& pass) {
  ordered_json rows = ordered_json::array();
  const double sigmas[3] = {0.25, 0.5, 0.75};
  SysSpec specs[2];
  specs[0].name = "dirichlet";
  specs[1].name = "oscillator";
  for (const auto& sp : specs) {
    const auto sys = make_system(sp);
    auto c = sys->zero_coefficients();
    for (std::size_t k = 0; k < std::min<std::size_t>(12, c.values.size()); ++k)
      c.values[k] = 1.0 / ((1.0 + static_cast<double>(k)) *
                           (1.0 + static_cast<double>(k)));
    for (double s : sigmas) {
      const Coefficients a = frac_power_spectral(c, s);
      const Coefficients b = frac_power_balakrishnan(c, s);
      double num = 0.0, den = 0.0;
      for (std::size_t m = 0; m < a.values.size(); ++m) {
        num += (a.values[m] - b.values[m]) * (a.values[m] - b.values[m]);
        den += a.values[m] * a.values[m];
      }
      const double rel = std::sqrt(num / std::max(den, 1e-300));
      ordered_json row;
      row["system"] = sys->name();
      row["sigma"] = s;
      row["relative_gap"] = rel;
      row["pass"] = rel <= 1e-6;
      pass = pass && rel <= 1e-6;
      rows.push_back(row);
    }
  }
  return rows;
}

ordered_json suite_trace_identity(bool& pass) {
  ordered_json rows = ordered_json::array();
  const double lambdas[3] = {1.0, 4.0, 25.0};
  const double sigmas[3] = {0.25, 0.5, 0.75};
  for (double lam : lambdas)
    for (double s : sigmas) {
      const TraceLadder tl = trace_ladder(lam, s, 5, 12);
      const double target = std::pow(lam, s);
      const double gap = std::abs(tl.extrapolated - target);
      ordered_json row;
      row["lambda"] = lam;
      row["sigma"] = s;
      row["extrapolated"] = tl.extrapolated;
      row["gap"] = gap;
      row["pass"] = gap <= 1e-3 * target;
      pass = pass && gap <= 1e-3 * target;
      rows.push_back(row);
    }
  return rows;
}

ordered_json suite_multiplier(bool& pass) {
  ordered_json rows = ordered_json::array();
  double worst = 0.0;
  int count = 0;
  for (int iy = 0; iy < 10; ++iy)
    for (double lam : {0.5, 5.0, 50.0})
      for (double s : {0.25, 0.7}) {
        const double y = std::ldexp(1.0, iy - 6);
        const double a = extension_multiplier(y, lam, s);
        const double b = extension_multiplier_quadrature(y, lam, s);
        worst = std::max(worst, std::abs(a - b));
        ++count;
      }
  ordered_json row;
  row["triples"] = count;
  row["max_gap"] = worst;
  row["pass"] = worst <= 1e-8;
  pass = pass && worst <= 1e-8;
  rows.push_back(row);
  return rows;
}

ordered_json suite_maximum_principle(bool& pass) {
  ordered_json rows = ordered_json::array();
  SysSpec specs[2];
  specs[0].name = "dirichlet";
  specs[1].name = "oscillator";
  for (const auto& sp : specs) {
    const auto sys = make_system(sp);
    const auto rep = maximum_principle_trials(sys, 0.5, 10, 7);
    ordered_json row;
    row["system"] = sys->name();
    row["trials"] = rep.trials;
    row["violations"] = rep.violations;
    row["worst"] = rep.worst;
    row["pass"] = rep.violations == 0;
    pass = pass && rep.violations == 0;
    rows.push_back(row);
  }
  return rows;
}

ordered_json suite_transference(bool& pass) {
  ordered_json rows = ordered_json::array();
  for (const auto& m : builtin_maps(32)) {
    const auto rep = verify_intertwining(m, 0.5, 3, 11);
    const double gram = gram_transport_defect(m, 12);
    const double invo = involution_defect(m, 11);
    const bool ok =
        rep.discrepancy <= m.tolerance && gram <= 1e-8 && invo <= 1e-12;
    ordered_json row;
    row["map"] = m.name;
    row["intertwining_discrepancy"] = rep.discrepancy;
    row["gram_defect"] = gram;
    row["involution_defect"] = invo;
    row["pass"] = ok;
    pass = pass && ok;
    rows.push_back(row);
  }
  return rows;
}

int cmd_verify(const Options& o) {
  ordered_json j;
  j["quantity"] = "verify_suite";
  j["config"] = base_config_echo("verify", o);
  j["config"]["suite"] = o.suite;
  bool pass = true;
  ordered_json suites;
  const bool all = o.suite == "all";
  bool matched = false;
  if (all || o.suite == "route-agreement") {
    suites["route-agreement"] = suite_route_agreement(pass);
    matched = true;
  }
  if (all || o.suite == "trace-identity") {
    suites["trace-identity"] = suite_trace_identity(pass);
    matched = true;
  }
  if (all || o.suite == "multiplier") {
    suites["multiplier"] = suite_multiplier(pass);
    matched = true;
  }
  if (all || o.suite == "maximum-principle") {
    suites["maximum-principle"] = suite_maximum_principle(pass);
    matched = true;
  }
  if (all || o.suite == "transference") {
    suites["transference"] = suite_transference(pass);
    matched = true;
  }
  if (!matched) throw std::invalid_argument("unknown suite: " + o.suite);
  j["suites"] = suites;
  j["pass"] = pass;
  emit_json(o.report, j);
  if (!pass) throw ToleranceError("verification suite breached a tolerance");
  return 0;
}

// --- option wiring ---------------------------------------------------------------

void add_system_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--system", o.spec.name,
                  "system id (see `fracspec catalog`)");
  cmd->add_option("--modes", o.spec.modes, "basis truncation");
  cmd->add_option("--alpha", o.spec.alpha, "Laguerre parameter");
  cmd->add_option("--lambda", o.spec.lambda,
                  "ultraspherical/Bessel parameter");
  cmd->add_option("--d", o.spec.d, "oscillator axis weights");
  cmd->add_option("--lo", o.spec.lo, "interval left end");
  cmd->add_option("--hi", o.spec.hi, "interval right end");
  cmd->add_option("--cells", o.spec.cells, "difference-grid cells per axis");
  cmd->add_option("--dimension", o.spec.dimension, "dimension (fourier)");
  cmd->add_option("--xi-max", o.spec.xi_max, "spectral window");
  cmd->add_option("--x-max", o.spec.x_max, "domain window (bessel)");
  cmd->add_option("--box-half", o.spec.box_half, "domain half-width (fourier)");
  cmd->add_option("--angle", o.spec.angle, "rotation angle");
  cmd->add_option("--boundary", o.spec.boundary,
                  "fd boundary condition: dirichlet|neumann");
}

int run_impl(int argc, const char* const* argv) {
  Options o;

  // the config file seeds the defaults; explicit flags then override
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") o.config_path = argv[i + 1];
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--config=", 0) == 0) o.config_path = a.substr(9);
  }
  if (!o.config_path.empty()) apply_config(o, load_config(o.config_path));

  CLI::App app{"spectral toolkit for fractional powers of second-order operators"};
  app.require_subcommand(1);
  std::string config_sink;
  app.add_option("--config", config_sink, "JSON config file (defaults)")
      ->expected(1);

  auto* catalog = app.add_subcommand("catalog", "list systems and maps");
  catalog->add_option("--report", o.report, "output JSON path");
  add_system_options(catalog, o);

  auto* analyze = app.add_subcommand("analyze", "expand samples in a basis");
  add_system_options(analyze, o);
  analyze->add_option("--input", o.input, "samples CSV");
  analyze->add_option("--output", o.output, "coefficients CSV");
  analyze->add_option("--report", o.report, "report JSON");

  auto* frac = app.add_subcommand("frac-apply", "apply a fractional power");
  add_system_options(frac, o);
  frac->add_option("--sigma", o.sigma, "fractional order in (0,1)");
  frac->add_option("--route", o.route, "spectral|balakrishnan");
  frac->add_flag("--negative", o.negative, "apply the negative power");
  frac->add_option("--input", o.input, "samples CSV");
  frac->add_option("--output", o.output, "result samples CSV");
  frac->add_option("--report", o.report, "report JSON");

  auto* extend = app.add_subcommand("extend", "sample the reflected extension");
  add_system_options(extend, o);
  extend->add_option("--sigma", o.sigma, "fractional order in (0,1)");
  extend->add_option("--input", o.input, "trace samples CSV");
  extend->add_option("--y-count", o.y_count, "levels per band half");
  extend->add_option("--y-max", o.y_max, "band half-width");
  extend->add_option("--output", o.output, "band samples CSV");
  extend->add_option("--report", o.report, "report JSON");

  auto* trace = app.add_subcommand("trace", "Neumann-trace ladder check");
  add_system_options(trace, o);
  trace->add_option("--sigma", o.sigma, "fractional order in (0,1)");
  trace->add_option("--input", o.input, "samples CSV");
  trace->add_option("--j-lo", o.j_lo, "coarsest level exponent");
  trace->add_option("--j-hi", o.j_hi, "finest level exponent");
  trace->add_option("--tol", o.tol, "relative tolerance");
  trace->add_option("--output", o.output, "per-mode table CSV");
  trace->add_option("--report", o.report, "report JSON");

  auto* transfer = app.add_subcommand("transfer-check",
                                      "verify transference maps");
  transfer->add_option("--map", o.map_name, "map name or 'all'");
  transfer->add_option("--modes", o.spec.modes, "basis truncation");
  transfer->add_option("--sigma", o.sigma, "fractional order in (0,1)");
  transfer->add_option("--trials", o.trials, "random functions per map");
  transfer->add_option("--seed", o.seed, "PRNG seed");
  transfer->add_option("--gram-kmax", o.gram_kmax, "Gram block size");
  transfer->add_option("--report", o.report, "report JSON");

  auto* harnack = app.add_subcommand("harnack", "ratio survey");
  add_system_options(harnack, o);
  harnack->add_option("--sigma", o.sigma, "fractional order in (0,1)");
  harnack->add_option("--trials", o.trials, "generator count");
  harnack->add_option("--seed", o.seed, "PRNG seed");
  harnack->add_option("--scan", o.scan, "scan resolution per axis");
  harnack->add_option("--o-lo", o.o_lo, "solve region left end");
  harnack->add_option("--o-hi", o.o_hi, "solve region right end");
  harnack->add_option("--k-lo", o.k_lo, "compact region left end");
  harnack->add_option("--k-hi", o.k_hi, "compact region right end");
  harnack->add_option("--gen-lo", o.gen_lo, "generator region left end");
  harnack->add_option("--gen-hi", o.gen_hi, "generator region right end");
  harnack->add_option("--fd-every", o.fd_every,
                      "degenerate-solver cross-check stride (0 = off)");
  harnack->add_option("--fd-cells", o.fd_cells, "degenerate-solver cells");
  harnack->add_option("--csv", o.csv, "per-trial CSV");
  harnack->add_option("--report", o.report, "report JSON");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", o.suite,
                     "route-agreement|trace-identity|multiplier|"
                     "maximum-principle|transference|all");
  verify->add_option("--report", o.report, "report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    ordered_json err;
    err["error"] = {{"kind", "config"}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  }

  if (catalog->parsed()) return cmd_catalog(o);
  if (analyze->parsed()) return cmd_analyze(o);
  if (frac->parsed()) return cmd_frac_apply(o);
  if (extend->parsed()) return cmd_extend(o);
  if (trace->parsed()) return cmd_trace(o);
  if (transfer->parsed()) return cmd_transfer_check(o);
  if (harnack->parsed()) return cmd_harnack(o);
  if (verify->parsed()) return cmd_verify(o);
  throw std::invalid_argument("no subcommand chosen");
}

}  // namespace

int run(int argc, const char* const* argv) {
  try {
    return run_impl(argc, argv);
  } catch (const ToleranceError& e) {
    ordered_json err;
    err["error"] = {{"kind", "numeric"}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 3;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = {{"kind", "config"}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  }
}

}  // namespace fracspec::cli
