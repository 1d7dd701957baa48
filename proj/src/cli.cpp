#include "nvodmr/cli.hpp"

#include "nvodmr/config.hpp"
#include "nvodmr/csv.hpp"
#include "nvodmr/electrometry.hpp"
#include "nvodmr/sensing.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nvodmr {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string param;
  std::string range;
  std::string spectra_dir;
  bool quiet = false;
};

struct Output {
  std::vector<std::string> comments;
  std::string_view header;
  std::vector<CsvRow> rows;
};

std::vector<std::string> provenance(const std::string& command, const RunConfig& cfg,
                                    const Options& opt) {
  std::vector<std::string> c;
  c.push_back("config:");
  c.push_back("  command = " + command);
  for (const auto& [k, v] : cfg.entries) c.push_back("  " + k + " = " + v);
  if (!opt.param.empty()) c.push_back("  param = " + opt.param);
  if (!opt.range.empty()) c.push_back("  range = " + opt.range);
  return c;
}

CsvRow numeric_row(std::initializer_list<double> v) {
  CsvRow r;
  for (double x : v) r.push_back(format_number(x));
  return r;
}

void emit(const Output& o, const Options& opt, std::ostream& out) {
  if (opt.out.empty()) {
    write_csv(out, o.comments, o.header, o.rows);
    return;
  }
  std::ofstream f(opt.out, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidInput("cannot open output file '" + opt.out + "'");
  write_csv(f, o.comments, o.header, o.rows);
  if (!f) throw InvalidInput("failed writing output file '" + opt.out + "'");
}

void report_warnings(const Warnings& w, const Options& opt, std::ostream& err) {
  if (opt.quiet) return;
  for (const auto& m : w) err << "warning: " << m << '\n';
}

std::vector<double> angles_deg(const std::string& range, const std::string& fallback) {
  std::vector<double> phis;
  for (double d : parse_range(range.empty() ? fallback : range)) phis.push_back(deg_to_rad(d));
  return phis;
}

Output cmd_spectrum(const RunConfig& cfg, const Options& opt, std::ostream& err) {
  const Spectrum s = ensemble_spectrum(cfg.scene.resolve());
  report_warnings(s.warnings, opt, err);
  Output o{provenance("spectrum", cfg, opt), csv_header::kSpectrum, {}};
  for (std::size_t i = 0; i < s.values.size(); ++i) o.rows.push_back(numeric_row({s.grid.at(i), s.values[i]}));
  return o;
}

Output cmd_sensitivity(const RunConfig& cfg, const Options& opt, std::ostream& err) {
  const SensitivitySpectrum s = sensitivity_spectrum(cfg.scene.resolve(), cfg.sensitivity);
  report_warnings(s.warnings, opt, err);
  Output o{provenance("sensitivity", cfg, opt), csv_header::kSensitivity, {}};
  for (std::size_t i = 0; i < s.ds.size(); ++i) o.rows.push_back(numeric_row({s.grid.at(i), s.ds[i]}));
  return o;
}

Output cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& err) {
  if (opt.param.empty()) throw InvalidInput("sweep requires --param");
  if (opt.range.empty()) throw InvalidInput("sweep requires --range");
  const auto p = parse_sweep_parameter(opt.param);
  if (!p)
    throw InvalidInput("unknown sweep parameter '" + opt.param +
                       "'; expected B_magnitude, B_polar_misalignment, phi_mw, phi_B or E_magnitude");
  const std::vector<double> user = parse_range(opt.range);
  std::vector<double> values;
  for (double v : user) values.push_back(is_angle(*p) ? deg_to_rad(v) : v);
  const bool keep = !opt.spectra_dir.empty();
  const SweepResult res = sweep(cfg.scene, *p, values, cfg.sensitivity, keep);
  report_warnings(res.warnings, opt, err);

  Output o{provenance("sweep", cfg, opt), csv_header::kSweep, {}};
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const auto& pt = res.points[i];
    o.rows.push_back(numeric_row({user[i], pt.extrema.freq_of_max, pt.extrema.ds_max,
                                  pt.extrema.freq_of_min, pt.extrema.ds_min}));
  }
  if (keep) {
    std::filesystem::create_directories(opt.spectra_dir);
    for (std::size_t i = 0; i < res.points.size(); ++i) {
      const Spectrum& s = *res.points[i].spectrum;
      std::vector<CsvRow> rows;
      for (std::size_t j = 0; j < s.values.size(); ++j) rows.push_back(numeric_row({s.grid.at(j), s.values[j]}));
      auto comments = provenance("sweep", cfg, opt);
      comments.push_back("  param_value = " + format_number(user[i]));
      std::ostringstream name;
      name << "spectrum_" << i << ".csv";
      std::ofstream f(std::filesystem::path(opt.spectra_dir) / name.str(), std::ios::binary | std::ios::trunc);
      if (!f) throw InvalidInput("cannot write into '" + opt.spectra_dir + "'");
      write_csv(f, comments, csv_header::kSpectrum, rows);
    }
  }
  return o;
}

Output cmd_polarization_scan(const RunConfig& cfg, const Options& opt, std::ostream&) {
  const Scene scene = cfg.scene.resolve();
  const std::vector<double> phis = angles_deg(opt.range, "0:180:5");
  Output o{provenance("polarization-scan", cfg, opt), {}, {}};
  if (cfg.scan_frequency) {
    const PolarizationCurve c = polarization_scan(scene, *cfg.scan_frequency, phis, cfg.scan_normal);
    o.header = csv_header::kScanCurve;
    for (std::size_t i = 0; i < phis.size(); ++i)
      o.rows.push_back(numeric_row({rad_to_deg(phis[i]), c.strength[i]}));
  } else {
    const ScanMap m = polarization_scan_map(scene, phis, cfg.scan_normal);
    o.header = csv_header::kScanMap;
    for (std::size_t r = 0; r < phis.size(); ++r)
      for (std::size_t i = 0; i < m.grid.size(); ++i)
        o.rows.push_back(numeric_row({rad_to_deg(phis[r]), m.grid.at(i), m.at(r, i)}));
  }
  return o;
}

Output cmd_reconstruct(const RunConfig& cfg, const Options& opt, std::ostream& err) {
  const Scene scene = cfg.scene.resolve();
  ScanMap map;
  if (cfg.reconstruct_self_test) {
    map = polarization_scan_map(scene, angles_deg(opt.range, "0:165:15"), cfg.scan_normal);
  } else {
    std::ifstream f(cfg.reconstruct_input, std::ios::binary);
    if (!f) throw InvalidInput("cannot open scan map '" + cfg.reconstruct_input + "'");
    map = scan_map_from_csv(read_csv(f, csv_header::kScanMap));
  }
  const VectorElectrometryResult r = reconstruct_from_scan(map, scene, cfg.scan_normal, cfg.electrometry);
  report_warnings(r.warnings, opt, err);

  Output o{provenance("reconstruct", cfg, opt), csv_header::kReport, {}};
  auto add = [&o](const std::string& name, double v) { o.rows.push_back({name, format_number(v)}); };
  const Vec3& e = r.field.e_lab.vec();
  add("e_x", e.x());
  add("e_y", e.y());
  add("e_z", e.z());
  add("e_magnitude", e.norm());
  add("line_residual", r.field.residual);
  add("fit_residual", r.fit_residual);
  for (const auto* p : {&r.a, &r.b}) {
    const std::string n = to_string(p->orientation);
    add(n + "_e_perp", p->e_perp);
    add(n + "_phi_e_deg", rad_to_deg(p->phi_e));
  }
  add("sign_ambiguous", r.sign_ambiguous ? 1.0 : 0.0);
  if (cfg.reconstruct_self_test) {
    const Vec3& t = scene.e_lab.vec();
    add("true_e_x", t.x());
    add("true_e_y", t.y());
    add("true_e_z", t.z());
    const double floor = 1e-3 * t.norm();
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(e(i) - t(i)) / std::max(std::abs(t(i)), floor));
    add("max_component_error", worst);
  }
  return o;
}

}  // namespace

std::vector<double> parse_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InvalidInput("range must be start:stop:step, got '" + spec + "'");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    try {
      v[i] = parse_number(parts[i]);
    } catch (const FormatError&) {
      throw InvalidInput("range must be start:stop:step, got '" + spec + "'");
    }
    if (!std::isfinite(v[i])) throw InvalidInput("range values must be finite");
  }
  const double start = v[0], stop = v[1], step = v[2];
  if (!(step > 0.0)) throw InvalidInput("range step must be > 0");
  if (stop < start) throw InvalidInput("range '" + spec + "' is empty");
  const double n = std::floor((stop - start) / step + 1e-9);
  if (n > 1e6) throw InvalidInput("range has too many points");
  std::vector<double> out;
  for (int i = 0; i <= static_cast<int>(n); ++i) out.push_back(start + i * step);
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"NV-center ODMR simulator"};
  app.require_subcommand(1);
  Options opt;
  struct Cmd {
    const char* name;
    const char* help;
    Output (*fn)(const RunConfig&, const Options&, std::ostream&);
  };
  const Cmd cmds[] = {
      {"spectrum", "Transition-strength spectrum", cmd_spectrum},
      {"sweep", "Sensitivity extrema over a parameter range", cmd_sweep},
      {"sensitivity", "Differential electric-field sensitivity spectrum", cmd_sensitivity},
      {"polarization-scan", "Strength versus MW polarization angle", cmd_polarization_scan},
      {"reconstruct", "Vector electrometry from a polarization scan map", cmd_reconstruct},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "Scene configuration file")->required();
    sub->add_option("--out", opt.out, "Output CSV path (default: stdout)");
    sub->add_option("--param", opt.param, "Swept parameter");
    sub->add_option("--range", opt.range, "Value range start:stop:step");
    sub->add_flag("--quiet", opt.quiet, "Suppress warnings");
    if (std::string(c.name) == "sweep")
      sub->add_option("--spectra-dir", opt.spectra_dir, "Also write one spectrum CSV per value here");
    subs.push_back(sub);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const RunConfig cfg = load_config(opt.config);
      emit(cmds[i].fn(cfg, opt, err), opt, out);
      return kExitOk;
    }
    return kExitFailure;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n' << e.dump();
    return kExitPhysics;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace nvodmr
