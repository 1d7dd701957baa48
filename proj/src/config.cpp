#include "nvodmr/config.hpp"

#include "nvodmr/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace nvodmr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  double number(const std::string& key) {
    used_.insert(key);
    try {
      const double v = parse_number(kv_.at(key));
      if (!std::isfinite(v)) throw ConfigError(key, "value must be finite");
      return v;
    } catch (const FormatError&) {
      throw ConfigError(key, "expected a number, got '" + kv_.at(key) + "'");
    }
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  double angle_or(const std::string& key, double fallback_deg) {
    return deg_to_rad(number_or(key, fallback_deg));
  }

  std::string text(const std::string& key) {
    used_.insert(key);
    return kv_.at(key);
  }

  std::vector<double> list(const std::string& key, std::size_t n) {
    used_.insert(key);
    std::vector<double> out;
    std::stringstream ss(kv_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(parse_number(item));
      } catch (const FormatError&) {
        throw ConfigError(key, "expected a comma-separated list of numbers");
      }
      if (!std::isfinite(out.back())) throw ConfigError(key, "values must be finite");
    }
    if (out.size() != n) throw ConfigError(key, "expected " + std::to_string(n) + " values");
    return out;
  }

  void check_unused() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw ConfigError(k, "unknown key");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

std::optional<Orientation> frame_tag(Reader& r, const std::string& key) {
  if (!r.has(key)) return std::nullopt;
  const std::string v = r.text(key);
  if (lower(v) == "lab") return std::nullopt;
  const auto o = parse_orientation(v);
  if (!o) throw ConfigError(key, "expected lab, NV1, NV2, NV3 or NV4");
  return o;
}

PolarField polar_field(Reader& r, const std::string& prefix) {
  PolarField f;
  f.magnitude = r.number_or(prefix + ".magnitude", 0.0);
  if (f.magnitude < 0.0) throw ConfigError(prefix + ".magnitude", "must be >= 0");
  f.theta = r.angle_or(prefix + ".theta", 0.0);
  f.phi = r.angle_or(prefix + ".phi", 0.0);
  f.frame = frame_tag(r, prefix + ".frame");
  return f;
}

NVConfiguration parse_selection(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s.size() == 6 && s[3] == '-') {
    const auto o = parse_orientation(s.substr(0, 3));
    const std::string pol = s.substr(4);
    if (o && (pol == "nv" || pol == "vn"))
      return NVConfiguration{*o, pol == "nv" ? Polarity::NV : Polarity::VN};
  }
  throw ConfigError(key, "expected ensemble or <NVk>-<NV|VN>, e.g. NV1-NV");
}

}  // namespace

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    if (value.empty()) throw ConfigError(key, "empty value");
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = value;
    cfg.entries.emplace_back(key, value);
  }

  Reader r(kv);
  SceneSpec& s = cfg.scene;

  if (!r.has("linewidth")) throw ConfigError("linewidth", "required key is missing");
  s.linewidth = r.number("linewidth");
  if (!(s.linewidth > 0.0)) throw ConfigError("linewidth", "must be > 0");

  s.b = polar_field(r, "b");
  s.e = polar_field(r, "e");
  s.b_misalignment = r.angle_or("b.misalignment", 0.0);

  const std::string mode = r.has("mw.mode") ? lower(r.text("mw.mode")) : "linear";
  s.mw.theta = r.angle_or("mw.theta", 90.0);
  s.mw.phi = r.angle_or("mw.phi", 0.0);
  s.mw.normal_theta = r.angle_or("mw.normal_theta", 0.0);
  s.mw.normal_phi = r.angle_or("mw.normal_phi", 0.0);
  s.mw.frame = frame_tag(r, "mw.frame");
  if (mode == "linear") {
    s.mw.mode = MWDrive::Mode::Linear;
  } else if (mode == "unpolarized") {
    s.mw.mode = MWDrive::Mode::Unpolarized;
  } else if (mode == "complex") {
    s.mw.mode = MWDrive::Mode::Complex;
    const char* axes[] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) {
      const std::string base = std::string("mw.") + axes[i];
      s.mw.complex_field(i) = cplx(r.number_or(base + "_re", 0.0), r.number_or(base + "_im", 0.0));
    }
    if (s.mw.complex_field.norm() == 0.0) throw ConfigError("mw.x_re", "complex MW field is zero");
  } else {
    throw ConfigError("mw.mode", "expected linear, complex or unpolarized");
  }

  if (r.has("grid.min") || r.has("grid.max") || r.has("grid.step")) {
    const double lo = r.number_or("grid.min", 2820.0);
    const double hi = r.number_or("grid.max", 2920.0);
    const double step = r.number_or("grid.step", s.linewidth / 10.0);
    if (!(step > 0.0)) throw ConfigError("grid.step", "must be > 0");
    if (hi < lo) throw ConfigError("grid.max", "must be >= grid.min");
    s.grid = FrequencyGrid::range(lo, hi, step);
  }

  if (r.has("weights") && r.has("selection"))
    throw ConfigError("selection", "cannot be combined with weights");
  if (r.has("weights")) {
    const auto w = r.list("weights", kNumConfigurations);
    Ensemble::Weights arr;
    std::copy(w.begin(), w.end(), arr.begin());
    try {
      s.ensemble = Ensemble::normalized(arr);
    } catch (const InvalidInput& e) {
      throw ConfigError("weights", e.what());
    }
  }
  if (r.has("selection")) {
    const std::string v = r.text("selection");
    if (lower(v) != "ensemble") s.ensemble = Ensemble::single(parse_selection("selection", v));
  }

  PhysicalConstants& k = s.constants;
  const std::pair<const char*, double*> consts[] = {
      {"const.d_gs", &k.d_gs},       {"const.gamma_nv", &k.gamma_nv},
      {"const.d_par", &k.d_par},     {"const.d_perp", &k.d_perp},
      {"const.a_par", &k.a_par},     {"const.a_perp", &k.a_perp},
      {"const.quadrupole", &k.quadrupole}, {"const.gamma_n", &k.gamma_n},
  };
  for (const auto& [key, dst] : consts) *dst = r.number_or(key, *dst);
  if (!(k.d_perp > 0.0)) throw ConfigError("const.d_perp", "must be > 0");

  if (r.has("crystal.pre_rotation")) {
    const auto m = r.list("crystal.pre_rotation", 9);
    Mat3 rot;
    for (int i = 0; i < 9; ++i) rot(i / 3, i % 3) = m[i];
    try {
      s.crystal = CrystalFrame(rot);
    } catch (const InvalidInput& e) {
      throw ConfigError("crystal.pre_rotation", e.what());
    }
  }

  cfg.sensitivity.delta_e = r.number_or("sensitivity.delta_e", 1e5);
  if (!(cfg.sensitivity.delta_e > 0.0)) throw ConfigError("sensitivity.delta_e", "must be > 0");
  if (r.has("sensitivity.mode")) {
    const std::string m = lower(r.text("sensitivity.mode"));
    if (m == "magnitude") cfg.sensitivity.mode = PerturbationMode::Magnitude;
    else if (m == "fixed") cfg.sensitivity.mode = PerturbationMode::FixedDirection;
    else throw ConfigError("sensitivity.mode", "expected magnitude or fixed");
  }
  if (r.has("sensitivity.direction")) {
    const auto d = r.list("sensitivity.direction", 3);
    cfg.sensitivity.direction = Vec3(d[0], d[1], d[2]);
    if (cfg.sensitivity.direction.norm() == 0.0)
      throw ConfigError("sensitivity.direction", "must be non-zero");
  }

  if (r.has("scan.frequency")) cfg.scan_frequency = r.number("scan.frequency");
  cfg.scan_normal = FieldVector::polar(1.0, r.angle_or("scan.normal_theta", 0.0),
                                       r.angle_or("scan.normal_phi", 0.0))
                        .vec();

  if (r.has("reconstruct.mode")) {
    const std::string m = lower(r.text("reconstruct.mode"));
    if (m == "self-test") cfg.reconstruct_self_test = true;
    else if (m == "input") cfg.reconstruct_self_test = false;
    else throw ConfigError("reconstruct.mode", "expected self-test or input");
  }
  if (r.has("reconstruct.input")) cfg.reconstruct_input = r.text("reconstruct.input");
  if (!cfg.reconstruct_self_test && cfg.reconstruct_input.empty())
    throw ConfigError("reconstruct.input", "required when reconstruct.mode = input");
  cfg.electrometry.e_max = r.number_or("reconstruct.e_max", cfg.electrometry.e_max);
  if (!(cfg.electrometry.e_max > 0.0)) throw ConfigError("reconstruct.e_max", "must be > 0");

  r.check_unused();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot open config file '" + path + "'");
  return parse_config(f);
}

}  // namespace nvodmr
