#include "nvodmr/sensing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace nvodmr {

SensitivitySpectrum sensitivity_spectrum(const Scene& scene, const SensitivityOptions& opts) {
  if (!(opts.delta_e > 0.0) || !std::isfinite(opts.delta_e))
    throw InvalidInput("delta_e must be > 0");
  Vec3 u;
  if (opts.mode == PerturbationMode::Magnitude) {
    const double m = scene.e_lab.magnitude();
    if (m == 0.0)
      throw InvalidInput("magnitude perturbation needs |E| > 0; use a fixed perturbation direction");
    u = scene.e_lab.vec() / m;
  } else {
    if (!opts.direction.allFinite() || opts.direction.norm() == 0.0)
      throw InvalidInput("perturbation direction must be a non-zero vector");
    u = opts.direction.normalized();
  }

  SensitivitySpectrum out;
  out.grid = scene.grid;
  out.delta_e = opts.delta_e;
  if (opts.delta_e > 0.1 * scene.e_lab.magnitude()) {
    out.warnings.push_back("delta_e = " + std::to_string(opts.delta_e) +
                           " V/m is not small compared to |E|; forward difference may be inaccurate");
  }

  const Spectrum base = ensemble_spectrum(scene);
  Scene shifted = scene;
  shifted.e_lab = FieldVector(scene.e_lab.vec() + opts.delta_e * u);
  const Spectrum moved = ensemble_spectrum(shifted);
  out.warnings.insert(out.warnings.end(), base.warnings.begin(), base.warnings.end());

  out.ds.resize(base.values.size());
  for (std::size_t i = 0; i < out.ds.size(); ++i)
    out.ds[i] = (moved.values[i] - base.values[i]) / opts.delta_e;
  return out;
}

double SensitivityExtrema::max_abs() const { return std::max(std::abs(ds_max), std::abs(ds_min)); }

SensitivityExtrema extrema(const SensitivitySpectrum& s) {
  if (s.ds.empty()) throw InvalidInput("empty sensitivity spectrum");
  std::size_t imax = 0;
  std::size_t imin = 0;
  for (std::size_t i = 1; i < s.ds.size(); ++i) {
    if (s.ds[i] > s.ds[imax]) imax = i;
    if (s.ds[i] < s.ds[imin]) imin = i;
  }
  return SensitivityExtrema{s.grid.at(imax), s.ds[imax], s.grid.at(imin), s.ds[imin]};
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::BMagnitude: return "B_magnitude";
    case SweepParameter::BPolarMisalignment: return "B_polar_misalignment";
    case SweepParameter::PhiMw: return "phi_mw";
    case SweepParameter::PhiB: return "phi_B";
    case SweepParameter::EMagnitude: return "E_magnitude";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view s) {
  for (auto p : {SweepParameter::BMagnitude, SweepParameter::BPolarMisalignment,
                 SweepParameter::PhiMw, SweepParameter::PhiB, SweepParameter::EMagnitude}) {
    const std::string name = to_string(p);
    if (name.size() == s.size() &&
        std::equal(name.begin(), name.end(), s.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) ==
                 std::tolower(static_cast<unsigned char>(b));
        }))
      return p;
  }
  return std::nullopt;
}

bool is_angle(SweepParameter p) {
  return p == SweepParameter::BPolarMisalignment || p == SweepParameter::PhiMw ||
         p == SweepParameter::PhiB;
}

SceneSpec apply_parameter(const SceneSpec& spec, SweepParameter parameter, double value) {
  SceneSpec s = spec;
  switch (parameter) {
    case SweepParameter::BMagnitude: s.b.magnitude = value; break;
    case SweepParameter::BPolarMisalignment: s.b_misalignment = value; break;
    case SweepParameter::PhiMw: s.mw.phi = value; break;
    case SweepParameter::PhiB: s.b.phi = value; break;
    case SweepParameter::EMagnitude: s.e.magnitude = value; break;
  }
  return s;
}

SweepResult sweep(const SceneSpec& spec, SweepParameter parameter, const std::vector<double>& values,
                  const SensitivityOptions& opts, bool keep_spectra) {
  if (values.empty()) throw InvalidInput("sweep needs at least one value");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("sweep values must be finite");
  SweepResult out;
  out.parameter = parameter;
  for (double v : values) {
    const Scene scene = apply_parameter(spec, parameter, v).resolve();
    const SensitivitySpectrum ds = sensitivity_spectrum(scene, opts);
    for (const auto& w : ds.warnings)
      if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
        out.warnings.push_back(w);
    SweepPoint p;
    p.value = v;
    p.extrema = extrema(ds);
    if (keep_spectra) p.spectrum = ensemble_spectrum(scene);
    out.points.push_back(std::move(p));
  }
  return out;
}

double lambda_parameter(double b_perp, const PhysicalConstants& k) {
  const double gb = k.gamma_nv * b_perp;
  return gb * gb / (2.0 * k.d_gs);
}

std::pair<double, double> analytic_transition_freqs(const FieldVector& e_frame, double b_perp,
                                                    double phi_b, const PhysicalConstants& k) {
  const double lam = lambda_parameter(b_perp, k);
  const double x = k.d_perp * e_frame.transverse();
  const double phi = 2.0 * phi_b + e_frame.phi();
  const double root = std::sqrt(std::max(0.0, x * x - 2.0 * lam * x * std::cos(phi) + lam * lam));
  const double centre = k.d_gs + k.d_par * e_frame.z() + 3.0 * lam;
  return {centre - root, centre + root};
}

std::pair<double, double> analytic_polarization_amplitude(double phi_mw, double phi_e) {
  const double c = std::cos(2.0 * phi_mw + phi_e);
  return {1.0 + c, 1.0 - c};
}

}  // namespace nvodmr
