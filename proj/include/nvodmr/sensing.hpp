#pragma once

#include "nvodmr/scene.hpp"
#include "nvodmr/spectrum.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nvodmr {

enum class PerturbationMode {
  Magnitude,       // along E/|E|; undefined for E = 0
  FixedDirection,  // along a user-supplied lab direction
};

struct SensitivityOptions {
  double delta_e = 1e5;  // V/m
  PerturbationMode mode = PerturbationMode::Magnitude;
  Vec3 direction = Vec3::UnitZ();  // lab frame, FixedDirection only
};

struct SensitivitySpectrum {
  FrequencyGrid grid;
  std::vector<double> ds;  // per V/m
  double delta_e = 0.0;
  Warnings warnings;
};

/// Forward difference [T(E + dE * u) - T(E)] / dE of the ensemble spectrum.
SensitivitySpectrum sensitivity_spectrum(const Scene& scene, const SensitivityOptions& opts = {});

struct SensitivityExtrema {
  double freq_of_max = 0.0;
  double ds_max = 0.0;
  double freq_of_min = 0.0;
  double ds_min = 0.0;

  double max_abs() const;
};

// First grid point wins on ties.
SensitivityExtrema extrema(const SensitivitySpectrum& s);

enum class SweepParameter { BMagnitude, BPolarMisalignment, PhiMw, PhiB, EMagnitude };

std::string to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view s);
// Angles are swept in radians internally; the CLI converts degrees.
bool is_angle(SweepParameter p);

struct SweepPoint {
  double value = 0.0;
  SensitivityExtrema extrema;
  std::optional<Spectrum> spectrum;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::BMagnitude;
  std::vector<SweepPoint> points;
  Warnings warnings;
};

// Copy of `spec` with `parameter` set to `value`.
SceneSpec apply_parameter(const SceneSpec& spec, SweepParameter parameter, double value);

SweepResult sweep(const SceneSpec& spec, SweepParameter parameter, const std::vector<double>& values,
                  const SensitivityOptions& opts = {}, bool keep_spectra = false);

/// Closed-form m_I = 0 transition frequencies (f_minus, f_plus), MHz, for a
/// strictly transverse bias field B_perp (G) at azimuth phi_b in the NV frame.
std::pair<double, double> analytic_transition_freqs(const FieldVector& e_frame, double b_perp,
                                                    double phi_b,
                                                    const PhysicalConstants& constants = {});

// Second-order transverse Zeeman parameter gamma^2 B_perp^2 / (2 D), MHz.
double lambda_parameter(double b_perp, const PhysicalConstants& constants = {});

/// Relative strengths (lower, upper) of the two m_I = 0 transitions for a
/// drive in the NV transverse plane at azimuth phi_mw, zero bias field.
/// Sum is always 2.
std::pair<double, double> analytic_polarization_amplitude(double phi_mw, double phi_e);

}  // namespace nvodmr
