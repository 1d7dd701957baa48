#pragma once

#include "nvodmr/geometry.hpp"
#include "nvodmr/spectrum.hpp"

#include <optional>

namespace nvodmr {

/// Static field given in polar form in either the lab frame or an NV
/// frame (polarity NV). Angles in radians.
struct PolarField {
  double magnitude = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  std::optional<Orientation> frame;  // nullopt: lab
};

struct MWSpec {
  MWDrive::Mode mode = MWDrive::Mode::Linear;
  double theta = kPi / 2.0;  // linear drive direction
  double phi = 0.0;
  CVec3 complex_field = CVec3(1.0, 0.0, 0.0);  // complex mode
  double normal_theta = 0.0;                    // unpolarized plane normal
  double normal_phi = 0.0;
  std::optional<Orientation> frame;
};

/// Parametric scene description; `resolve()` produces the lab-frame Scene.
struct SceneSpec {
  PolarField b;
  PolarField e;
  MWSpec mw;
  double linewidth = 1.0;
  std::optional<FrequencyGrid> grid;  // default: FrequencyGrid::default_for(linewidth)
  Ensemble ensemble;
  PhysicalConstants constants;
  CrystalFrame crystal;
  // Extra polar tilt of B within its own frame, rad.
  double b_misalignment = 0.0;

  Scene resolve() const;
};

// Lab-frame vector for a direction given in `frame` (nullopt: lab).
Vec3 to_lab(const Vec3& v, const std::optional<Orientation>& frame, const CrystalFrame& crystal);

}  // namespace nvodmr
