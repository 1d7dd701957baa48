#pragma once

#include "nvodmr/constants.hpp"
#include "nvodmr/errors.hpp"
#include "nvodmr/field_vector.hpp"
#include "nvodmr/geometry.hpp"
#include "nvodmr/hamiltonian.hpp"
#include "nvodmr/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace nvodmr {

/// Uniform ascending frequency grid, MHz.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  // Throws InvalidInput unless step > 0, count >= 1 and all values finite.
  FrequencyGrid(double start, double step, std::size_t count);
  // Points start, start+step, ... up to `stop` (inclusive within 1e-9 step).
  static FrequencyGrid range(double start, double stop, double step);
  // Default sampling 2820..2920 MHz with step delta/10.
  static FrequencyGrid default_for(double delta);
  static FrequencyGrid single(double frequency) { return FrequencyGrid(frequency, 1.0, 1); }

  double start() const { return start_; }
  double step() const { return step_; }
  std::size_t size() const { return count_; }
  double at(std::size_t i) const { return start_ + static_cast<double>(i) * step_; }
  double back() const { return at(count_ - 1); }
  std::vector<double> values() const;

 private:
  double start_ = 0.0;
  double step_ = 1.0;
  std::size_t count_ = 1;
};

/// Microwave drive polarization. Amplitude is normalized out.
class MWDrive {
 public:
  enum class Mode { Linear, Complex, Unpolarized };

  // Real unit vector at polar angle theta, azimuth phi (rad).
  static MWDrive linear(double theta, double phi);
  static MWDrive linear(const Vec3& direction);
  // Arbitrary complex vector, used as given after normalization.
  static MWDrive complex_vector(const CVec3& field);
  /// Incoherent mean of two orthogonal linear drives spanning the plane
  /// normal to `plane_normal`. `basis_angle` rotates the pair in the plane.
  static MWDrive unpolarized(const Vec3& plane_normal, double basis_angle = 0.0);

  Mode mode() const { return mode_; }
  // Coherent polarization components, each with its incoherent weight.
  // One entry for linear/complex drives, two (weight 1/2) for unpolarized.
  const std::vector<CVec3>& components() const { return fields_; }
  const std::vector<double>& weights() const { return weights_; }
  const Vec3& plane_normal() const { return normal_; }

 private:
  Mode mode_ = Mode::Linear;
  std::vector<CVec3> fields_;
  std::vector<double> weights_;
  Vec3 normal_ = Vec3::Zero();
};

struct TransitionLine {
  double frequency = 0.0;  // |nu_f - nu_i|, MHz
  double amplitude = 0.0;  // MHz^2
  int i = 0;
  int f = 0;
};

/// Dipole strengths for every eigenstate pair i < f. With several
/// polarization components the strengths are their weighted mean.
std::vector<TransitionLine> transition_lines(const EigenSystem& eig,
                                             const std::vector<CVec3>& drive_frame,
                                             const std::vector<double>& weights,
                                             const PhysicalConstants& constants);
std::vector<TransitionLine> transition_lines(const EigenSystem& eig, const CVec3& drive_frame,
                                             const PhysicalConstants& constants);

// Interaction operator gamma_nv b.S (x) 1 + gamma_n 1 (x) b.I.
CMat9 interaction_operator(const CVec3& b, const PhysicalConstants& constants);

struct Spectrum {
  FrequencyGrid grid;
  std::vector<double> values;
  double linewidth = 0.0;
  std::vector<NVConfiguration> contributors;
  Warnings warnings;
};

/// Lorentzian broadening with FWHM `delta`. Lines centred more than
/// 10*delta outside the grid are skipped (tail error < delta^2/400 of the
/// line amplitude at the nearest grid point).
Spectrum broaden(const std::vector<TransitionLine>& lines, const FrequencyGrid& grid,
                 double delta);
// Accumulates `weight` times the broadened lines into `values`.
void broaden_into(const std::vector<TransitionLine>& lines, const FrequencyGrid& grid,
                  double delta, double weight, std::vector<double>& values);

/// Complete lab-frame scene.
struct Scene {
  FieldVector b_lab;  // gauss
  FieldVector e_lab;  // V/m
  MWDrive drive = MWDrive::linear(kPi / 2.0, 0.0);
  Ensemble ensemble;
  FrequencyGrid grid = FrequencyGrid::default_for(1.0);
  double linewidth = 1.0;  // MHz, FWHM
  PhysicalConstants constants;
  CrystalFrame crystal;
};

// Lines of one configuration (drive transformed and negated for VN).
std::vector<TransitionLine> config_lines(const Scene& scene, NVConfiguration config,
                                         Warnings* warnings = nullptr);

Spectrum single_config_spectrum(const Scene& scene, NVConfiguration config);
/// Weighted sum over the configurations in fixed order; zero-weight
/// configurations are skipped.
Spectrum ensemble_spectrum(const Scene& scene);

}  // namespace nvodmr
