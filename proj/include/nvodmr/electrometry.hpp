#pragma once

#include "nvodmr/geometry.hpp"
#include "nvodmr/spectrum.hpp"

#include <array>
#include <utility>
#include <vector>

namespace nvodmr {

struct Peak {
  double frequency = 0.0;  // MHz, parabola-refined
  double value = 0.0;
};

/// Local maxima inside [lo, hi] whose value exceeds `rel_threshold` times
/// the window maximum, ordered by frequency.
std::vector<Peak> find_peaks(const Spectrum& s, double lo, double hi, double rel_threshold = 0.5);

struct SplittingResult {
  double e_perp = 0.0;       // V/m
  double uncertainty = 0.0;  // V/m, from the grid step
  double f_lower = 0.0;      // MHz
  double f_upper = 0.0;
};

/// Transverse field from the two dominant peaks in [lo, hi], inverting the
/// closed-form doublet frequencies for bias B_perp (G) and
/// cos_phi = cos(2 phi_B + phi_E). Throws ExtractionError when fewer than
/// two peaks are found or the splitting is incompatible with B_perp.
SplittingResult extract_splitting(const Spectrum& s, double lo, double hi, double b_perp,
                                  double cos_phi, const PhysicalConstants& constants = {});

/// In-plane drive basis for a lab rotation plane: u1 is the projection of
/// lab X (lab Y if X is the normal), u2 = n x u1. phi_mw is measured from u1.
std::pair<Vec3, Vec3> scan_basis(const Vec3& plane_normal);

struct PolarizationCurve {
  double frequency = 0.0;  // MHz
  std::vector<double> phi_mw;  // rad
  std::vector<double> strength;
};

/// Ensemble strength at `frequency` with a linear drive at each phi_mw in
/// the plane normal to `plane_normal` (lab frame). The scene drive is ignored.
PolarizationCurve polarization_scan(const Scene& scene, double frequency,
                                    const std::vector<double>& phi_mw,
                                    const Vec3& plane_normal = Vec3::UnitZ());

/// Strength versus (phi_mw, frequency), row-major over phi_mw.
struct ScanMap {
  std::vector<double> phi_mw;  // rad
  FrequencyGrid grid;
  std::vector<double> values;

  double at(std::size_t iphi, std::size_t ifreq) const { return values[iphi * grid.size() + ifreq]; }
};

ScanMap polarization_scan_map(const Scene& scene, const std::vector<double>& phi_mw,
                              const Vec3& plane_normal = Vec3::UnitZ());

struct PhiFit {
  double phi_e = 0.0;     // rad, [0, 2 pi); [0, pi) when folded
  double residual = 0.0;  // relative rms misfit
  bool folded = false;    // NV and VN weights equal: phi_e only defined mod pi
};

/// Fits the azimuth of E in the frame of `orientation` to a polarization
/// curve by forward simulation of `scene` with only that azimuth varied.
/// The model enters through an affine map (scale, offset). Throws
/// GeometryError when the best relative residual exceeds `max_residual`.
PhiFit extract_phi_e(const PolarizationCurve& curve, const Scene& scene, Orientation orientation,
                     const Vec3& plane_normal = Vec3::UnitZ(), double max_residual = 0.05);

struct TransverseProjection {
  Orientation orientation = Orientation::NV1;
  double e_perp = 0.0;      // V/m
  double phi_e = 0.0;       // rad, NV frame
  double confidence = 0.0;  // extraction residual
};

// Exact transverse projection of a lab vector.
TransverseProjection project_transverse(const FieldVector& e_lab, Orientation o,
                                        const CrystalFrame& crystal = {});

struct ReconstructedField {
  FieldVector e_lab;
  double residual = 0.0;  // V/m, distance between the two solution lines
};

/// Least-squares intersection of the two solution lines. `tolerance` is in
/// V/m; a negative value selects 5% of the larger transverse magnitude
/// plus 1 V/m. Throws GeometryError for identical orientations or a
/// residual above tolerance.
ReconstructedField reconstruct_vector(const TransverseProjection& a, const TransverseProjection& b,
                                      const CrystalFrame& crystal = {}, double tolerance = -1.0);

/// The two orientations whose axes are orthogonal to B (|B^.z_k| < 1e-3).
/// Throws GeometryError listing the four |B^.z_k| otherwise.
std::pair<Orientation, Orientation> sensitive_orientations(const FieldVector& b_lab,
                                                           const CrystalFrame& crystal = {});

struct VectorElectrometryOptions {
  double e_max = 6e7;          // prior bound on E_perp per frame, V/m
  int coarse_steps = 24;       // E_perp samples per orientation in the coarse search
  int phase_steps = 12;        // azimuth samples per orientation in the coarse search
  double max_residual = 0.05;  // relative rms misfit accepted after refinement
};

struct VectorElectrometryResult {
  TransverseProjection a;
  TransverseProjection b;
  ReconstructedField field;
  double fit_residual = 0.0;
  std::array<double, 2> axial = {0.0, 0.0};  // fitted E_z per frame, not used
  bool sign_ambiguous = false;
  Warnings warnings;
};

/// Full-vector electrometry from a polarization scan map. `model` supplies
/// the bias field, populations, linewidth and constants; its E is ignored.
///
/// The two orientations orthogonal to B are fitted inside the window around
/// their m_I = 0 lines: exhaustive coarse search, then Levenberg-Marquardt.
/// The relative sign of the two transverse parts is chosen by the residual
/// of the full map, which includes the other two orientations. With equal
/// NV/VN populations E and -E give identical maps; the reported sign then
/// puts the azimuth of the higher-index orientation in [0, pi).
VectorElectrometryResult reconstruct_from_scan(const ScanMap& measured, const Scene& model,
                                               const Vec3& plane_normal = Vec3::UnitZ(),
                                               const VectorElectrometryOptions& opts = {});

}  // namespace nvodmr
