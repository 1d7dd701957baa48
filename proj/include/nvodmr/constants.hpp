#pragma once

namespace nvodmr {

/// Ground-state NV / 14N parameters. Units: MHz, MHz/G, MHz per (V/m).
struct PhysicalConstants {
  double d_gs = 2870.0;       // zero-field splitting (temperature dependent)
  double gamma_nv = 2.80;     // electron gyromagnetic ratio
  double d_par = 3.5e-9;      // axial Stark coupling, 0.35 Hz cm/V
  double d_perp = 1.7e-7;     // transverse Stark coupling, 17 Hz cm/V
  double a_par = -2.14;       // axial hyperfine
  double a_perp = -2.7;       // transverse hyperfine
  double quadrupole = -4.95;  // nuclear quadrupole P
  double gamma_n = 3.1e-4;    // 14N gyromagnetic ratio (0.31 kHz/G)

  // Throws InvalidInput when any value is not finite.
  void validate() const;
};

// Upper bound of the regime where transition strength tracks ODMR contrast.
inline constexpr double kLowFieldLimitGauss = 100.0;

}  // namespace nvodmr
