#include "nvodmr/constants.hpp"
#include "nvodmr/errors.hpp"
#include "nvodmr/field_vector.hpp"
#include "nvodmr/types.hpp"

#include <cmath>

namespace nvodmr {

double wrap_angle(double rad) {
  double r = std::fmod(rad, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

FieldVector FieldVector::polar(double magnitude, double theta, double phi) {
  const double st = std::sin(theta);
  return cartesian(magnitude * st * std::cos(phi), magnitude * st * std::sin(phi),
                   magnitude * std::cos(theta));
}

double FieldVector::theta() const {
  const double m = magnitude();
  if (m == 0.0) return 0.0;
  return std::atan2(transverse(), v_.z());
}

double FieldVector::phi() const {
  if (v_.x() == 0.0 && v_.y() == 0.0) return 0.0;
  return std::atan2(v_.y(), v_.x());
}

void PhysicalConstants::validate() const {
  const double all[] = {d_gs, gamma_nv, d_par, d_perp, a_par, a_perp, quadrupole, gamma_n};
  for (double v : all)
    if (!std::isfinite(v)) throw InvalidInput("physical constants must be finite");
}

}  // namespace nvodmr
