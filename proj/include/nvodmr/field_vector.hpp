#pragma once

#include "nvodmr/types.hpp"

#include <cmath>

namespace nvodmr {

/// Real 3-vector used for static fields: B in gauss, E in V/m.
///
/// Polar convention: theta is the polar angle from +z, phi the azimuth
/// measured from +x toward +y. Both in radians.
class FieldVector {
 public:
  FieldVector() : v_(Vec3::Zero()) {}
  explicit FieldVector(const Vec3& v) : v_(v) {}

  static FieldVector cartesian(double x, double y, double z) { return FieldVector(Vec3(x, y, z)); }
  static FieldVector polar(double magnitude, double theta, double phi);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  double magnitude() const { return v_.norm(); }
  // Polar angle in [0, pi]; 0 for the zero vector.
  double theta() const;
  // Azimuth in (-pi, pi]; 0 when the transverse part vanishes.
  double phi() const;
  // Length of the (x, y) part.
  double transverse() const { return std::hypot(v_.x(), v_.y()); }

  bool is_finite() const { return v_.allFinite(); }

  FieldVector operator-() const { return FieldVector(-v_); }
  FieldVector operator+(const FieldVector& o) const { return FieldVector(v_ + o.v_); }
  FieldVector operator*(double s) const { return FieldVector(v_ * s); }

 private:
  Vec3 v_;
};

}  // namespace nvodmr
