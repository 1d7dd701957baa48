#include "nvodmr/scene.hpp"

namespace nvodmr {

Vec3 to_lab(const Vec3& v, const std::optional<Orientation>& frame, const CrystalFrame& crystal) {
  if (!frame) return v;
  return crystal.nv_to_lab(FieldVector(v), NVConfiguration{*frame, Polarity::NV}).vec();
}

Scene SceneSpec::resolve() const {
  if (!(linewidth > 0.0) || !std::isfinite(linewidth)) throw InvalidInput("linewidth must be > 0");
  Scene s;
  const Vec3 b_local =
      FieldVector::polar(b.magnitude, b.theta + b_misalignment, b.phi).vec();
  s.b_lab = FieldVector(to_lab(b_local, b.frame, crystal));
  s.e_lab = FieldVector(to_lab(FieldVector::polar(e.magnitude, e.theta, e.phi).vec(), e.frame, crystal));

  switch (mw.mode) {
    case MWDrive::Mode::Linear:
      s.drive = MWDrive::linear(to_lab(FieldVector::polar(1.0, mw.theta, mw.phi).vec(), mw.frame, crystal));
      break;
    case MWDrive::Mode::Complex: {
      CVec3 f = mw.complex_field;
      if (mw.frame) {
        const Mat3 r = crystal.transform(*mw.frame).r;
        f = r.transpose().cast<cplx>() * f;
      }
      s.drive = MWDrive::complex_vector(f);
      break;
    }
    case MWDrive::Mode::Unpolarized:
      s.drive = MWDrive::unpolarized(
          to_lab(FieldVector::polar(1.0, mw.normal_theta, mw.normal_phi).vec(), mw.frame, crystal));
      break;
  }
  s.ensemble = ensemble;
  s.linewidth = linewidth;
  s.grid = grid ? *grid : FrequencyGrid::default_for(linewidth);
  s.constants = constants;
  s.crystal = crystal;
  return s;
}

}  // namespace nvodmr
