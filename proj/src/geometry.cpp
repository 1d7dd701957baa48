#include "nvodmr/geometry.hpp"

#include "nvodmr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace nvodmr {

namespace {

FrameTransform make_transform(const double (&m)[3][3]) {
  const double s6 = std::sqrt(6.0);
  const double s2 = std::sqrt(2.0);
  const double s3 = std::sqrt(3.0);
  const double norms[3] = {s6, s2, s3};
  FrameTransform t;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t.r(r, c) = m[r][c] / norms[r];
  return t;
}

const std::array<FrameTransform, kNumOrientations>& transforms() {
  static const std::array<FrameTransform, kNumOrientations> t = {
      make_transform({{-1, 1, -2}, {-1, -1, 0}, {-1, 1, 1}}),
      make_transform({{1, 1, 2}, {1, -1, 0}, {1, 1, -1}}),
      make_transform({{-1, -1, 2}, {-1, 1, 0}, {-1, -1, -1}}),
      make_transform({{1, -1, -2}, {1, 1, 0}, {1, -1, 1}}),
  };
  return t;
}

double polarity_sign(Polarity p) { return p == Polarity::NV ? 1.0 : -1.0; }

void require_finite(const FieldVector& v) {
  if (!v.is_finite()) throw InvalidInput("field vector has non-finite components");
}

}  // namespace

NVConfiguration NVConfiguration::from_index(int i) {
  if (i < 0 || i >= kNumConfigurations) throw InvalidInput("configuration index out of range");
  return NVConfiguration{static_cast<Orientation>(i / 2), static_cast<Polarity>(i % 2)};
}

std::string NVConfiguration::name() const {
  return to_string(orientation) + "-" + to_string(polarity);
}

std::string to_string(Orientation o) { return "NV" + std::to_string(static_cast<int>(o) + 1); }

std::string to_string(Polarity p) { return p == Polarity::NV ? "NV" : "VN"; }

std::optional<Orientation> parse_orientation(std::string_view s) {
  if (s.size() != 3) return std::nullopt;
  if (std::toupper(static_cast<unsigned char>(s[0])) != 'N' ||
      std::toupper(static_cast<unsigned char>(s[1])) != 'V')
    return std::nullopt;
  if (s[2] < '1' || s[2] > '4') return std::nullopt;
  return static_cast<Orientation>(s[2] - '1');
}

FrameTransform transform_for(Orientation o) { return transforms()[static_cast<int>(o)]; }

CrystalFrame::CrystalFrame(const Mat3& pre_rotation) : pre_(pre_rotation) {
  if (!pre_.allFinite() || !(pre_ * pre_.transpose()).isIdentity(1e-9) ||
      std::abs(pre_.determinant() - 1.0) > 1e-9)
    throw InvalidInput("pre-rotation must be a proper rotation matrix");
}

FrameTransform CrystalFrame::transform(Orientation o) const {
  return FrameTransform{transform_for(o).r * pre_};
}

FieldVector CrystalFrame::lab_to_nv(const FieldVector& v, NVConfiguration c) const {
  require_finite(v);
  return FieldVector(polarity_sign(c.polarity) * (transform(c.orientation).r * v.vec()));
}

FieldVector CrystalFrame::nv_to_lab(const FieldVector& v, NVConfiguration c) const {
  require_finite(v);
  return FieldVector(polarity_sign(c.polarity) * (transform(c.orientation).r.transpose() * v.vec()));
}

CVec3 CrystalFrame::lab_to_nv(const CVec3& v, NVConfiguration c) const {
  if (!v.allFinite()) throw InvalidInput("MW field has non-finite components");
  const Mat3 r = transform(c.orientation).r;
  return polarity_sign(c.polarity) * (r.cast<cplx>() * v);
}

FieldVector lab_to_nv(const FieldVector& v, NVConfiguration c) {
  return CrystalFrame().lab_to_nv(v, c);
}

FieldVector nv_to_lab(const FieldVector& v, NVConfiguration c) {
  return CrystalFrame().nv_to_lab(v, c);
}

Ensemble::Ensemble() { w_.fill(1.0 / kNumConfigurations); }

Ensemble::Ensemble(const Weights& w) : w_(w) {
  double sum = 0.0;
  for (double x : w_) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInput("configuration weights must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("configuration weights must sum to 1");
}

Ensemble Ensemble::single(NVConfiguration c) {
  Weights w{};
  w[c.index()] = 1.0;
  return Ensemble(w);
}

Ensemble Ensemble::normalized(const Weights& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInput("configuration weights must be >= 0");
    sum += x;
  }
  if (!(sum > 0.0)) throw InvalidInput("configuration weights sum to zero");
  Weights out;
  for (int i = 0; i < kNumConfigurations; ++i) out[i] = w[i] / sum;
  return Ensemble(out);
}

}  // namespace nvodmr
