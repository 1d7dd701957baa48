#pragma once

#include "nvodmr/field_vector.hpp"
#include "nvodmr/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace nvodmr {

enum class Orientation { NV1 = 0, NV2 = 1, NV3 = 2, NV4 = 3 };
enum class Polarity { NV = 0, VN = 1 };

inline constexpr int kNumOrientations = 4;
inline constexpr int kNumConfigurations = 8;

struct NVConfiguration {
  Orientation orientation = Orientation::NV1;
  Polarity polarity = Polarity::NV;

  // Position in the fixed accumulation order NV1-NV, NV1-VN, ..., NV4-VN.
  int index() const { return 2 * static_cast<int>(orientation) + static_cast<int>(polarity); }
  static NVConfiguration from_index(int i);
  std::string name() const;
};

std::string to_string(Orientation o);
std::string to_string(Polarity p);
// Accepts "NV1".."NV4" (case-insensitive); nullopt otherwise.
std::optional<Orientation> parse_orientation(std::string_view s);

/// Rotation from the lab frame of a <100>-cut sample to an NV body frame.
/// Rows are the NV frame axes expressed in lab coordinates.
struct FrameTransform {
  Mat3 r;

  Vec3 x_axis() const { return r.row(0).transpose(); }
  Vec3 y_axis() const { return r.row(1).transpose(); }
  Vec3 z_axis() const { return r.row(2).transpose(); }
};

FrameTransform transform_for(Orientation o);

/// Lab-frame geometry: the <100> transforms composed with an optional
/// global pre-rotation (lab -> crystal) for other sample cuts.
class CrystalFrame {
 public:
  CrystalFrame() : pre_(Mat3::Identity()) {}
  // Throws InvalidInput unless `pre_rotation` is proper orthogonal.
  explicit CrystalFrame(const Mat3& pre_rotation);

  const Mat3& pre_rotation() const { return pre_; }
  FrameTransform transform(Orientation o) const;

  FieldVector lab_to_nv(const FieldVector& v, NVConfiguration c) const;
  FieldVector nv_to_lab(const FieldVector& v, NVConfiguration c) const;
  CVec3 lab_to_nv(const CVec3& v, NVConfiguration c) const;

 private:
  Mat3 pre_;
};

// <100> cut without pre-rotation.
FieldVector lab_to_nv(const FieldVector& v, NVConfiguration c);
FieldVector nv_to_lab(const FieldVector& v, NVConfiguration c);

/// Per-configuration population weights, indexed by NVConfiguration::index().
class Ensemble {
 public:
  using Weights = std::array<double, kNumConfigurations>;

  // Equal population, 1/8 each.
  Ensemble();
  // Throws InvalidInput if any weight is negative or non-finite, or if the
  // weights do not sum to 1 within 1e-9.
  explicit Ensemble(const Weights& w);

  static Ensemble uniform() { return Ensemble(); }
  static Ensemble single(NVConfiguration c);
  // Rescales to unit sum; throws InvalidInput if the sum is not positive.
  static Ensemble normalized(const Weights& w);

  double weight(NVConfiguration c) const { return w_[c.index()]; }
  const Weights& weights() const { return w_; }

 private:
  Weights w_;
};

}  // namespace nvodmr
