#include "nvodmr/spectrum.hpp"

#include "../support/oracle.hpp"

#include <doctest.h>

using namespace nvodmr;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double peak(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

const NVConfiguration kNV1{Orientation::NV1, Polarity::NV};

}  // namespace

TEST_CASE("frequency grid") {
  const auto g = FrequencyGrid::range(2820.0, 2920.0, 0.1);
  CHECK(g.size() == 1001);
  CHECK(g.back() == doctest::Approx(2920.0));
  const auto d = FrequencyGrid::default_for(0.3);
  CHECK(d.start() == 2820.0);
  CHECK(d.step() == doctest::Approx(0.03));
  CHECK_THROWS_AS(FrequencyGrid(0.0, 0.0, 3), InvalidInput);
  CHECK_THROWS_AS(FrequencyGrid::range(10.0, 5.0, 1.0), InvalidInput);
}

TEST_CASE("transition lines agree with a brute-force evaluation") {
  const PhysicalConstants k;
  const FieldVector b = FieldVector::cartesian(3.0, -7.0, 12.0);
  const FieldVector e = FieldVector::cartesian(2e7, 1e7, -3e6);
  const SpinSystem sys = build_total(b, e, k);
  const CVec3 drive(cplx(0.6, 0.1), cplx(0.0, 0.7), 0.3);
  const auto lines = transition_lines(diagonalize(sys), drive, k);
  const auto ref = oracle::transitions(sys.h, drive, k);
  REQUIRE(lines.size() == ref.frequency.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    CHECK(std::abs(lines[i].frequency - ref.frequency[i]) < 1e-9);
    CHECK(std::abs(lines[i].amplitude - ref.amplitude[i]) < 1e-9);
  }
}

TEST_CASE("zero-field linear drive along x: only m_s = 0 <-> +-1 lines") {
  const PhysicalConstants k;
  const auto eig = diagonalize(build_total(FieldVector(), FieldVector(), k));
  double strong = 0.0;
  for (const auto& l : transition_lines(eig, CVec3(1.0, 0.0, 0.0), k)) {
    const bool electronic = l.frequency > 1000.0;
    if (!electronic) CHECK(l.amplitude < 1e-4);
    strong += electronic ? l.amplitude : 0.0;
  }
  // Three nuclear projections, two branches, each gamma^2 / 2.
  CHECK(strong == doctest::Approx(6.0 * k.gamma_nv * k.gamma_nv / 2.0).epsilon(1e-4));
}

TEST_CASE("broadened single line") {
  const auto g = FrequencyGrid(2869.5, 0.5, 3);
  const auto s = broaden({TransitionLine{2870.0, 4.0, 0, 1}}, g, 1.0);
  CHECK(s.values[1] == doctest::Approx(4.0));
  CHECK(s.values[0] == doctest::Approx(2.0));
  CHECK(s.values[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(broaden({}, g, 0.0), InvalidInput);
}

TEST_CASE("NV and VN spectra coincide for a pure transverse bias") {
  Scene s;
  s.b_lab = nv_to_lab(FieldVector::polar(20.0, kPi / 2.0, 0.3), kNV1);
  s.grid = FrequencyGrid::range(2800.0, 2940.0, 0.05);
  const auto nv = single_config_spectrum(s, kNV1);
  const auto vn = single_config_spectrum(s, {Orientation::NV1, Polarity::VN});
  CHECK(max_abs_diff(nv.values, vn.values) < 1e-10 * peak(nv.values));
}

TEST_CASE("adding transverse E separates NV and VN") {
  Scene s;
  s.b_lab = nv_to_lab(FieldVector::polar(20.0, kPi / 2.0, 0.0), kNV1);
  s.e_lab = nv_to_lab(FieldVector::cartesian(1e7, 0.0, 0.0), kNV1);
  const auto nv = single_config_spectrum(s, kNV1);
  const auto vn = single_config_spectrum(s, {Orientation::NV1, Polarity::VN});
  CHECK(max_abs_diff(nv.values, vn.values) > 0.1 * peak(nv.values));
}

TEST_CASE("ensemble with a single weight equals that configuration") {
  Scene s;
  s.b_lab = FieldVector::cartesian(5.0, 9.0, -4.0);
  s.e_lab = FieldVector::cartesian(1e7, -2e7, 5e6);
  for (int i = 0; i < kNumConfigurations; ++i) {
    const auto c = NVConfiguration::from_index(i);
    s.ensemble = Ensemble::single(c);
    CHECK(max_abs_diff(ensemble_spectrum(s).values, single_config_spectrum(s, c).values) == 0.0);
  }
}

TEST_CASE("zero fields: ensemble equals any single configuration") {
  Scene s;
  s.linewidth = 0.3;
  s.grid = FrequencyGrid::default_for(0.3);
  const auto ens = ensemble_spectrum(s);
  const auto one = single_config_spectrum(s, {Orientation::NV3, Polarity::VN});
  CHECK(max_abs_diff(ens.values, one.values) < 1e-12 * peak(one.values));
}

TEST_CASE("unpolarized drive is independent of the in-plane basis") {
  Scene s;
  s.b_lab = FieldVector::cartesian(4.0, -6.0, 11.0);
  s.e_lab = FieldVector::cartesian(2e7, 1e7, 0.0);
  const Vec3 n = Vec3(0.2, -0.4, 1.0).normalized();
  s.drive = MWDrive::unpolarized(n, 0.0);
  const auto a = ensemble_spectrum(s);
  s.drive = MWDrive::unpolarized(n, 1.1);
  const auto b = ensemble_spectrum(s);
  CHECK(max_abs_diff(a.values, b.values) < 1e-12 * peak(a.values));
}

TEST_CASE("pure axial bias: unpolarized in the transverse plane equals one linear drive") {
  Scene s;
  s.ensemble = Ensemble::single(kNV1);
  const Vec3 z = transform_for(Orientation::NV1).z_axis();
  s.b_lab = FieldVector(10.0 * z);
  s.drive = MWDrive::unpolarized(z);
  const auto unpol = ensemble_spectrum(s);
  s.drive = MWDrive::linear(transform_for(Orientation::NV1).x_axis());
  const auto lin = ensemble_spectrum(s);
  CHECK(max_abs_diff(unpol.values, lin.values) < 1e-10 * peak(lin.values));
}

TEST_CASE("unpolarized amplitude is the mean of the polarized extremes") {
  Scene s;
  s.ensemble = Ensemble::single(kNV1);
  s.e_lab = nv_to_lab(FieldVector::cartesian(4e7, 0.0, 0.0), kNV1);
  const FrameTransform t = transform_for(Orientation::NV1);
  s.grid = FrequencyGrid::range(2860.0, 2880.0, 0.01);
  s.drive = MWDrive::linear(t.x_axis());
  const auto a = ensemble_spectrum(s);
  s.drive = MWDrive::linear(t.y_axis());
  const auto b = ensemble_spectrum(s);
  s.drive = MWDrive::unpolarized(t.z_axis());
  const auto u = ensemble_spectrum(s);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    CHECK(u.values[i] == doctest::Approx(0.5 * (a.values[i] + b.values[i])).epsilon(1e-10));
}

TEST_CASE("drive validation") {
  CHECK_THROWS_AS(MWDrive::linear(Vec3::Zero()), InvalidInput);
  CHECK_THROWS_AS(MWDrive::complex_vector(CVec3::Zero()), InvalidInput);
  const auto d = MWDrive::unpolarized(Vec3::UnitZ());
  CHECK(d.components().size() == 2);
  CHECK(d.weights()[0] == 0.5);
}
