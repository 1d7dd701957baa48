#include "nvodmr/spectrum.hpp"

#include "nvodmr/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace nvodmr {

FrequencyGrid::FrequencyGrid(double start, double step, std::size_t count)
    : start_(start), step_(step), count_(count) {
  if (!std::isfinite(start) || !std::isfinite(step)) throw InvalidInput("grid values must be finite");
  if (!(step > 0.0)) throw InvalidInput("grid step must be > 0");
  if (count == 0) throw InvalidInput("grid must contain at least one point");
}

FrequencyGrid FrequencyGrid::range(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw InvalidInput("grid values must be finite");
  if (!(step > 0.0)) throw InvalidInput("grid step must be > 0");
  if (stop < start) throw InvalidInput("grid max must be >= grid min");
  const double n = std::floor((stop - start) / step + 1e-9);
  if (n > 1e8) throw InvalidInput("grid has too many points");
  return FrequencyGrid(start, step, static_cast<std::size_t>(n) + 1);
}

FrequencyGrid FrequencyGrid::default_for(double delta) {
  if (!(delta > 0.0)) throw InvalidInput("linewidth must be > 0");
  return range(2820.0, 2920.0, delta / 10.0);
}

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> v(count_);
  for (std::size_t i = 0; i < count_; ++i) v[i] = at(i);
  return v;
}

MWDrive MWDrive::linear(double theta, double phi) {
  return linear(FieldVector::polar(1.0, theta, phi).vec());
}

MWDrive MWDrive::linear(const Vec3& direction) {
  if (!direction.allFinite() || direction.norm() == 0.0)
    throw InvalidInput("MW direction must be a finite non-zero vector");
  MWDrive d;
  d.mode_ = Mode::Linear;
  d.fields_ = {direction.normalized().cast<cplx>()};
  d.weights_ = {1.0};
  return d;
}

MWDrive MWDrive::complex_vector(const CVec3& field) {
  if (!field.allFinite() || field.norm() == 0.0)
    throw InvalidInput("MW field must be a finite non-zero vector");
  MWDrive d;
  d.mode_ = Mode::Complex;
  d.fields_ = {field / field.norm()};
  d.weights_ = {1.0};
  return d;
}

MWDrive MWDrive::unpolarized(const Vec3& plane_normal, double basis_angle) {
  if (!plane_normal.allFinite() || plane_normal.norm() == 0.0)
    throw InvalidInput("unpolarized drive needs a non-zero plane normal");
  const Vec3 n = plane_normal.normalized();
  int ref = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(n(k)) < std::abs(n(ref))) ref = k;
  const Vec3 e = Vec3::Unit(ref);
  const Vec3 u1 = (e - e.dot(n) * n).normalized();
  const Vec3 u2 = n.cross(u1);
  const double c = std::cos(basis_angle);
  const double s = std::sin(basis_angle);
  MWDrive d;
  d.mode_ = Mode::Unpolarized;
  d.normal_ = n;
  d.fields_ = {(c * u1 + s * u2).cast<cplx>(), (-s * u1 + c * u2).cast<cplx>()};
  d.weights_ = {0.5, 0.5};
  return d;
}

CMat9 interaction_operator(const CVec3& b, const PhysicalConstants& k) {
  const auto& op = SpinOperators::spin_one();
  const CMat3 id = CMat3::Identity();
  const CMat3 bs = b(0) * op.sx + b(1) * op.sy + b(2) * op.sz;
  const CMat3 bi = b(0) * op.ix + b(1) * op.iy + b(2) * op.iz;
  return k.gamma_nv * kron(bs, id) + k.gamma_n * kron(id, bi);
}

std::vector<TransitionLine> transition_lines(const EigenSystem& eig,
                                             const std::vector<CVec3>& drive_frame,
                                             const std::vector<double>& weights,
                                             const PhysicalConstants& constants) {
  if (drive_frame.size() != weights.size())
    throw InvalidInput("drive components and weights differ in length");
  std::vector<TransitionLine> lines;
  lines.reserve(kSpinDim * (kSpinDim - 1) / 2);
  for (int i = 0; i < kSpinDim; ++i)
    for (int f = i + 1; f < kSpinDim; ++f)
      lines.push_back({eig.frequencies(f) - eig.frequencies(i), 0.0, i, f});

  for (std::size_t c = 0; c < drive_frame.size(); ++c) {
    const CMat9 m = eig.vectors.adjoint() * interaction_operator(drive_frame[c], constants) *
                    eig.vectors;
    std::size_t n = 0;
    for (int i = 0; i < kSpinDim; ++i)
      for (int f = i + 1; f < kSpinDim; ++f) lines[n++].amplitude += weights[c] * std::norm(m(f, i));
  }
  return lines;
}

std::vector<TransitionLine> transition_lines(const EigenSystem& eig, const CVec3& drive_frame,
                                             const PhysicalConstants& constants) {
  return transition_lines(eig, std::vector<CVec3>{drive_frame}, std::vector<double>{1.0},
                          constants);
}

void broaden_into(const std::vector<TransitionLine>& lines, const FrequencyGrid& grid,
                  double delta, double weight, std::vector<double>& values) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("linewidth must be > 0");
  if (values.size() != grid.size()) values.assign(grid.size(), 0.0);
  const double lo = grid.start() - 10.0 * delta;
  const double hi = grid.back() + 10.0 * delta;
  std::vector<double> centers;
  std::vector<double> amps;
  centers.reserve(lines.size());
  amps.reserve(lines.size());
  for (const auto& l : lines) {
    if (l.frequency < lo || l.frequency > hi || l.amplitude == 0.0) continue;
    centers.push_back(l.frequency);
    amps.push_back(weight * l.amplitude);
  }
  kernels::lorentzian_accumulate(centers.data(), amps.data(), centers.size(), delta * delta / 4.0,
                                 grid.start(), grid.step(), grid.size(), values.data());
}

Spectrum broaden(const std::vector<TransitionLine>& lines, const FrequencyGrid& grid,
                 double delta) {
  Spectrum s;
  s.grid = grid;
  s.linewidth = delta;
  s.values.assign(grid.size(), 0.0);
  broaden_into(lines, grid, delta, 1.0, s.values);
  return s;
}

std::vector<TransitionLine> config_lines(const Scene& scene, NVConfiguration config,
                                         Warnings* warnings) {
  const FieldVector b = scene.crystal.lab_to_nv(scene.b_lab, config);
  const FieldVector e = scene.crystal.lab_to_nv(scene.e_lab, config);
  const SpinSystem sys = build_total(b, e, scene.constants);
  if (warnings) warnings->insert(warnings->end(), sys.warnings.begin(), sys.warnings.end());
  const EigenSystem eig = diagonalize(sys);
  std::vector<CVec3> drive;
  for (const auto& f : scene.drive.components()) drive.push_back(scene.crystal.lab_to_nv(f, config));
  return transition_lines(eig, drive, scene.drive.weights(), scene.constants);
}

Spectrum single_config_spectrum(const Scene& scene, NVConfiguration config) {
  Warnings w;
  const auto lines = config_lines(scene, config, &w);
  Spectrum s = broaden(lines, scene.grid, scene.linewidth);
  s.contributors = {config};
  s.warnings = std::move(w);
  return s;
}

Spectrum ensemble_spectrum(const Scene& scene) {
  Spectrum total;
  total.grid = scene.grid;
  total.linewidth = scene.linewidth;
  total.values.assign(scene.grid.size(), 0.0);
  if (!(scene.linewidth > 0.0)) throw InvalidInput("linewidth must be > 0");
  std::vector<double> part;
  for (int i = 0; i < kNumConfigurations; ++i) {
    const NVConfiguration c = NVConfiguration::from_index(i);
    const double w = scene.ensemble.weight(c);
    if (w == 0.0) continue;
    Warnings warn;
    const auto lines = config_lines(scene, c, &warn);
    if (total.warnings.empty()) total.warnings = std::move(warn);
    part.assign(scene.grid.size(), 0.0);
    broaden_into(lines, scene.grid, scene.linewidth, 1.0, part);
    kernels::axpy(w, part.data(), total.values.data(), part.size());
    total.contributors.push_back(c);
  }
  return total;
}

}  // namespace nvodmr
