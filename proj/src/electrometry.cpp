#include "nvodmr/electrometry.hpp"

#include "nvodmr/kernels.hpp"
#include "nvodmr/sensing.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nvodmr {

namespace {

constexpr int kPairs = kSpinDim * (kSpinDim - 1) / 2;

// Transition table of one configuration for drives c*u1 + s*u2: the
// strength of pair p is c^2 p1 + s^2 p2 + c s p12.
struct PairTable {
  std::array<double, kPairs> freq{};
  std::array<double, kPairs> p1{};
  std::array<double, kPairs> p2{};
  std::array<double, kPairs> p12{};
  double weight = 0.0;
};

PairTable prepare(const FieldVector& b_frame, const FieldVector& e_frame, const CVec3& u1,
                  const CVec3& u2, const PhysicalConstants& k, double weight) {
  const EigenSystem eig = diagonalize(build_total(b_frame, e_frame, k));
  const CMat9 m1 = eig.vectors.adjoint() * interaction_operator(u1, k) * eig.vectors;
  const CMat9 m2 = eig.vectors.adjoint() * interaction_operator(u2, k) * eig.vectors;
  PairTable t;
  t.weight = weight;
  int n = 0;
  for (int i = 0; i < kSpinDim; ++i) {
    for (int f = i + 1; f < kSpinDim; ++f, ++n) {
      t.freq[n] = eig.frequencies(f) - eig.frequencies(i);
      t.p1[n] = std::norm(m1(f, i));
      t.p2[n] = std::norm(m2(f, i));
      t.p12[n] = 2.0 * (m1(f, i) * std::conj(m2(f, i))).real();
    }
  }
  return t;
}

// `e_nv` is the field in the NV-polarity frame of the configuration's orientation.
PairTable prepare_config(const Scene& s, NVConfiguration c, const Vec3& e_nv, const Vec3& u1,
                         const Vec3& u2) {
  const double sign = c.polarity == Polarity::NV ? 1.0 : -1.0;
  return prepare(s.crystal.lab_to_nv(s.b_lab, c), FieldVector(sign * e_nv),
                 s.crystal.lab_to_nv(CVec3(u1.cast<cplx>()), c),
                 s.crystal.lab_to_nv(CVec3(u2.cast<cplx>()), c), s.constants, s.ensemble.weight(c));
}

Vec3 frame_field(const Scene& s, Orientation o) {
  return s.crystal.lab_to_nv(s.e_lab, NVConfiguration{o, Polarity::NV}).vec();
}

struct LineBuffer {
  std::vector<double> centers;
  std::vector<double> amps;
};

void accumulate(const std::vector<PairTable>& tables, double cc, double ss, double cs,
                const FrequencyGrid& grid, double delta, double* out, LineBuffer& buf) {
  const double lo = grid.start() - 10.0 * delta;
  const double hi = grid.back() + 10.0 * delta;
  buf.centers.clear();
  buf.amps.clear();
  for (const auto& t : tables) {
    for (int p = 0; p < kPairs; ++p) {
      if (t.freq[p] < lo || t.freq[p] > hi) continue;
      const double a = t.weight * (cc * t.p1[p] + ss * t.p2[p] + cs * t.p12[p]);
      if (a == 0.0) continue;
      buf.centers.push_back(t.freq[p]);
      buf.amps.push_back(a);
    }
  }
  kernels::lorentzian_accumulate(buf.centers.data(), buf.amps.data(), buf.centers.size(),
                                 delta * delta / 4.0, grid.start(), grid.step(), grid.size(), out);
}

// Rows of strength for each phi_mw over `grid`, row-major.
std::vector<double> evaluate_map(const std::vector<PairTable>& tables,
                                 const std::vector<double>& phis, const FrequencyGrid& grid,
                                 double delta) {
  std::vector<double> out(phis.size() * grid.size(), 0.0);
  LineBuffer buf;
  for (std::size_t r = 0; r < phis.size(); ++r) {
    const double c = std::cos(phis[r]);
    const double s = std::sin(phis[r]);
    accumulate(tables, c * c, s * s, c * s, grid, delta, out.data() + r * grid.size(), buf);
  }
  return out;
}

std::vector<PairTable> scene_tables(const Scene& scene, const Vec3& u1, const Vec3& u2) {
  std::vector<PairTable> tables;
  for (int i = 0; i < kNumConfigurations; ++i) {
    const NVConfiguration c = NVConfiguration::from_index(i);
    if (scene.ensemble.weight(c) == 0.0) continue;
    tables.push_back(prepare_config(scene, c, frame_field(scene, c.orientation), u1, u2));
  }
  return tables;
}

struct Affine {
  double scale = 0.0;
  double offset = 0.0;
  double rss = 0.0;
};

// Least-squares y ~ scale * m + offset with scale >= 0.
Affine fit_affine(const double* y, const double* m, std::size_t n) {
  double my = 0.0;
  double mm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    my += y[i];
    mm += m[i];
  }
  my /= static_cast<double>(n);
  mm /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (m[i] - mm) * (y[i] - my);
    sxx += (m[i] - mm) * (m[i] - mm);
  }
  Affine a;
  a.scale = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  a.offset = my - a.scale * mm;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - a.scale * m[i] - a.offset;
    a.rss += r * r;
  }
  return a;
}

double centered_ss(const double* y, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += y[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (y[i] - mean) * (y[i] - mean);
  return ss;
}

template <class F>
double golden_section(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Vec3 transverse_vector(const TransverseProjection& p, const CrystalFrame& crystal) {
  const FrameTransform t = crystal.transform(p.orientation);
  return p.e_perp * (std::cos(p.phi_e) * t.x_axis() + std::sin(p.phi_e) * t.y_axis());
}

double line_distance(const TransverseProjection& a, const TransverseProjection& b,
                     const CrystalFrame& crystal) {
  const Vec3 n = crystal.transform(a.orientation).z_axis().cross(crystal.transform(b.orientation).z_axis());
  return std::abs((transverse_vector(a, crystal) - transverse_vector(b, crystal)).dot(n)) / n.norm();
}

TransverseProjection flipped(TransverseProjection p) {
  p.phi_e = wrap_angle(p.phi_e + kPi);
  return p;
}

}  // namespace

std::vector<Peak> find_peaks(const Spectrum& s, double lo, double hi, double rel_threshold) {
  const std::size_t n = s.values.size();
  std::vector<Peak> peaks;
  if (n < 3 || hi < lo) return peaks;
  double wmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = s.grid.at(i);
    if (f >= lo && f <= hi) wmax = std::max(wmax, s.values[i]);
  }
  if (!(wmax > 0.0)) return peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double f = s.grid.at(i);
    if (f < lo || f > hi) continue;
    const double y0 = s.values[i - 1];
    const double y1 = s.values[i];
    const double y2 = s.values[i + 1];
    if (!(y1 > y0 && y1 >= y2) || y1 <= rel_threshold * wmax) continue;
    const double curv = y0 - 2.0 * y1 + y2;
    double shift = 0.0;
    double value = y1;
    if (curv < 0.0) {
      shift = 0.5 * (y0 - y2) / curv;
      value = y1 - 0.25 * (y0 - y2) * shift;
    }
    peaks.push_back({f + shift * s.grid.step(), value});
  }
  return peaks;
}

SplittingResult extract_splitting(const Spectrum& s, double lo, double hi, double b_perp,
                                  double cos_phi, const PhysicalConstants& k) {
  std::vector<Peak> peaks = find_peaks(s, lo, hi, 0.5);
  if (peaks.size() < 2) {
    std::ostringstream os;
    os << "unresolved splitting: found " << peaks.size() << " peak(s) in [" << lo << ", " << hi
       << "] MHz";
    throw ExtractionError(os.str());
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.value > b.value; });
  const double f1 = std::min(peaks[0].frequency, peaks[1].frequency);
  const double f2 = std::max(peaks[0].frequency, peaks[1].frequency);
  const double split = f2 - f1;
  const double lam = lambda_parameter(b_perp, k);
  const double disc = split * split / 4.0 - lam * lam * (1.0 - cos_phi * cos_phi);
  if (disc < 0.0) throw ExtractionError("splitting is smaller than the bias-field contribution");
  const double root = std::sqrt(disc);
  const double x = lam * cos_phi + root;
  if (x < 0.0) throw ExtractionError("splitting inversion gives a negative field");

  SplittingResult r;
  r.e_perp = x / k.d_perp;
  r.f_lower = f1;
  r.f_upper = f2;
  const double dx_dsplit = root > 0.0 ? split / (4.0 * root) : 0.5;
  r.uncertainty = dx_dsplit * s.grid.step() / k.d_perp;
  return r;
}

std::pair<Vec3, Vec3> scan_basis(const Vec3& plane_normal) {
  if (!plane_normal.allFinite() || plane_normal.norm() == 0.0)
    throw InvalidInput("scan plane normal must be a non-zero vector");
  const Vec3 n = plane_normal.normalized();
  Vec3 ref = Vec3::UnitX();
  if (std::abs(ref.dot(n)) > 1.0 - 1e-12) ref = Vec3::UnitY();
  const Vec3 u1 = (ref - ref.dot(n) * n).normalized();
  return {u1, n.cross(u1)};
}

PolarizationCurve polarization_scan(const Scene& scene, double frequency,
                                    const std::vector<double>& phi_mw, const Vec3& plane_normal) {
  if (!std::isfinite(frequency)) throw InvalidInput("scan frequency must be finite");
  const auto [u1, u2] = scan_basis(plane_normal);
  const auto tables = scene_tables(scene, u1, u2);
  PolarizationCurve curve;
  curve.frequency = frequency;
  curve.phi_mw = phi_mw;
  curve.strength = evaluate_map(tables, phi_mw, FrequencyGrid::single(frequency), scene.linewidth);
  return curve;
}

ScanMap polarization_scan_map(const Scene& scene, const std::vector<double>& phi_mw,
                              const Vec3& plane_normal) {
  const auto [u1, u2] = scan_basis(plane_normal);
  const auto tables = scene_tables(scene, u1, u2);
  ScanMap map;
  map.phi_mw = phi_mw;
  map.grid = scene.grid;
  map.values = evaluate_map(tables, phi_mw, scene.grid, scene.linewidth);
  return map;
}

PhiFit extract_phi_e(const PolarizationCurve& curve, const Scene& scene, Orientation orientation,
                     const Vec3& plane_normal, double max_residual) {
  const std::size_t n = curve.phi_mw.size();
  if (n < 3 || curve.strength.size() != n) throw InvalidInput("polarization curve needs >= 3 samples");
  const double ss = centered_ss(curve.strength.data(), n);
  if (!(ss > 0.0)) throw GeometryError("polarization curve is flat; phi_E is not observable");

  const Vec3 ef = frame_field(scene, orientation);
  const double e_perp = std::hypot(ef.x(), ef.y());
  if (e_perp == 0.0) throw GeometryError("no transverse field in " + to_string(orientation) + " frame");

  const auto [u1, u2] = scan_basis(plane_normal);
  const FrequencyGrid point = FrequencyGrid::single(curve.frequency);
  std::vector<PairTable> fixed;
  for (int i = 0; i < kNumConfigurations; ++i) {
    const NVConfiguration c = NVConfiguration::from_index(i);
    if (c.orientation == orientation || scene.ensemble.weight(c) == 0.0) continue;
    fixed.push_back(prepare_config(scene, c, frame_field(scene, c.orientation), u1, u2));
  }
  const std::vector<double> base = evaluate_map(fixed, curve.phi_mw, point, scene.linewidth);

  auto cost = [&](double phi) {
    const Vec3 e(e_perp * std::cos(phi), e_perp * std::sin(phi), ef.z());
    std::vector<PairTable> own;
    for (Polarity p : {Polarity::NV, Polarity::VN}) {
      const NVConfiguration c{orientation, p};
      if (scene.ensemble.weight(c) == 0.0) continue;
      own.push_back(prepare_config(scene, c, e, u1, u2));
    }
    std::vector<double> model = evaluate_map(own, curve.phi_mw, point, scene.linewidth);
    for (std::size_t i = 0; i < n; ++i) model[i] += base[i];
    return fit_affine(curve.strength.data(), model.data(), n).rss;
  };

  constexpr int kCoarse = 72;
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kCoarse; ++j) {
    const double c = cost(kTwoPi * j / kCoarse);
    if (c < best_cost) {
      best_cost = c;
      best = j;
    }
  }
  const double h = kTwoPi / kCoarse;
  const double phi = golden_section(cost, kTwoPi * best / kCoarse - h, kTwoPi * best / kCoarse + h, 1e-8);

  PhiFit fit;
  fit.residual = std::sqrt(cost(phi) / ss);
  if (fit.residual > max_residual) {
    std::ostringstream os;
    os << "ambiguous geometry: phi_E fit residual " << fit.residual << " exceeds " << max_residual;
    throw GeometryError(os.str());
  }
  fit.folded = scene.ensemble.weight({orientation, Polarity::NV}) ==
               scene.ensemble.weight({orientation, Polarity::VN});
  fit.phi_e = wrap_angle(phi);
  if (fit.folded && fit.phi_e >= kPi) fit.phi_e -= kPi;
  return fit;
}

TransverseProjection project_transverse(const FieldVector& e_lab, Orientation o,
                                        const CrystalFrame& crystal) {
  const FieldVector f = crystal.lab_to_nv(e_lab, NVConfiguration{o, Polarity::NV});
  return TransverseProjection{o, f.transverse(), wrap_angle(f.phi()), 0.0};
}

ReconstructedField reconstruct_vector(const TransverseProjection& a, const TransverseProjection& b,
                                      const CrystalFrame& crystal, double tolerance) {
  if (a.orientation == b.orientation)
    throw GeometryError("reconstruction needs two distinct orientations");
  for (const auto* p : {&a, &b})
    if (!std::isfinite(p->e_perp) || !std::isfinite(p->phi_e) || p->e_perp < 0.0)
      throw InvalidInput("transverse projection must be finite with E_perp >= 0");
  const FrameTransform ta = crystal.transform(a.orientation);
  const FrameTransform tb = crystal.transform(b.orientation);
  if (std::abs(ta.z_axis().dot(tb.z_axis())) > 1.0 - 1e-6)
    throw GeometryError("NV axes are nearly parallel");

  Eigen::Matrix<double, 4, 3> m;
  m.row(0) = ta.x_axis().transpose();
  m.row(1) = ta.y_axis().transpose();
  m.row(2) = tb.x_axis().transpose();
  m.row(3) = tb.y_axis().transpose();
  Eigen::Vector4d rhs(a.e_perp * std::cos(a.phi_e), a.e_perp * std::sin(a.phi_e),
                      b.e_perp * std::cos(b.phi_e), b.e_perp * std::sin(b.phi_e));
  const Vec3 e = m.colPivHouseholderQr().solve(rhs);

  ReconstructedField out;
  out.e_lab = FieldVector(e);
  out.residual = line_distance(a, b, crystal);
  const double tol = tolerance >= 0.0 ? tolerance : 0.05 * std::max(a.e_perp, b.e_perp) + 1.0;
  if (out.residual > tol) {
    std::ostringstream os;
    os << "inconsistent projections: solution lines are " << out.residual
       << " V/m apart (tolerance " << tol << " V/m)";
    throw GeometryError(os.str());
  }
  return out;
}

std::pair<Orientation, Orientation> sensitive_orientations(const FieldVector& b_lab,
                                                           const CrystalFrame& crystal) {
  const double mag = b_lab.magnitude();
  if (!b_lab.is_finite() || mag == 0.0) throw GeometryError("bias field must be non-zero");
  std::vector<Orientation> hits;
  std::ostringstream dots;
  dots.precision(6);
  for (int i = 0; i < kNumOrientations; ++i) {
    const auto o = static_cast<Orientation>(i);
    const double d = std::abs(b_lab.vec().dot(crystal.transform(o).z_axis())) / mag;
    dots << (i ? ", " : "") << "|B.z| " << to_string(o) << " = " << d;
    if (d < 1e-3) hits.push_back(o);
  }
  if (hits.size() != 2)
    throw GeometryError("bias field must be orthogonal to exactly two NV orientations (" +
                        dots.str() + ")");
  return {hits[0], hits[1]};
}

namespace {

// Polarization-map model for the two sensitive orientations; parameters are
// the NV-frame field components (x, y, z) of each, in units of 1e7 V/m.
class MapModel {
 public:
  static constexpr double kUnit = 1e7;

  MapModel(const Scene& scene, Orientation a, Orientation b, const Vec3& u1, const Vec3& u2,
           std::vector<double> phis, FrequencyGrid grid)
      : scene_(scene), a_(a), b_(b), u1_(u1), u2_(u2), phis_(std::move(phis)), grid_(grid) {}

  std::vector<PairTable> tables(const Eigen::VectorXd& x) const {
    std::vector<PairTable> t;
    for (int side = 0; side < 2; ++side) {
      const Orientation o = side == 0 ? a_ : b_;
      const Vec3 e = kUnit * x.segment<3>(3 * side);
      for (Polarity p : {Polarity::NV, Polarity::VN}) {
        const NVConfiguration c{o, p};
        if (scene_.ensemble.weight(c) == 0.0) continue;
        t.push_back(prepare_config(scene_, c, e, u1_, u2_));
      }
    }
    return t;
  }

  std::vector<double> map(const Eigen::VectorXd& x) const {
    return evaluate_map(tables(x), phis_, grid_, scene_.linewidth);
  }

  // Contribution of one orientation alone, sampled on `grid`.
  std::vector<double> side_map(int side, const Vec3& e, const FrequencyGrid& grid) const {
    const Orientation o = side == 0 ? a_ : b_;
    std::vector<PairTable> t;
    for (Polarity p : {Polarity::NV, Polarity::VN}) {
      const NVConfiguration c{o, p};
      if (scene_.ensemble.weight(c) == 0.0) continue;
      t.push_back(prepare_config(scene_, c, e, u1_, u2_));
    }
    return evaluate_map(t, phis_, grid, scene_.linewidth);
  }

  const FrequencyGrid& grid() const { return grid_; }
  std::size_t rows() const { return phis_.size(); }

 private:
  const Scene& scene_;
  Orientation a_, b_;
  Vec3 u1_, u2_;
  std::vector<double> phis_;
  FrequencyGrid grid_;
};

struct MapResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const MapModel* model;
  const std::vector<double>* data;

  int inputs() const { return 6; }
  int values() const { return static_cast<int>(data->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const std::vector<double> m = model->map(x);
    const Affine af = fit_affine(data->data(), m.data(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      fvec(static_cast<Eigen::Index>(i)) = (*data)[i] - af.scale * m[i] - af.offset;
    return 0;
  }

  // Central differences with a fixed absolute step.
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    constexpr double h = 1e-6;
    Eigen::VectorXd xp = x, fp(values()), fm(values());
    for (int j = 0; j < inputs(); ++j) {
      xp(j) = x(j) + h;
      (*this)(xp, fp);
      xp(j) = x(j) - h;
      (*this)(xp, fm);
      xp(j) = x(j);
      jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return 0;
  }
};

}  // namespace

VectorElectrometryResult reconstruct_from_scan(const ScanMap& measured, const Scene& model_scene,
                                               const Vec3& plane_normal,
                                               const VectorElectrometryOptions& opts) {
  const std::size_t nphi = measured.phi_mw.size();
  if (nphi < 3) throw InvalidInput("scan map needs at least 3 polarization angles");
  if (measured.values.size() != nphi * measured.grid.size())
    throw InvalidInput("scan map size does not match its axes");
  if (!(opts.e_max > 0.0) || opts.coarse_steps < 1 || opts.phase_steps < 2)
    throw InvalidInput("invalid electrometry options");

  const auto [oa, ob] = sensitive_orientations(model_scene.b_lab, model_scene.crystal);
  const auto [u1, u2] = scan_basis(plane_normal);
  const PhysicalConstants& k = model_scene.constants;

  const double lam = lambda_parameter(model_scene.b_lab.magnitude(), k);
  const double centre = k.d_gs + 3.0 * lam;
  const double half = k.d_perp * opts.e_max + lam + std::abs(k.a_par) + 5.0 * model_scene.linewidth;
  const FrequencyGrid& g = measured.grid;
  std::size_t i0 = g.size();
  std::size_t i1 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.at(i) < centre - half || g.at(i) > centre + half) continue;
    i0 = std::min(i0, i);
    i1 = std::max(i1, i);
  }
  if (i0 >= g.size() || i1 - i0 + 1 < 8)
    throw ExtractionError("scan map does not cover the transition window");
  const FrequencyGrid window(g.at(i0), g.step(), i1 - i0 + 1);
  const std::size_t nf = window.size();

  std::vector<double> data(nphi * nf);
  for (std::size_t r = 0; r < nphi; ++r)
    for (std::size_t i = 0; i < nf; ++i) data[r * nf + i] = measured.at(r, i0 + i);
  const double ss = centered_ss(data.data(), data.size());
  if (!(ss > 0.0)) throw ExtractionError("scan map is flat in the transition window");

  const MapModel model(model_scene, oa, ob, u1, u2, measured.phi_mw, window);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);

  // Exhaustive coarse search over (E_perp, phi_E) of both orientations. The
  // map is a sum of per-orientation parts, so every pairing is scored from
  // inner products of precomputed parts.
  {
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(model_scene.linewidth / 5.0 / window.step()));
    const FrequencyGrid coarse(window.start(), window.step() * static_cast<double>(stride),
                               (nf - 1) / stride + 1);
    const std::size_t nc = coarse.size();
    Eigen::VectorXd y(static_cast<Eigen::Index>(nphi * nc));
    for (std::size_t r = 0; r < nphi; ++r)
      for (std::size_t i = 0; i < nc; ++i) y(static_cast<Eigen::Index>(r * nc + i)) = data[r * nf + i * stride];

    std::array<std::vector<Vec3>, 2> trial;
    std::array<Eigen::MatrixXd, 2> parts;
    for (int side = 0; side < 2; ++side) {
      const Orientation o = side == 0 ? oa : ob;
      const bool sym = model_scene.ensemble.weight({o, Polarity::NV}) ==
                       model_scene.ensemble.weight({o, Polarity::VN});
      const double span = sym ? kPi : kTwoPi;
      trial[side].push_back(Vec3::Zero());
      for (int ie = 1; ie <= opts.coarse_steps; ++ie)
        for (int ip = 0; ip < opts.phase_steps; ++ip) {
          const double e = opts.e_max * ie / opts.coarse_steps;
          const double p = span * ip / opts.phase_steps;
          trial[side].push_back(Vec3(e * std::cos(p), e * std::sin(p), 0.0));
        }
      parts[side].resize(static_cast<Eigen::Index>(trial[side].size()), y.size());
      for (std::size_t t = 0; t < trial[side].size(); ++t) {
        const std::vector<double> m = model.side_map(side, trial[side][t], coarse);
        parts[side].row(static_cast<Eigen::Index>(t)) = Eigen::Map<const Eigen::RowVectorXd>(m.data(), y.size());
      }
    }
    const double n = static_cast<double>(y.size());
    const double ybar = y.mean();
    const double syy = (y.array() - ybar).square().sum();
    const Eigen::VectorXd sa = parts[0].rowwise().sum(), sb = parts[1].rowwise().sum();
    const Eigen::VectorXd qa = parts[0].rowwise().squaredNorm(), qb = parts[1].rowwise().squaredNorm();
    const Eigen::VectorXd ya = parts[0] * y, yb = parts[1] * y;
    const Eigen::MatrixXd cross = parts[0] * parts[1].transpose();
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index j = 0; j < cross.cols(); ++j) {
      for (Eigen::Index i = 0; i < cross.rows(); ++i) {
        const double sm = sa(i) + sb(j);
        const double sxx = qa(i) + qb(j) + 2.0 * cross(i, j) - sm * sm / n;
        const double sxy = ya(i) + yb(j) - sm * ybar;
        const double scale = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
        const double rss = syy - scale * (2.0 * sxy - scale * sxx);
        if (rss < best) {
          best = rss;
          bi = i;
          bj = j;
        }
      }
    }
    x.segment<3>(0) = trial[0][static_cast<std::size_t>(bi)] / MapModel::kUnit;
    x.segment<3>(3) = trial[1][static_cast<std::size_t>(bj)] / MapModel::kUnit;
  }
  // Joint refinement.
  {
    MapResidual functor{&model, &data};
    Eigen::LevenbergMarquardt<MapResidual> lm(functor);
    lm.parameters.maxfev = 400;
    lm.parameters.xtol = 1e-10;
    lm.parameters.ftol = 1e-14;
    lm.minimize(x);
  }

  VectorElectrometryResult out;
  {
    const std::vector<double> m = model.map(x);
    out.fit_residual = std::sqrt(fit_affine(data.data(), m.data(), m.size()).rss / ss);
  }
  if (!(out.fit_residual <= opts.max_residual)) {
    std::ostringstream os;
    os << "spectral fit did not converge: relative residual " << out.fit_residual << " exceeds "
       << opts.max_residual;
    throw ExtractionError(os.str());
  }

  const Vec3 ea = MapModel::kUnit * x.segment<3>(0);
  const Vec3 eb = MapModel::kUnit * x.segment<3>(3);
  out.axial = {ea.z(), eb.z()};
  out.a = TransverseProjection{oa, std::hypot(ea.x(), ea.y()), wrap_angle(std::atan2(ea.y(), ea.x())),
                               out.fit_residual};
  out.b = TransverseProjection{ob, std::hypot(eb.x(), eb.y()), wrap_angle(std::atan2(eb.y(), eb.x())),
                               out.fit_residual};

  // Flipping one orientation's transverse part swaps its NV and VN spectra,
  // so that sign is only seen through the other two orientations.
  const auto& w = model_scene.ensemble;
  const bool sym_a = w.weight({oa, Polarity::NV}) == w.weight({oa, Polarity::VN});
  const bool sym_b = w.weight({ob, Polarity::NV}) == w.weight({ob, Polarity::VN});
  const CrystalFrame& crystal = model_scene.crystal;
  const auto all_tables = [&](const Vec3& e) {
    Scene sc = model_scene;
    sc.e_lab = FieldVector(e);
    return scene_tables(sc, u1, u2);
  };
  struct Candidate {
    TransverseProjection a, b;
    double rss = 0.0;
  };
  std::vector<Candidate> cands;
  for (int fa = 0; fa < (sym_a ? 2 : 1); ++fa) {
    for (int fb = 0; fb < (sym_b ? 2 : 1); ++fb) {
      Candidate c{fa ? flipped(out.a) : out.a, fb ? flipped(out.b) : out.b, 0.0};
      const Vec3 e = reconstruct_vector(c.a, c.b, crystal, std::numeric_limits<double>::infinity())
                         .e_lab.vec();
      const std::vector<double> m = evaluate_map(all_tables(e), measured.phi_mw, g, model_scene.linewidth);
      c.rss = fit_affine(measured.values.data(), m.data(), m.size()).rss;
      cands.push_back(c);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::min(best, c.rss);
  const double tie = best * (1.0 + 1e-6) + 1e-300;
  const Candidate* pick = nullptr;
  int ties = 0;
  for (const auto& c : cands) {
    if (c.rss > tie) continue;
    ++ties;
    if (!pick || (pick->b.phi_e >= kPi && c.b.phi_e < kPi)) pick = &c;
  }
  out.a = pick->a;
  out.b = pick->b;
  if (ties > 1) {
    out.sign_ambiguous = true;
    out.warnings.push_back(
        "E and -E give identical spectra for equal NV/VN populations; sign fixed by convention "
        "(phi_E of " + to_string(ob) + " in [0, 180) deg)");
  }
  out.field = reconstruct_vector(out.a, out.b, crystal);
  return out;
}

}  // namespace nvodmr
