// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include "nvodmr/cli.hpp"
#include "nvodmr/electrometry.hpp"
#include "nvodmr/hermitian_eigen.hpp"
#include "nvodmr/kernels.hpp"
#include "nvodmr/sensing.hpp"

#include "../support/oracle.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace nvodmr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const NVConfiguration kNV1{Orientation::NV1, Polarity::NV};
const NVConfiguration kVN1{Orientation::NV1, Polarity::VN};

// Discrete local maxima above `rel` of the global maximum.
std::vector<std::size_t> local_maxima(const std::vector<double>& v, double rel) {
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > rel * top) idx.push_back(i);
  return idx;
}

// Ground state and the two m_I = 0, m_s != 0 states of a diagonalized system.
struct Mi0States {
  int g = 0, lo = 0, hi = 0;
};

Mi0States mi0_states(const EigenSystem& eig) {
  Mi0States s;
  for (int k = 1; k < kSpinDim; ++k)
    if (std::norm(eig.vectors(basis_index(0, 0), k)) > std::norm(eig.vectors(basis_index(0, 0), s.g)))
      s.g = k;
  std::vector<std::pair<double, int>> cand;
  for (int k = 0; k < kSpinDim; ++k)
    if (k != s.g && oracle::ms_weight(eig.vectors, k, 0) < 0.5)
      cand.emplace_back(-oracle::mi_weight(eig.vectors, k, 0), k);
  std::sort(cand.begin(), cand.end());
  s.lo = std::min(cand[0].second, cand[1].second);
  s.hi = std::max(cand[0].second, cand[1].second);
  return s;
}

double line_amplitude(const std::vector<TransitionLine>& lines, int a, int b) {
  for (const auto& l : lines)
    if ((l.i == a && l.f == b) || (l.i == b && l.f == a)) return l.amplitude;
  return 0.0;
}

Outcome zero_field_triplet() {
  Scene s;
  s.linewidth = 0.3;
  s.grid = FrequencyGrid::range(2860.0, 2880.0, 0.0005);
  s.ensemble = Ensemble::single(kNV1);
  const Spectrum sp = ensemble_spectrum(s);
  const auto peaks = find_peaks(sp, 2860.0, 2880.0, 0.1);

  const SpinSystem sys = build_total(FieldVector(), FieldVector());
  const oracle::Lines ref = oracle::transitions(sys.h, s.crystal.lab_to_nv(s.drive.components()[0], kNV1));
  double worst = 0.0;
  for (const auto& p : peaks) {
    double best = 1e9;
    for (std::size_t i = 0; i < ref.frequency.size(); ++i)
      if (ref.amplitude[i] > 1e-3) best = std::min(best, std::abs(ref.frequency[i] - p.frequency));
    worst = std::max(worst, best);
  }
  const double a = std::abs(s.constants.a_par);
  const bool nominal = peaks.size() == 3 && std::abs(peaks[0].frequency - (2870.0 - a)) < 0.05 &&
                       std::abs(peaks[1].frequency - 2870.0) < 0.05 &&
                       std::abs(peaks[2].frequency - (2870.0 + a)) < 0.05;
  std::string where;
  for (const auto& p : peaks) where += fmt(" %.4f", p.frequency);
  return {nominal && worst < 0.01,
          fmt("%zu peaks at", peaks.size()) + where + fmt(" MHz; max offset from 9x9 lines %.2e MHz", worst)};
}

Outcome axial_zeeman() {
  auto split = [](double b) {
    const auto [lo, hi] = oracle::mi0_pair(build_total(FieldVector::cartesian(0, 0, b), FieldVector()).h);
    return hi - lo;
  };
  const double s18 = split(1.8);
  // Least-squares slope of the splitting over 0..100 G.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double b = 0.0; b <= 100.0 + 1e-9; b += 5.0, ++n) {
    const double y = split(b);
    sx += b, sy += y, sxx += b * b, sxy += b * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double expect = 2.0 * PhysicalConstants{}.gamma_nv;
  const double rel = slope / expect - 1.0;
  return {std::abs(s18 - 10.08) <= 0.01 && std::abs(rel) <= 1e-6,
          fmt("splitting at 1.8 G %.6f MHz; slope %.9f MHz/G (relative deviation %.2e)", s18, slope, rel)};
}

Outcome transverse_stark() {
  const auto [lo, hi] = oracle::mi0_pair(build_total(FieldVector(), FieldVector::cartesian(4e7, 0, 0)).h);
  return {std::abs((hi - lo) - 13.6) <= 0.05, fmt("m_I=0 doublet splitting %.6f MHz", hi - lo)};
}

Outcome polarization_suppression() {
  const PhysicalConstants k;
  const SpinSystem sys = build_total(FieldVector(), FieldVector::cartesian(4e7, 0, 0), k);
  const EigenSystem eig = diagonalize(sys);
  const Mi0States st = mi0_states(eig);
  auto ratio = [&](double phi_mw) {
    const auto lines = transition_lines(eig, CVec3(std::cos(phi_mw), std::sin(phi_mw), 0.0), k);
    return std::pair{line_amplitude(lines, st.g, st.lo), line_amplitude(lines, st.g, st.hi)};
  };
  const auto [l0, u0] = ratio(0.0);
  const auto [l90, u90] = ratio(kPi / 2.0);
  const bool pass = l0 < 1e-6 * u0 && u90 < 1e-6 * l90;
  return {pass, fmt("phi_mw=0: lower/upper = %.3e/%.3e; phi_mw=90: lower/upper = %.3e/%.3e", l0, u0, l90, u90)};
}

Outcome ensemble_resolution() {
  SceneSpec spec;
  spec.b = {18.0, deg_to_rad(25.0), deg_to_rad(20.0), std::nullopt};
  spec.mw.theta = kPi / 2.0;
  spec.mw.phi = 0.0;
  spec.linewidth = 0.3;
  spec.grid = FrequencyGrid::range(2780.0, 2960.0, 0.005);
  const Spectrum sp = ensemble_spectrum(spec.resolve());
  const std::size_t n = local_maxima(sp.values, 0.1).size();
  return {n == 24, fmt("%zu local maxima above 10%% of the global maximum", n)};
}

Outcome nv_vn_equivalence() {
  SceneSpec spec;
  spec.b = {20.0, kPi / 2.0, 0.0, Orientation::NV1};
  spec.linewidth = 1.0;
  spec.grid = FrequencyGrid::range(2780.0, 2960.0, 0.01);
  const Scene pure = spec.resolve();
  const Spectrum nv = single_config_spectrum(pure, kNV1);
  const Spectrum vn = single_config_spectrum(pure, kVN1);
  double diff = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < nv.values.size(); ++i) {
    diff = std::max(diff, std::abs(nv.values[i] - vn.values[i]));
    peak = std::max(peak, nv.values[i]);
  }

  const PhysicalConstants k;
  const FieldVector b_lab = pure.b_lab;
  const FieldVector e_lab = pure.crystal.nv_to_lab(FieldVector::cartesian(1e7, 0, 0), kNV1);
  auto splitting = [&](NVConfiguration c) {
    const auto sys = build_total(pure.crystal.lab_to_nv(b_lab, c), pure.crystal.lab_to_nv(e_lab, c), k);
    const auto [lo, hi] = oracle::mi0_pair(sys.h);
    return hi - lo;
  };
  const double snv = splitting(kNV1);
  const double svn = splitting(kVN1);
  const bool pass = diff < 1e-10 * peak && std::abs(snv - svn) > 1.0;
  return {pass, fmt("pure B: max diff/peak %.2e; with E: NV %.4f MHz vs VN %.4f MHz", diff / peak, snv, svn)};
}

Outcome closed_form_oracle() {
  const PhysicalConstants k;
  double worst = 0.0;
  for (double b = 5.0; b <= 50.0 + 1e-9; b += 5.0) {
    for (double e : {1e6, 5e6, 1e7, 2e7, 3e7, 4e7, 5e7}) {
      for (double phi : {0.0, kPi / 4.0, kPi / 2.0}) {
        const FieldVector ef = FieldVector::cartesian(e * std::cos(phi), e * std::sin(phi), 0.0);
        const auto [lo, hi] = oracle::mi0_pair(build_total(FieldVector::cartesian(b, 0, 0), ef, k).h);
        const auto [alo, ahi] = analytic_transition_freqs(ef, b, 0.0, k);
        worst = std::max({worst, std::abs(lo - alo), std::abs(hi - ahi)});
      }
    }
  }
  return {worst <= 0.1, fmt("worst |numeric - closed form| = %.4f MHz over 210 scenes", worst)};
}

SceneSpec single_sensing_scene() {
  SceneSpec spec;
  spec.b = {0.0, kPi / 2.0, 0.0, Orientation::NV1};
  spec.e = {5e6, kPi / 2.0, kPi / 4.0, Orientation::NV1};
  spec.mw.mode = MWDrive::Mode::Unpolarized;
  spec.mw.frame = Orientation::NV1;
  spec.linewidth = 1.0;
  spec.ensemble = Ensemble::single(kNV1);
  return spec;
}

SceneSpec ensemble_sensing_scene() {
  SceneSpec spec = single_sensing_scene();
  spec.mw = MWSpec{};
  spec.mw.theta = kPi / 2.0;
  spec.mw.phi = kPi / 2.0;
  spec.mw.frame = Orientation::NV1;
  spec.ensemble = Ensemble::uniform();
  return spec;
}

std::vector<double> span(double a, double b, double step) {
  std::vector<double> v;
  for (int i = 0; a + i * step <= b + 1e-9; ++i) v.push_back(a + i * step);
  return v;
}

std::vector<double> max_abs_curve(const SweepResult& r) {
  std::vector<double> v;
  for (const auto& p : r.points) v.push_back(p.extrema.max_abs());
  return v;
}

Outcome sensitivity_map() {
  const auto bs = span(0.0, 100.0, 1.0);
  const auto single = max_abs_curve(sweep(single_sensing_scene(), SweepParameter::BMagnitude, bs));
  std::size_t imin = 0;
  for (std::size_t i = 0; i < 71; ++i)
    if (single[i] < single[imin]) imin = i;
  const double top = *std::max_element(single.begin(), single.begin() + 71);
  const bool crossing = bs[imin] >= 25.0 && bs[imin] <= 35.0 && single[imin] <= 0.05 * top;
  double plateau = 0.0;
  for (std::size_t i = 0; i <= 15; ++i) plateau += single[i] / 16.0;

  const auto ens = max_abs_curve(sweep(ensemble_sensing_scene(), SweepParameter::BMagnitude, bs));
  const std::size_t imax = std::max_element(ens.begin(), ens.end()) - ens.begin();
  const double fraction = Ensemble{}.weight(kNV1) + Ensemble{}.weight(kVN1);
  const double gain = ens[60] / fraction / plateau;
  const bool peak = bs[imax] >= 55.0 && bs[imax] <= 65.0 && imax + 1 < ens.size() && imax > 0;
  return {crossing && peak && gain >= 1.8,
          fmt("single: min %.3e at %.0f G (%.1f%% of max); ensemble: max %.3e at %.0f G "
              "(60 G: %.3e, 70 G: %.3e); gain at 60 G %.2f",
              single[imin], bs[imin], 100.0 * single[imin] / top, ens[imax], bs[imax], ens[60], ens[70], gain)};
}

Outcome misalignment() {
  SceneSpec spec = ensemble_sensing_scene();
  spec.b.magnitude = 60.0;
  std::vector<double> deg = span(-10.0, 10.0, 0.5);
  std::vector<double> rad;
  for (double d : deg) rad.push_back(deg_to_rad(d));
  const auto v = max_abs_curve(sweep(spec, SweepParameter::BPolarMisalignment, rad));
  const std::size_t i0 = 20;
  const std::size_t imax = std::max_element(v.begin(), v.end()) - v.begin();
  double lo_neg = v[i0], lo_pos = v[i0];
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] >= -5.0 && deg[i] < 0.0) lo_neg = std::min(lo_neg, v[i]);
    if (deg[i] > 0.0 && deg[i] <= 5.0) lo_pos = std::min(lo_pos, v[i]);
  }
  const bool pass = imax == i0 && lo_neg <= 0.5 * v[i0] && lo_pos <= 0.5 * v[i0];
  return {pass, fmt("max at %.1f deg (%.3e); min within 5 deg: %.1f%% / %.1f%% of aligned value", deg[imax],
                    v[imax], 100.0 * lo_neg / v[i0], 100.0 * lo_pos / v[i0])};
}

Outcome vector_electrometry() {
  Scene s;
  s.linewidth = 1.0;
  s.grid = FrequencyGrid::range(2820.0, 2920.0, 0.1);
  s.b_lab = FieldVector(20.0 * Vec3(0, 1, 1).normalized());
  const Vec3 e_true(45e6, 15e6, -15e6);
  s.e_lab = FieldVector(e_true);

  // Resolved ensemble peak nearest the lower m_I = 0 line of NV4.
  const NVConfiguration nv4{Orientation::NV4, Polarity::NV};
  const double nv4_lower = oracle::mi0_pair(
      build_total(s.crystal.lab_to_nv(s.b_lab, nv4), s.crystal.lab_to_nv(s.e_lab, nv4)).h).first;
  double f_lower = 0.0;
  for (const auto& p : find_peaks(ensemble_spectrum(s), 2850.0, 2890.0, 0.2))
    if (f_lower == 0.0 || std::abs(p.frequency - nv4_lower) < std::abs(f_lower - nv4_lower)) f_lower = p.frequency;
  std::vector<double> fine;
  for (int i = 0; i < 180; ++i) fine.push_back(deg_to_rad(i));
  const PolarizationCurve curve = polarization_scan(s, f_lower, fine);
  const std::size_t iarg = std::max_element(curve.strength.begin(), curve.strength.end()) - curve.strength.begin();
  const double arg_deg = rad_to_deg(fine[iarg]);
  const PhiFit fit = extract_phi_e(curve, s, Orientation::NV4);
  const double phi_deg = rad_to_deg(fit.phi_e);

  std::vector<double> coarse;
  for (int i = 0; i < 12; ++i) coarse.push_back(deg_to_rad(15.0 * i));
  const auto rec = reconstruct_from_scan(polarization_scan_map(s, coarse), s);
  const Vec3 got = rec.field.e_lab.vec();
  double comp = 0.0;
  for (int i = 0; i < 3; ++i) comp = std::max(comp, std::abs(got(i) - e_true(i)) / std::abs(e_true(i)));

  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(1e7, 5e7);
  double worst = 0.0;
  int failures = 0;
  for (int n = 0; n < 200; ++n) {
    Vec3 d;
    do d = Vec3(u(rng), u(rng), u(rng));
    while (d.norm() > 1.0 || d.norm() < 0.1);
    const Vec3 e = mag(rng) * d.normalized();
    s.e_lab = FieldVector(e);
    try {
      const Vec3 g = reconstruct_from_scan(polarization_scan_map(s, coarse), s).field.e_lab.vec();
      const double err = std::min((g - e).cwiseAbs().maxCoeff(), (g + e).cwiseAbs().maxCoeff()) / e.norm();
      worst = std::max(worst, err);
      if (err > 0.05) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }

  const bool pass = std::abs(phi_deg - 60.0) <= 1.0 && std::abs(arg_deg - 30.0) <= 2.0 && comp <= 0.02 &&
                    failures == 0;
  return {pass, fmt("phi_E(NV4) %.2f deg; scan arg-max %.0f deg at %.3f MHz; E = (%.4g, %.4g, %.4g) V/m, "
                    "worst component error %.2e; random: %d/200 outside 5%%, worst %.2e of |E|",
                    phi_deg, arg_deg, f_lower, got(0), got(1), got(2), comp, failures, worst)};
}

Outcome property_suites() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double herm = 0.0, trace = 0.0, ortho = 0.0, recon = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const FieldVector b = FieldVector::cartesian(100.0 * u(rng), 100.0 * u(rng), 100.0 * u(rng));
    const FieldVector e = FieldVector::cartesian(5e7 * u(rng), 5e7 * u(rng), 5e7 * u(rng));
    const CMat9 h = build_total(b, e).h;
    const EigenSystem eig = diagonalize(h);
    herm = std::max(herm, (h - h.adjoint()).cwiseAbs().maxCoeff());
    trace = std::max(trace, std::abs(h.trace().real() - eig.frequencies.sum()));
    ortho = std::max(ortho, (eig.vectors.adjoint() * eig.vectors - CMat9::Identity()).cwiseAbs().maxCoeff());
    const CMat9 back = eig.vectors * eig.frequencies.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
    recon = std::max(recon, (back - h).cwiseAbs().maxCoeff());
  }

  double fwhm_err = 0.0;
  for (double delta : {0.3, 1.0, 2.5}) {
    const FrequencyGrid g = FrequencyGrid::range(2850.0, 2890.0, 1e-4);
    const Spectrum sp = broaden({TransitionLine{2870.0, 1.0, 0, 1}}, g, delta);
    const double top = *std::max_element(sp.values.begin(), sp.values.end());
    std::size_t a = 0;
    while (sp.values[a] < 0.5 * top) ++a;
    std::size_t b = sp.values.size() - 1;
    while (sp.values[b] < 0.5 * top) --b;
    // Linear interpolation of the half-maximum crossings.
    const double xa = g.at(a - 1) + g.step() * (0.5 * top - sp.values[a - 1]) / (sp.values[a] - sp.values[a - 1]);
    const double xb = g.at(b) + g.step() * (sp.values[b] - 0.5 * top) / (sp.values[b] - sp.values[b + 1]);
    fwhm_err = std::max(fwhm_err, std::abs((xb - xa) - delta) / delta);
  }

  const auto dir = std::filesystem::temp_directory_path() / "nvodmr_acceptance";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "scene.cfg";
  {
    std::ofstream f(cfg, std::ios::binary);
    f << "linewidth = 1\nb.magnitude = 30\nb.theta = 90\nb.frame = NV1\ne.magnitude = 5e6\n"
         "e.theta = 90\ne.phi = 45\ne.frame = NV1\nmw.mode = unpolarized\nmw.frame = NV1\n";
  }
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    args.insert(args.begin(), "nvodmr");
    const int code = run_cli(args, out, err);
    return std::pair{code, out.str()};
  };
  bool same = true;
  for (const std::string cmd : {"spectrum", "sensitivity"}) {
    const auto r1 = run({cmd, "--config", cfg.string(), "--quiet"});
    const auto r2 = run({cmd, "--config", cfg.string(), "--quiet"});
    same = same && r1.first == 0 && r1 == r2;
  }
  const auto s1 = run({"sweep", "--config", cfg.string(), "--param", "B_magnitude", "--range", "0:40:10", "--quiet"});
  const auto s2 = run({"sweep", "--config", cfg.string(), "--param", "B_magnitude", "--range", "0:40:10", "--quiet"});
  same = same && s1.first == 0 && s1 == s2;
  std::filesystem::remove_all(dir);

  const bool pass = herm == 0.0 && trace < 1e-9 && ortho < 1e-12 && recon < 1e-9 && fwhm_err < 1e-3 && same;
  return {pass, fmt("1000 scenes: |H-H^+| %.1e, trace %.1e, orthonormality %.1e, reconstruction %.1e MHz; "
                    "FWHM relative error %.1e; byte-identical reruns %s",
                    herm, trace, ortho, recon, fwhm_err, same ? "yes" : "no")};
}

}  // namespace

int main() {
  std::cout << "kernel variant: " << kernels::isa_name(kernels::active_isa()) << "\n";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"zero-field triplet", zero_field_triplet},
      {"axial Zeeman splitting and slope", axial_zeeman},
      {"transverse Stark doublet", transverse_stark},
      {"polarization suppression", polarization_suppression},
      {"ensemble resolution", ensemble_resolution},
      {"NV/VN equivalence", nv_vn_equivalence},
      {"closed-form transition frequencies", closed_form_oracle},
      {"sensitivity map", sensitivity_map},
      {"misalignment", misalignment},
      {"vector electrometry round trip", vector_electrometry},
      {"property suites", property_suites},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, fn] : checks) {
    ++id;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail << "\n";
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
