#include "nvodmr/kernels.hpp"

#include "nvodmr/errors.hpp"

#include <cstdlib>
#include <string>

namespace nvodmr::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(NVODMR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("NVODMR_ISA")) {
    if (std::string(env) == "scalar") return Isa::Scalar;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

void require(Isa isa) {
  if (!isa_available(isa))
    throw InvalidInput("kernel variant " + std::string(isa_name(isa)) + " is not available");
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
    case Isa::Neon:
#if defined(NVODMR_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

void lorentzian_accumulate(Isa isa, const double* centers, const double* amps,
                           std::size_t n_lines, double q, double start, double step,
                           std::size_t n_points, double* out) {
  require(isa);
  switch (isa) {
#if defined(NVODMR_HAVE_AVX2)
    case Isa::Avx2:
      detail::lorentzian_avx2(centers, amps, n_lines, q, start, step, n_points, out);
      return;
#endif
#if defined(NVODMR_HAVE_NEON)
    case Isa::Neon:
      detail::lorentzian_neon(centers, amps, n_lines, q, start, step, n_points, out);
      return;
#endif
    default:
      detail::lorentzian_scalar(centers, amps, n_lines, q, start, step, n_points, out);
  }
}

void lorentzian_accumulate(const double* centers, const double* amps, std::size_t n_lines,
                           double q, double start, double step, std::size_t n_points,
                           double* out) {
  lorentzian_accumulate(active_isa(), centers, amps, n_lines, q, start, step, n_points, out);
}

void axpy(Isa isa, double a, const double* x, double* y, std::size_t n) {
  require(isa);
  switch (isa) {
#if defined(NVODMR_HAVE_AVX2)
    case Isa::Avx2: detail::axpy_avx2(a, x, y, n); return;
#endif
#if defined(NVODMR_HAVE_NEON)
    case Isa::Neon: detail::axpy_neon(a, x, y, n); return;
#endif
    default: detail::axpy_scalar(a, x, y, n);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) { axpy(active_isa(), a, x, y, n); }

}  // namespace nvodmr::kernels
