#pragma once

// Hot loops of the spectrum engine. Each kernel has a portable scalar
// reference and optional SIMD variants; the active variant is picked once at
// runtime from CPU features. All variants evaluate the same IEEE operation
// sequence per element and therefore return bitwise-identical results.
//
// Setting NVODMR_ISA=scalar in the environment forces the reference path.

#include <cstddef>
#include <string_view>

namespace nvodmr::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa);
// Variant used by the dispatching entry points.
Isa active_isa();

/// out[i] += sum_k amp[k] * q / ((x_i - center[k])^2 + q), x_i = start + i * step.
void lorentzian_accumulate(const double* centers, const double* amps, std::size_t n_lines,
                           double q, double start, double step, std::size_t n_points,
                           double* out);
void lorentzian_accumulate(Isa isa, const double* centers, const double* amps,
                           std::size_t n_lines, double q, double start, double step,
                           std::size_t n_points, double* out);

/// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
void axpy(Isa isa, double a, const double* x, double* y, std::size_t n);

namespace detail {
void lorentzian_scalar(const double*, const double*, std::size_t, double, double, double,
                       std::size_t, double*);
void axpy_scalar(double, const double*, double*, std::size_t);
#if defined(NVODMR_HAVE_AVX2)
void lorentzian_avx2(const double*, const double*, std::size_t, double, double, double,
                     std::size_t, double*);
void axpy_avx2(double, const double*, double*, std::size_t);
#endif
#if defined(NVODMR_HAVE_NEON)
void lorentzian_neon(const double*, const double*, std::size_t, double, double, double,
                     std::size_t, double*);
void axpy_neon(double, const double*, double*, std::size_t);
#endif
}  // namespace detail

}  // namespace nvodmr::kernels
