#include "nvodmr/kernels.hpp"

#include <arm_neon.h>

namespace nvodmr::kernels::detail {

void lorentzian_neon(const double* centers, const double* amps, std::size_t n_lines, double q,
                     double start, double step, std::size_t n_points, double* out) {
  const float64x2_t vq = vdupq_n_f64(q);
  const float64x2_t vstart = vdupq_n_f64(start);
  const float64x2_t vstep = vdupq_n_f64(step);
  const double lane_init[2] = {0.0, 1.0};
  const float64x2_t lane = vld1q_f64(lane_init);
  const std::size_t n2 = n_points & ~std::size_t{1};

  for (std::size_t k = 0; k < n_lines; ++k) {
    const double c = centers[k];
    const double aq = amps[k] * q;
    const float64x2_t vc = vdupq_n_f64(c);
    const float64x2_t vaq = vdupq_n_f64(aq);
    std::size_t i = 0;
    for (; i < n2; i += 2) {
      const float64x2_t idx = vaddq_f64(vdupq_n_f64(static_cast<double>(i)), lane);
      const float64x2_t x = vaddq_f64(vstart, vmulq_f64(idx, vstep));
      const float64x2_t d = vsubq_f64(x, vc);
      const float64x2_t den = vaddq_f64(vmulq_f64(d, d), vq);
      vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), vdivq_f64(vaq, den)));
    }
    for (; i < n_points; ++i) {
      const double x = start + static_cast<double>(i) * step;
      const double d = x - c;
      out[i] += aq / (d * d + q);
    }
  }
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const std::size_t n2 = n & ~std::size_t{1};
  std::size_t i = 0;
  for (; i < n2; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace nvodmr::kernels::detail
