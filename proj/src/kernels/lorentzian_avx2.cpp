#include "nvodmr/kernels.hpp"

#include <immintrin.h>

namespace nvodmr::kernels::detail {

void lorentzian_avx2(const double* centers, const double* amps, std::size_t n_lines, double q,
                     double start, double step, std::size_t n_points, double* out) {
  const __m256d vq = _mm256_set1_pd(q);
  const __m256d vstart = _mm256_set1_pd(start);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const std::size_t n4 = n_points & ~std::size_t{3};

  for (std::size_t k = 0; k < n_lines; ++k) {
    const double c = centers[k];
    const double aq = amps[k] * q;
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vaq = _mm256_set1_pd(aq);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
      const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
      const __m256d x = _mm256_add_pd(vstart, _mm256_mul_pd(idx, vstep));
      const __m256d d = _mm256_sub_pd(x, vc);
      const __m256d den = _mm256_add_pd(_mm256_mul_pd(d, d), vq);
      const __m256d acc = _mm256_loadu_pd(out + i);
      _mm256_storeu_pd(out + i, _mm256_add_pd(acc, _mm256_div_pd(vaq, den)));
    }
    for (; i < n_points; ++i) {
      const double x = start + static_cast<double>(i) * step;
      const double d = x - c;
      out[i] += aq / (d * d + q);
    }
  }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace nvodmr::kernels::detail
