#include "nvodmr/kernels.hpp"

namespace nvodmr::kernels::detail {

void lorentzian_scalar(const double* centers, const double* amps, std::size_t n_lines, double q,
                       double start, double step, std::size_t n_points, double* out) {
  for (std::size_t k = 0; k < n_lines; ++k) {
    const double c = centers[k];
    const double aq = amps[k] * q;
    for (std::size_t i = 0; i < n_points; ++i) {
      const double x = start + static_cast<double>(i) * step;
      const double d = x - c;
      out[i] += aq / (d * d + q);
    }
  }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace nvodmr::kernels::detail
