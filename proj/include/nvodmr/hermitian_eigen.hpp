#pragma once

// Cyclic complex Jacobi eigensolver for small dense Hermitian matrices.
//
// Each rotation first removes the phase of the pivot element and then applies
// a real Givens rotation, so the iteration stays unitary and the eigenvalues
// are obtained to a few ulps of the matrix norm. For the 9x9 spin problems
// here that is ~1e-12 MHz, far below any linewidth of interest.

#include "nvodmr/errors.hpp"
#include "nvodmr/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace nvodmr {

template <int N>
struct HermitianEigen {
  Eigen::Matrix<double, N, 1> values;  // ascending
  Eigen::Matrix<cplx, N, N> vectors;   // orthonormal columns
  int sweeps = 0;
};

template <int N>
std::string dump_matrix(const Eigen::Matrix<cplx, N, N>& m) {
  std::ostringstream os;
  os.precision(17);
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) {
      os << (c ? " " : "") << '(' << m(r, c).real() << ',' << m(r, c).imag() << ')';
    }
    os << '\n';
  }
  return os.str();
}

/// Diagonalize a Hermitian matrix.
///
/// Eigenvalues come back ascending (ties keep their original diagonal order).
/// Each eigenvector is rephased so that its largest-magnitude component is
/// real and positive, which makes repeated runs bit-identical.
/// Throws NumericError (carrying a dump of the input) if the off-diagonal
/// norm has not vanished after `max_sweeps` sweeps.
template <int N>
HermitianEigen<N> jacobi_eigen(const Eigen::Matrix<cplx, N, N>& h, int max_sweeps = 64) {
  using Mat = Eigen::Matrix<cplx, N, N>;
  Mat a = h;
  Mat v = Mat::Identity();

  const double scale = a.norm();
  const double eps = std::numeric_limits<double>::epsilon();
  const double target = (4.0 * eps * scale) * (4.0 * eps * scale);

  auto off_diagonal = [&a] {
    double s = 0.0;
    for (int q = 1; q < N; ++q)
      for (int p = 0; p < q; ++p) s += std::norm(a(p, q));
    return 2.0 * s;
  };

  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_diagonal();
    if (off <= target || off == 0.0) break;
    if (sweep >= max_sweeps) {
      throw NumericError("Hermitian eigensolver did not converge after " +
                             std::to_string(max_sweeps) + " sweeps",
                         dump_matrix<N>(h));
    }
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx cph = std::conj(phase);

        // a <- a * U, with U = [[c, s], [-s conj(ph), c conj(ph)]] on (p, q).
        for (int k = 0; k < N; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * cph * akq;
          a(k, q) = s * akp + c * cph * akq;
        }
        // a <- U^H * a
        for (int k = 0; k < N; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (int k = 0; k < N; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s * cph * vkq;
          v(k, q) = s * vkp + c * cph * vkq;
        }
      }
    }
  }

  std::array<int, N> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigen<N> out;
  out.sweeps = sweep;
  for (int col = 0; col < N; ++col) {
    const int src = order[col];
    out.values(col) = a(src, src).real();
    int lead = 0;
    for (int r = 1; r < N; ++r)
      if (std::abs(v(r, src)) > std::abs(v(lead, src))) lead = r;
    const cplx ref = v(lead, src);
    const cplx fix = std::abs(ref) > 0.0 ? std::conj(ref) / std::abs(ref) : cplx(1.0);
    for (int r = 0; r < N; ++r) out.vectors(r, col) = v(r, src) * fix;
    out.vectors(lead, col) = std::abs(ref);
  }
  return out;
}

}  // namespace nvodmr
