#include "nvodmr/hermitian_eigen.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace nvodmr;

namespace {

template <int N>
Eigen::Matrix<cplx, N, N> random_hermitian(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::Matrix<cplx, N, N> a;
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) a(r, c) = cplx(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("Jacobi matches the reference solver on random Hermitian matrices") {
  std::mt19937_64 rng(1234);
  for (int seed = 0; seed < 200; ++seed) {
    const CMat9 h = random_hermitian<9>(rng, seed % 2 ? 1.0 : 3000.0);
    const auto ours = jacobi_eigen<9>(h);
    const Eigen::SelfAdjointEigenSolver<CMat9> ref(h);
    const double tol = 1e-12 * h.norm();
    CHECK((ours.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= tol);
    const CMat9 back = ours.vectors * ours.values.cast<cplx>().asDiagonal() * ours.vectors.adjoint();
    CHECK((back - h).cwiseAbs().maxCoeff() <= tol);
    CHECK((ours.vectors.adjoint() * ours.vectors - CMat9::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    for (int k = 1; k < 9; ++k) CHECK(ours.values(k - 1) <= ours.values(k));
  }
}

TEST_CASE("eigenvectors carry a real positive leading component") {
  std::mt19937_64 rng(5);
  const auto e = jacobi_eigen<9>(random_hermitian<9>(rng, 1.0));
  for (int k = 0; k < 9; ++k) {
    int lead = 0;
    for (int r = 1; r < 9; ++r)
      if (std::abs(e.vectors(r, k)) > std::abs(e.vectors(lead, k))) lead = r;
    CHECK(e.vectors(lead, k).imag() == 0.0);
    CHECK(e.vectors(lead, k).real() > 0.0);
  }
}

TEST_CASE("diagonal and degenerate inputs") {
  Eigen::Matrix<cplx, 3, 3> d = Eigen::Matrix<cplx, 3, 3>::Zero();
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  d(2, 2) = 2.0;
  const auto e = jacobi_eigen<3>(d);
  CHECK(e.sweeps == 0);
  CHECK(e.values(0) == -1.0);
  CHECK(e.values(1) == 2.0);
  CHECK(e.values(2) == 2.0);
  CHECK(std::abs(e.vectors(0, 1)) == 1.0);  // ties keep diagonal order
  const auto z = jacobi_eigen<3>(Eigen::Matrix<cplx, 3, 3>::Zero());
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sweep budget exhaustion raises NumericError with a dump") {
  std::mt19937_64 rng(9);
  const CMat9 h = random_hermitian<9>(rng, 1.0);
  try {
    jacobi_eigen<9>(h, 1);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("did not converge") != std::string::npos);
    CHECK(std::count(e.dump().begin(), e.dump().end(), '\n') == 9);
  }
}

TEST_CASE("repeated runs are bit-identical") {
  std::mt19937_64 rng(77);
  const CMat9 h = random_hermitian<9>(rng, 10.0);
  const auto a = jacobi_eigen<9>(h);
  const auto b = jacobi_eigen<9>(h);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}
