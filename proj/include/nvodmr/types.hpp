#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace nvodmr {

using cplx = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

// Electron (S=1) x nucleus (I=1) product space.
inline constexpr int kSpinDim = 9;
using CMat9 = Eigen::Matrix<cplx, kSpinDim, kSpinDim>;
using CVec9 = Eigen::Matrix<cplx, kSpinDim, 1>;
using RVec9 = Eigen::Matrix<double, kSpinDim, 1>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wrap an angle into [0, 2*pi).
double wrap_angle(double rad);

}  // namespace nvodmr
