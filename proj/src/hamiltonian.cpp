#include "nvodmr/hamiltonian.hpp"

#include "nvodmr/hermitian_eigen.hpp"

#include <cmath>
#include <string>

namespace nvodmr {

namespace {

SpinOperators make_spin_one() {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  SpinOperators ops;
  ops.sx << 0, r, 0,
            r, 0, r,
            0, r, 0;
  ops.sy << 0, -i * r, 0,
            i * r, 0, -i * r,
            0, i * r, 0;
  ops.sz << 1, 0, 0,
            0, 0, 0,
            0, 0, -1;
  ops.ix = ops.sx;
  ops.iy = ops.sy;
  ops.iz = ops.sz;
  return ops;
}

void check_finite(const FieldVector& v, const char* name) {
  if (!v.is_finite()) throw InvalidInput(std::string(name) + " has non-finite components");
}

}  // namespace

const SpinOperators& SpinOperators::spin_one() {
  static const SpinOperators ops = make_spin_one();
  return ops;
}

CMat9 kron(const CMat3& a, const CMat3& b) {
  CMat9 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.block<3, 3>(3 * r, 3 * c) = a(r, c) * b;
  return out;
}

CMat3 build_electronic(const FieldVector& b_frame, const FieldVector& e_frame,
                       const PhysicalConstants& k, Warnings* warnings) {
  check_finite(b_frame, "magnetic field");
  check_finite(e_frame, "electric field");
  if (warnings && b_frame.magnitude() > kLowFieldLimitGauss) {
    warnings->push_back("|B| = " + std::to_string(b_frame.magnitude()) +
                        " G exceeds the low-field regime (B < 100 G); transition strength no "
                        "longer tracks ODMR contrast");
  }
  const auto& op = SpinOperators::spin_one();
  const CMat3 id = CMat3::Identity();
  const CMat3 sz2 = op.sz * op.sz - (2.0 / 3.0) * id;
  const CMat3 xx_yy = op.sx * op.sx - op.sy * op.sy;
  const CMat3 xy_yx = op.sx * op.sy + op.sy * op.sx;
  const Vec3& b = b_frame.vec();
  const Vec3& e = e_frame.vec();

  CMat3 h = (k.d_gs + k.d_par * e.z()) * sz2;
  h += k.gamma_nv * (b.x() * op.sx + b.y() * op.sy + b.z() * op.sz);
  h -= (k.d_perp * e.x()) * xx_yy;
  h += (k.d_perp * e.y()) * xy_yx;
  return h;
}

SpinSystem build_total(const FieldVector& b_frame, const FieldVector& e_frame,
                       const PhysicalConstants& k) {
  k.validate();
  SpinSystem sys;
  sys.b_frame = b_frame;
  sys.e_frame = e_frame;
  sys.constants = k;
  const CMat3 h_el = build_electronic(b_frame, e_frame, k, &sys.warnings);

  const auto& op = SpinOperators::spin_one();
  const CMat3 id = CMat3::Identity();
  const Vec3& b = b_frame.vec();
  CMat3 h_nuc_local = k.quadrupole * (op.iz * op.iz - (2.0 / 3.0) * id);
  h_nuc_local += k.gamma_n * (b.x() * op.ix + b.y() * op.iy + b.z() * op.iz);

  sys.h = kron(h_el, id) + kron(id, h_nuc_local);
  sys.h += k.a_par * kron(op.sz, op.iz);
  sys.h += k.a_perp * (kron(op.sx, op.ix) + kron(op.sy, op.iy));
  return sys;
}

EigenSystem diagonalize(const CMat9& h) {
  const auto res = jacobi_eigen<kSpinDim>(h);
  return EigenSystem{res.values, res.vectors};
}

EigenSystem diagonalize(const SpinSystem& system) { return diagonalize(system.h); }

}  // namespace nvodmr
