#pragma once

#include "nvodmr/constants.hpp"
#include "nvodmr/errors.hpp"
#include "nvodmr/field_vector.hpp"
#include "nvodmr/types.hpp"

namespace nvodmr {

/// Spin-1 matrices in the |+1>, |0>, |-1> basis. The 14N nucleus (I=1)
/// uses the same matrices.
struct SpinOperators {
  CMat3 sx, sy, sz;
  CMat3 ix, iy, iz;

  static const SpinOperators& spin_one();
};

// Row/column of |m_s, m_I> in the 9-dim product basis, m_s and m_I in {+1,0,-1}.
constexpr int basis_index(int ms, int mi) { return 3 * (1 - ms) + (1 - mi); }

// A (x) B for 3x3 operands.
CMat9 kron(const CMat3& a, const CMat3& b);

/// Electronic ground-state Hamiltonian in the NV frame, MHz.
/// Appends a warning to `warnings` (if given) when |B| exceeds the
/// low-field limit. Throws InvalidInput on non-finite fields.
CMat3 build_electronic(const FieldVector& b_frame, const FieldVector& e_frame,
                       const PhysicalConstants& constants, Warnings* warnings = nullptr);

struct SpinSystem {
  CMat9 h;
  FieldVector b_frame;
  FieldVector e_frame;
  PhysicalConstants constants;
  Warnings warnings;
};

/// Electronic + hyperfine + quadrupole + nuclear Zeeman Hamiltonian.
SpinSystem build_total(const FieldVector& b_frame, const FieldVector& e_frame,
                       const PhysicalConstants& constants = {});

struct EigenSystem {
  RVec9 frequencies;  // MHz, ascending
  CMat9 vectors;      // column k belongs to frequencies(k)
};

// Throws NumericError if the eigensolver exceeds its sweep budget.
EigenSystem diagonalize(const CMat9& h);
EigenSystem diagonalize(const SpinSystem& system);

}  // namespace nvodmr
