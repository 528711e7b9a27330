#pragma once

#include <complex>
#include <random>

#include "vns/liouville.hpp"

namespace testing {

using vns::CMatrix;
using vns::Complex;

inline CMatrix pauli(char p) {
  CMatrix m(2, 2);
  switch (p) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    default: m = CMatrix::Identity(2, 2);
  }
  return m;
}

// Tensor product of single-qubit factors, first factor most significant.
inline CMatrix tensor(std::initializer_list<CMatrix> factors) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& f : factors) out = vns::kron(out, f);
  return out;
}

// exp(-i theta P) for P with P^2 = I.
inline CMatrix pauli_rotation(const CMatrix& p, double theta) {
  return std::cos(theta) * CMatrix::Identity(p.rows(), p.cols()) - Complex(0, std::sin(theta)) * p;
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
