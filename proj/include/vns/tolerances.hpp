#pragma once

namespace vns {

/// Numerical tolerances used for validation throughout the library.
///
/// Every check that accepts a floating-point deviation reads its threshold
/// from one of these fields; functions take a `Tolerances` argument that
/// defaults to `default_tolerances`.
struct Tolerances {
  double hermitian = 1e-12;          ///< max |M - M^dagger| entry for observables / density matrices
  double trace = 1e-12;              ///< |tr rho - 1|
  double positivity = 1e-10;         ///< smallest allowed density-matrix eigenvalue is -positivity
  double unitary = 1e-10;            ///< |u^dagger u - I| and unitary-channel column orthonormality
  double trace_preserving = 1e-9;    ///< |<<I| S - <<I|| for CPTP superoperators
  double spectrum_clamp = 1e-8;      ///< noise eigenvalues within this of 1 are clamped to 1
  double imaginary_residue = 1e-8;   ///< allowed imaginary part of an expectation value
};

inline constexpr Tolerances default_tolerances{};

}  // namespace vns
