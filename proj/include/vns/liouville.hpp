#pragma once

// Liouville-space conventions.
//
// A density matrix rho (n x n) is flattened row-major:
//     vec(rho)[i * n + j] = rho(i, j).
// With this ordering vec(A M B) = (A kron B^T) vec(M), so the channel
// rho -> u rho u^dagger is the n^2 x n^2 matrix u kron conj(u), and the
// commutator generator is -i (H kron I - I kron H^T). This is the only
// place the convention is fixed; everything else goes through vec/unvec.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "vns/errors.hpp"
#include "vns/tolerances.hpp"

namespace vns {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Row-major flattening of a square matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec(
    const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index n = m.rows();
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n * m.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i * m.cols() + j) = m(i, j);
  return out;
}

/// Inverse of vec for an n x n matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> unvec(
    const Eigen::MatrixBase<Derived>& v, Eigen::Index n) {
  if (v.size() != n * n) throw ValidationError("unvec: length is not n^2");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = v(i * n + j);
  return out;
}

/// Kronecker product of two dense matrices.
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Largest singular value.
double operator_norm(const CMatrix& m);

/// Max elementwise |m - m^dagger|.
double max_hermitian_deviation(const CMatrix& m);

/// The flattened identity matrix <<I| used for trace checks.
CVector flat_identity(Eigen::Index n);

// ---------------------------------------------------------------------------

/// A valid density matrix stored as a Liouville vector.
class DensityVector {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  static DensityVector from_matrix(const CMatrix& rho, const Tolerances& tol = default_tolerances);
  static DensityVector from_vector(Eigen::Index hilbert_dim, const CVector& data,
                                   const Tolerances& tol = default_tolerances);
  /// |psi><psi| for a normalized state vector.
  static DensityVector pure(const CVector& psi, const Tolerances& tol = default_tolerances);
  static DensityVector maximally_mixed(Eigen::Index hilbert_dim);

  Eigen::Index hilbert_dim() const noexcept { return dim_; }
  const CVector& data() const noexcept { return data_; }
  CMatrix matrix() const { return unvec(data_, dim_); }
  /// tr(rho^2)
  double purity() const { return data_.squaredNorm(); }

 private:
  DensityVector(Eigen::Index dim, CVector data) : dim_(dim), data_(std::move(data)) {}

  Eigen::Index dim_;
  CVector data_;
};

enum class ChannelKind { UnitaryChannel, NoiseChannel, NoisyLayer, Mitigated, Generic };

const char* to_string(ChannelKind kind);

/// An n^2 x n^2 linear map on Liouville space tagged with what it represents.
///
/// Construction validates the invariant of the tag: unitary channels must be
/// unitary matrices; noise channels and noisy layers must preserve trace.
class Superoperator {
 public:
  Superoperator(Eigen::Index hilbert_dim, CMatrix data, ChannelKind kind = ChannelKind::Generic,
                const Tolerances& tol = default_tolerances);

  static Superoperator identity(Eigen::Index hilbert_dim);

  Eigen::Index hilbert_dim() const noexcept { return dim_; }
  const CMatrix& matrix() const noexcept { return data_; }
  ChannelKind kind() const noexcept { return kind_; }

  /// Same matrix with a different tag, re-validated.
  Superoperator retagged(ChannelKind kind, const Tolerances& tol = default_tolerances) const;
  Superoperator adjoint() const;

  /// |<<I| S - <<I||_inf
  double trace_preservation_defect() const;

  CVector apply(const CVector& v) const { return data_ * v; }

 private:
  Eigen::Index dim_;
  CMatrix data_;
  ChannelKind kind_;
};

/// Composition a * b: b acts first.
Superoperator operator*(const Superoperator& a, const Superoperator& b);

/// a^p for p >= 0 by repeated squaring.
Superoperator power(const Superoperator& a, int p);

/// Applies a channel to a state; the result is validated as a density vector.
DensityVector apply(const Superoperator& s, const DensityVector& rho,
                    const Tolerances& tol = default_tolerances);

/// Hermitian observable with its traceless part precomputed.
class ObservableOp {
 public:
  explicit ObservableOp(CMatrix a, const Tolerances& tol = default_tolerances);

  Eigen::Index hilbert_dim() const noexcept { return a_.rows(); }
  const CMatrix& matrix() const noexcept { return a_; }
  const CMatrix& traceless() const noexcept { return traceless_; }
  /// sqrt(tr(traceless^2))
  double hs_norm() const noexcept { return hs_norm_; }

 private:
  CMatrix a_;
  CMatrix traceless_;
  double hs_norm_;
};

struct NoiseSpectrum {
  RVector eigenvalues;   ///< ascending
  CMatrix eigenvectors;  ///< columns, orthonormal
  double s_min = 0.0;
  double hermiticity_defect = 0.0;  ///< of the input before projection
  bool out_of_range = false;        ///< some eigenvalue outside (0, 1 + clamp]
};

// ---------------------------------------------------------------------------

/// u kron conj(u); throws ValidationError when u is not unitary.
Superoperator unitary_superop(const CMatrix& u, const Tolerances& tol = default_tolerances);

/// tr(A rho); throws NumericalError when the imaginary part exceeds tolerance.
double expectation(const ObservableOp& a, const DensityVector& rho,
                   const Tolerances& tol = default_tolerances);

/// tr(A mat(v)) for an arbitrary Liouville vector (no state validation).
Complex expectation_raw(const CMatrix& a, const CVector& v);

/// Operator norm of the anti-Hermitian part (S - S^dagger) / 2.
double hermiticity_defect(const Superoperator& s);
double hermiticity_defect(const CMatrix& s);

/// Spectral decomposition of the Hermitian part of a noise superoperator.
/// Throws NonHermitianNoise when hermiticity_defect(n_op) > tolerance.
NoiseSpectrum noise_spectrum(const Superoperator& n_op, double tolerance,
                             const Tolerances& tol = default_tolerances);

/// infidelity * sqrt(tr A_bar^2) * sqrt(tr rho0^2)
double observable_error_bound(const ObservableOp& a, const DensityVector& rho0, double infidelity);

/// Smallest singular value of a superoperator.
double smallest_singular_value(const CMatrix& m);

}  // namespace vns
