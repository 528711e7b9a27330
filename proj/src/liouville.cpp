#include "vns/liouville.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace vns {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

void check_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError(std::string(what) + ": matrix must be square and nonempty");
}

}  // namespace

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double smallest_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double max_hermitian_deviation(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CVector flat_identity(Eigen::Index n) { return vec(CMatrix::Identity(n, n)); }

// ---------------------------------------------------------------------------

DensityVector DensityVector::from_matrix(const CMatrix& rho, const Tolerances& tol) {
  check_square(rho, "density matrix");
  const double herm = max_hermitian_deviation(rho);
  if (herm > tol.hermitian)
    throw ValidationError("density matrix is not Hermitian (deviation " + fmt(herm) + ")");
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace)
    throw ValidationError("density matrix trace is " + fmt(tr.real()) + ", expected 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  if (lo < -tol.positivity)
    throw ValidationError("density matrix has negative eigenvalue " + fmt(lo));
  return DensityVector(rho.rows(), vec(rho));
}

DensityVector DensityVector::from_vector(Eigen::Index hilbert_dim, const CVector& data,
                                         const Tolerances& tol) {
  return from_matrix(unvec(data, hilbert_dim), tol);
}

DensityVector DensityVector::pure(const CVector& psi, const Tolerances& tol) {
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > tol.trace * 100)
    throw ValidationError("state vector is not normalized (norm " + fmt(nrm) + ")");
  const CMatrix rho = psi * psi.adjoint();
  return from_matrix(rho, tol);
}

DensityVector DensityVector::maximally_mixed(Eigen::Index hilbert_dim) {
  if (hilbert_dim <= 0) throw ValidationError("dimension must be positive");
  const CMatrix rho = CMatrix::Identity(hilbert_dim, hilbert_dim) / static_cast<double>(hilbert_dim);
  return DensityVector(hilbert_dim, vec(rho));
}

// ---------------------------------------------------------------------------

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::UnitaryChannel: return "unitary-channel";
    case ChannelKind::NoiseChannel: return "noise-channel";
    case ChannelKind::NoisyLayer: return "noisy-layer";
    case ChannelKind::Mitigated: return "mitigated";
    case ChannelKind::Generic: return "generic";
  }
  return "generic";
}

Superoperator::Superoperator(Eigen::Index hilbert_dim, CMatrix data, ChannelKind kind,
                             const Tolerances& tol)
    : dim_(hilbert_dim), data_(std::move(data)), kind_(kind) {
  if (dim_ <= 0) throw ValidationError("superoperator: dimension must be positive");
  if (data_.rows() != dim_ * dim_ || data_.cols() != dim_ * dim_)
    throw ValidationError("superoperator: matrix must be n^2 x n^2");
  if (kind_ == ChannelKind::UnitaryChannel) {
    const double dev =
        (data_.adjoint() * data_ - CMatrix::Identity(data_.rows(), data_.cols())).cwiseAbs().maxCoeff();
    if (dev > tol.unitary)
      throw ValidationError("unitary channel columns are not orthonormal (deviation " + fmt(dev) + ")");
  } else if (kind_ == ChannelKind::NoiseChannel || kind_ == ChannelKind::NoisyLayer) {
    const double dev = trace_preservation_defect();
    if (dev > tol.trace_preserving)
      throw ValidationError(std::string(to_string(kind_)) + " is not trace-preserving (defect " +
                            fmt(dev) + ")");
  }
}

Superoperator Superoperator::identity(Eigen::Index hilbert_dim) {
  const Eigen::Index d = hilbert_dim * hilbert_dim;
  return Superoperator(hilbert_dim, CMatrix::Identity(d, d), ChannelKind::UnitaryChannel);
}

Superoperator Superoperator::retagged(ChannelKind kind, const Tolerances& tol) const {
  return Superoperator(dim_, data_, kind, tol);
}

Superoperator Superoperator::adjoint() const {
  // The adjoint of a unitary channel is its inverse; of a TP map, unital.
  const ChannelKind k = kind_ == ChannelKind::UnitaryChannel ? kind_ : ChannelKind::Generic;
  return Superoperator(dim_, data_.adjoint(), k);
}

double Superoperator::trace_preservation_defect() const {
  const CVector id = flat_identity(dim_);
  // <<I| S as a row: conj(id)^T S; id is real so the conjugate is itself.
  const CVector row = data_.transpose() * id;
  return (row - id).cwiseAbs().maxCoeff();
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
  if (a.hilbert_dim() != b.hilbert_dim()) throw ValidationError("superoperator dimension mismatch");
  ChannelKind k = ChannelKind::Generic;
  if (a.kind() == ChannelKind::UnitaryChannel && b.kind() == ChannelKind::UnitaryChannel)
    k = ChannelKind::UnitaryChannel;
  // Products of TP maps stay TP; validation tolerance is loose enough for long chains.
  return Superoperator(a.hilbert_dim(), a.matrix() * b.matrix(), k);
}

Superoperator power(const Superoperator& a, int p) {
  if (p < 0) throw ValidationError("power: negative exponent");
  CMatrix result = CMatrix::Identity(a.matrix().rows(), a.matrix().cols());
  CMatrix base = a.matrix();
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return Superoperator(a.hilbert_dim(), std::move(result), ChannelKind::Generic);
}

DensityVector apply(const Superoperator& s, const DensityVector& rho, const Tolerances& tol) {
  if (s.hilbert_dim() != rho.hilbert_dim()) throw ValidationError("state/channel dimension mismatch");
  return DensityVector::from_vector(rho.hilbert_dim(), s.apply(rho.data()), tol);
}

// ---------------------------------------------------------------------------

ObservableOp::ObservableOp(CMatrix a, const Tolerances& tol) : a_(std::move(a)) {
  check_square(a_, "observable");
  const double herm = max_hermitian_deviation(a_);
  if (herm > tol.hermitian)
    throw ValidationError("observable is not Hermitian (deviation " + fmt(herm) + ")");
  const Eigen::Index n = a_.rows();
  traceless_ = a_ - (a_.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
  hs_norm_ = std::sqrt(std::max(0.0, (traceless_ * traceless_).trace().real()));
}

// ---------------------------------------------------------------------------

Superoperator unitary_superop(const CMatrix& u, const Tolerances& tol) {
  check_square(u, "unitary");
  const double dev = (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
  if (dev > tol.unitary)
    throw ValidationError("matrix is not unitary (deviation norm " + fmt(dev) + ")");
  return Superoperator(u.rows(), kron(u, u.conjugate()), ChannelKind::UnitaryChannel, tol);
}

Complex expectation_raw(const CMatrix& a, const CVector& v) {
  const Eigen::Index n = a.rows();
  if (v.size() != n * n) throw ValidationError("observable/state dimension mismatch");
  // tr(A rho) = sum_ij A(j,i) rho(i,j)
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) acc += a(j, i) * v(i * n + j);
  return acc;
}

double expectation(const ObservableOp& a, const DensityVector& rho, const Tolerances& tol) {
  if (a.hilbert_dim() != rho.hilbert_dim()) throw ValidationError("observable/state dimension mismatch");
  const Complex e = expectation_raw(a.matrix(), rho.data());
  if (std::abs(e.imag()) > tol.imaginary_residue)
    throw NumericalError("expectation value has imaginary part " + fmt(e.imag()));
  return e.real();
}

double hermiticity_defect(const CMatrix& s) {
  if (s.rows() != s.cols()) throw ValidationError("hermiticity_defect: matrix must be square");
  return operator_norm(0.5 * (s - s.adjoint()));
}

double hermiticity_defect(const Superoperator& s) { return hermiticity_defect(s.matrix()); }

NoiseSpectrum noise_spectrum(const Superoperator& n_op, double tolerance, const Tolerances& tol) {
  NoiseSpectrum out;
  out.hermiticity_defect = hermiticity_defect(n_op);
  if (out.hermiticity_defect > tolerance) throw NonHermitianNoise(out.hermiticity_defect, tolerance);

  const CMatrix h = 0.5 * (n_op.matrix() + n_op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("noise spectrum: eigensolver failed");
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    double& v = out.eigenvalues(i);
    if (v > 1.0 && v <= 1.0 + tol.spectrum_clamp) v = 1.0;
    if (v > 1.0 + tol.spectrum_clamp || v <= 0.0) out.out_of_range = true;
  }
  out.s_min = out.eigenvalues(0);
  return out;
}

double observable_error_bound(const ObservableOp& a, const DensityVector& rho0, double infidelity) {
  if (infidelity < 0.0) throw ValidationError("infidelity must be non-negative");
  if (a.hilbert_dim() != rho0.hilbert_dim()) throw ValidationError("observable/state dimension mismatch");
  return infidelity * a.hs_norm() * std::sqrt(rho0.purity());
}

}  // namespace vns
