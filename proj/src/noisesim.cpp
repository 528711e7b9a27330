#include "vns/noisesim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace vns {

namespace {

constexpr Complex kI(0.0, 1.0);

// Index of the first layer equal to each layer, so identical layers share work.
std::vector<std::size_t> representatives(const CircuitSpec& c) {
  std::vector<std::size_t> rep(c.layers.size());
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    rep[i] = i;
    for (std::size_t j = 0; j < i; ++j)
      if (rep[j] == j && c.layers[j] == c.layers[i]) {
        rep[i] = j;
        break;
      }
  }
  return rep;
}

CMatrix matrix_power(const CMatrix& a, long long p) {
  CMatrix result = CMatrix::Identity(a.rows(), a.cols());
  CMatrix base = a;
  while (p > 0) {
    if (p & 1) result = base * result;
    p >>= 1;
    if (p) base = base * base;
  }
  return result;
}

// prod over the layer sequence (first layer rightmost). A periodic sequence is
// reduced to one period raised to a power.
CMatrix ordered_product(const std::vector<std::size_t>& rep, const std::map<std::size_t, CMatrix>& mats) {
  const std::size_t n = rep.size();
  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = rep[i] == rep[i % p];
    if (ok) {
      period = p;
      break;
    }
  }
  CMatrix block = mats.at(rep[0]);
  for (std::size_t i = 1; i < period; ++i) block = mats.at(rep[i]) * block;
  return matrix_power(block, static_cast<long long>(n / period));
}

void check_circuit(const CircuitSpec& c) { c.validate(); }

}  // namespace

// ---------------------------------------------------------------------------

void LayerSpec::validate(const Tolerances& tol) const {
  if (hamiltonian.rows() == 0 || hamiltonian.rows() != hamiltonian.cols())
    throw ValidationError("layer Hamiltonian must be square and nonempty");
  if (max_hermitian_deviation(hamiltonian) > tol.hermitian)
    throw ValidationError("layer Hamiltonian is not Hermitian");
  if (!(duration > 0.0)) throw ValidationError("layer duration must be positive");
  for (const auto& t : lindblad) {
    if (t.op.rows() != hamiltonian.rows() || t.op.cols() != hamiltonian.cols())
      throw ValidationError("jump operator dimension mismatch");
    if (max_hermitian_deviation(t.op) > tol.hermitian)
      throw ValidationError("jump operator is not Hermitian");
    if (!(t.rate >= 0.0)) throw ValidationError("Lindblad rate must be non-negative");
  }
}

LayerSpec LayerSpec::sliced(int slices) const {
  if (slices < 1) throw ValidationError("slices per layer must be positive");
  LayerSpec out = *this;
  out.duration = duration / slices;
  return out;
}

bool LayerSpec::operator==(const LayerSpec& other) const {
  if (duration != other.duration || lindblad.size() != other.lindblad.size()) return false;
  if (hamiltonian.rows() != other.hamiltonian.rows() || hamiltonian != other.hamiltonian) return false;
  for (std::size_t i = 0; i < lindblad.size(); ++i)
    if (lindblad[i].rate != other.lindblad[i].rate || lindblad[i].op != other.lindblad[i].op) return false;
  return true;
}

void CircuitSpec::validate(const Tolerances& tol) const {
  if (layers.empty()) throw ValidationError("circuit has no layers");
  if (dim <= 0) throw ValidationError("circuit dimension must be positive");
  for (const auto& l : layers) {
    if (l.dim() != dim) throw ValidationError("layer dimension differs from circuit dimension");
    l.validate(tol);
  }
}

CMatrix lindbladian(const LayerSpec& layer, double hamiltonian_sign) {
  const Eigen::Index n = layer.dim();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix& h = layer.hamiltonian;
  CMatrix gen = (-kI * hamiltonian_sign) * (kron(h, id) - kron(id, h.transpose()));
  for (const auto& t : layer.lindblad) {
    if (t.rate == 0.0) continue;
    const CMatrix ll = t.op.adjoint() * t.op;
    gen += t.rate * (kron(t.op, t.op.conjugate()) - 0.5 * (kron(ll, id) + kron(id, ll.transpose())));
  }
  return gen;
}

CMatrix expm(const CMatrix& a) { return a.exp(); }

Superoperator layer_channel(const LayerSpec& layer) {
  layer.validate();
  return Superoperator(layer.dim(), expm(layer.duration * lindbladian(layer, 1.0)), ChannelKind::NoisyLayer);
}

Superoperator pulse_inverse_channel(const LayerSpec& layer) {
  layer.validate();
  return Superoperator(layer.dim(), expm(layer.duration * lindbladian(layer, -1.0)), ChannelKind::NoisyLayer);
}

CMatrix layer_unitary(const LayerSpec& layer) {
  return expm((-kI * layer.duration) * layer.hamiltonian);
}

CircuitChannels circuit_channels(const CircuitSpec& c) {
  check_circuit(c);
  const auto rep = representatives(c);
  std::map<std::size_t, CMatrix> k_mats;
  CMatrix u = CMatrix::Identity(c.dim, c.dim);
  std::map<std::size_t, CMatrix> u_mats;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i] != i) continue;
    k_mats[i] = layer_channel(c.layers[i]).matrix();
    u_mats[i] = layer_unitary(c.layers[i]);
  }
  for (std::size_t i = 0; i < rep.size(); ++i) u = u_mats.at(rep[i]) * u;
  Superoperator k(c.dim, ordered_product(rep, k_mats), ChannelKind::NoisyLayer);
  Superoperator uc = unitary_superop(u);
  Superoperator n(c.dim, uc.matrix().adjoint() * k.matrix(), ChannelKind::NoiseChannel);
  return {std::move(k), std::move(uc), std::move(n)};
}

Superoperator amplified_channel(const CircuitSpec& c, int j, int slices_per_layer) {
  if (j < 0) throw ValidationError("amplification index must be non-negative");
  check_circuit(c);
  const auto rep = representatives(c);
  std::map<std::size_t, CMatrix> mats;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i] != i) continue;
    const LayerSpec slice = c.layers[i].sliced(slices_per_layer);
    const CMatrix k = layer_channel(slice).matrix();
    CMatrix m = k;
    if (j > 0) m = k * matrix_power(pulse_inverse_channel(slice).matrix() * k, j);
    mats[i] = matrix_power(m, slices_per_layer);
  }
  return Superoperator(c.dim, ordered_product(rep, mats), ChannelKind::NoisyLayer);
}

std::map<int, Superoperator> amplified_channel_set(const CircuitSpec& c, int m, int slices_per_layer) {
  std::map<int, Superoperator> out;
  for (int j = 0; j <= m; ++j) out.emplace(j, amplified_channel(c, j, slices_per_layer));
  return out;
}

std::vector<CVector> amplified_states(const CircuitSpec& c, const DensityVector& rho0, int m,
                                      int slices_per_layer) {
  check_circuit(c);
  if (rho0.hilbert_dim() != c.dim) throw ValidationError("state/circuit dimension mismatch");
  const auto rep = representatives(c);
  std::map<std::size_t, std::pair<CMatrix, CMatrix>> ch;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i] != i) continue;
    const LayerSpec slice = c.layers[i].sliced(slices_per_layer);
    ch[i] = {layer_channel(slice).matrix(), pulse_inverse_channel(slice).matrix()};
  }
  std::vector<CVector> out;
  for (int j = 0; j <= m; ++j) {
    CVector v = rho0.data();
    for (std::size_t l = 0; l < rep.size(); ++l) {
      const auto& [k, ki] = ch.at(rep[l]);
      for (int s = 0; s < slices_per_layer; ++s) {
        for (int r = 0; r < j; ++r) {
          CVector w = k * v;
          v.noalias() = ki * w;
        }
        CVector w = k * v;
        v = std::move(w);
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

Superoperator ideal_amplified(const Superoperator& u, const Superoperator& n_op, int alpha) {
  if (alpha < 1 || alpha % 2 == 0) throw ValidationError("amplification power must be a positive odd integer");
  if (u.hilbert_dim() != n_op.hilbert_dim()) throw ValidationError("superoperator dimension mismatch");
  CMatrix m = n_op.matrix();
  for (int i = 1; i < alpha; ++i) m = n_op.matrix() * m;
  return Superoperator(u.hilbert_dim(), u.matrix() * m, ChannelKind::Generic);
}

// ---------------------------------------------------------------------------

CMatrix pauli_on(char pauli, int qubit, int n_qubits) {
  if (qubit < 0 || qubit >= n_qubits) throw ValidationError("qubit index out of range");
  CMatrix p(2, 2);
  switch (pauli) {
    case 'x': p << 0, 1, 1, 0; break;
    case 'y': p << 0, -kI, kI, 0; break;
    case 'z': p << 1, 0, 0, -1; break;
    default: throw ValidationError(std::string("unknown Pauli '") + pauli + "'");
  }
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    const CMatrix f = q == qubit ? p : CMatrix::Identity(2, 2);
    out = kron(out, f);
  }
  return out;
}

DensityVector ground_state(Eigen::Index dim) {
  CVector psi = CVector::Zero(dim);
  psi(0) = 1.0;
  return DensityVector::pure(psi);
}

CircuitSpec trotter_ising_circuit(const TrotterIsingParams& p) {
  if (p.steps < 1 || !(p.zz_angle > 0.0) || !(p.x_angle > 0.0) || !(p.strong_rate >= 0.0) ||
      !(p.weak_rate >= 0.0))
    throw ValidationError("Trotter parameters must be positive");
  constexpr int nq = kTrotterQubits;
  const double f = p.half_angle ? 0.5 : 1.0;
  auto zz = [&](int a, int b) { return CMatrix(pauli_on('z', a, nq) * pauli_on('z', b, nq)); };

  auto dephasing = [&](double rate, const std::vector<int>& active) {
    std::vector<LindbladTerm> terms;
    for (int q = 0; q < nq; ++q) {
      const bool on = p.dephase_idle || std::find(active.begin(), active.end(), q) != active.end();
      if (on) terms.push_back({pauli_on('z', q, nq), rate});
    }
    return terms;
  };

  LayerSpec l1{f * p.zz_angle * (zz(0, 1) + zz(2, 3)), dephasing(p.strong_rate, {0, 1, 2, 3}), 1.0};
  CMatrix hx = CMatrix::Zero(16, 16);
  for (int q = 0; q < nq; ++q) hx += pauli_on('x', q, nq);
  LayerSpec l2{f * p.x_angle * hx, dephasing(p.weak_rate, {0, 1, 2, 3}), 1.0};
  LayerSpec l3{f * p.zz_angle * zz(1, 2), dephasing(p.strong_rate, {1, 2}), 1.0};

  CircuitSpec c;
  c.dim = 16;
  for (int s = 0; s < p.steps; ++s) {
    c.layers.push_back(l1);
    c.layers.push_back(l2);
    c.layers.push_back(l3);
  }
  return c;
}

std::vector<HermiticityPoint> hermiticity_scan(const CircuitSpec& c, const std::vector<int>& slicing) {
  if (slicing.empty()) throw ValidationError("slicing list is empty");
  check_circuit(c);
  const auto rep = representatives(c);
  std::vector<HermiticityPoint> out;
  for (int s : slicing) {
    if (s < 1) throw ValidationError("slices per layer must be positive");
    HermiticityPoint pt;
    pt.slices = s;
    std::map<std::size_t, double> per_layer;
    std::map<std::size_t, CMatrix> k_mats;
    CMatrix u = CMatrix::Identity(c.dim, c.dim);
    for (std::size_t i = 0; i < rep.size(); ++i) {
      if (rep[i] == i) {
        const LayerSpec slice = c.layers[i].sliced(s);
        const CMatrix k = layer_channel(slice).matrix();
        const CMatrix us = unitary_superop(layer_unitary(slice)).matrix();
        per_layer[i] = hermiticity_defect(CMatrix(us.adjoint() * k));
        k_mats[i] = matrix_power(k, s);
      }
      pt.defect += s * per_layer.at(rep[i]);
      u = layer_unitary(c.layers[i]) * u;
    }
    const CMatrix k = ordered_product(rep, k_mats);
    const CMatrix uc = unitary_superop(u).matrix();
    pt.circuit_defect = hermiticity_defect(CMatrix(uc.adjoint() * k));
    out.push_back(pt);
  }
  return out;
}

SampledValue sample_expectation(const ObservableOp& a, const DensityVector& rho, long long shots,
                                std::uint64_t seed) {
  if (shots < 1) throw ValidationError("shots must be positive");
  if (a.hilbert_dim() != rho.hilbert_dim()) throw ValidationError("observable/state dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  const CMatrix r = rho.matrix();
  const Eigen::Index n = a.hilbert_dim();
  std::vector<double> probs(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVector v = es.eigenvectors().col(i);
    const double p = (v.adjoint() * r * v)(0, 0).real();
    probs[static_cast<std::size_t>(i)] = p < 1e-14 ? 0.0 : p;
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<Eigen::Index> dist(probs.begin(), probs.end());
  double sum = 0.0, sum2 = 0.0;
  for (long long s = 0; s < shots; ++s) {
    const double x = es.eigenvalues()(dist(rng));
    sum += x;
    sum2 += x * x;
  }
  SampledValue out;
  const double nd = static_cast<double>(shots);
  out.estimate = sum / nd;
  if (shots > 1) {
    const double var = std::max(0.0, (sum2 - nd * out.estimate * out.estimate) / (nd - 1.0));
    out.error = std::sqrt(var / nd);
  }
  return out;
}

AmplifiedSeries simulate_series(const CircuitSpec& c, const DensityVector& rho0, const ObservableOp& a,
                                int m, long long shots, std::uint64_t seed, int slices_per_layer,
                                const std::string& observable_name) {
  if (m < 0) throw ValidationError("mitigation order must be non-negative");
  if (shots < 0) throw ValidationError("shots must be non-negative");
  const auto states = amplified_states(c, rho0, m, slices_per_layer);
  std::vector<SeriesEntry> entries;
  for (int k = 0; k <= m; ++k) {
    const DensityVector rho = DensityVector::from_vector(c.dim, states[static_cast<std::size_t>(k)]);
    SeriesEntry e;
    e.factor = 2 * k + 1;
    if (shots == 0) {
      e.value = expectation(a, rho);
    } else {
      const auto sv = sample_expectation(a, rho, shots, seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k));
      e.value = sv.estimate;
      e.error = sv.error;
      e.shots = shots;
    }
    entries.push_back(e);
  }
  return AmplifiedSeries(std::move(entries), observable_name);
}

}  // namespace vns
