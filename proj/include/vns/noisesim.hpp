#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "vns/liouville.hpp"
#include "vns/series.hpp"

namespace vns {

struct LindbladTerm {
  CMatrix op;  ///< Hermitian jump operator
  double rate = 0.0;
};

/// One layer: generator held constant for `duration`.
struct LayerSpec {
  CMatrix hamiltonian;  ///< angular frequency
  std::vector<LindbladTerm> lindblad;
  double duration = 1.0;

  Eigen::Index dim() const noexcept { return hamiltonian.rows(); }
  /// Throws ValidationError when an invariant is broken.
  void validate(const Tolerances& tol = default_tolerances) const;
  /// Same generator over duration / slices.
  LayerSpec sliced(int slices) const;
  bool operator==(const LayerSpec& other) const;
};

struct CircuitSpec {
  Eigen::Index dim = 0;
  std::vector<LayerSpec> layers;  ///< layers[0] acts first

  void validate(const Tolerances& tol = default_tolerances) const;
};

/// sign * L_H + L_D with L_H = -i (H kron I - I kron H^T),
/// L_D = sum rate (L kron L* - 1/2 (L^dag L kron I + I kron (L^dag L)^T)).
CMatrix lindbladian(const LayerSpec& layer, double hamiltonian_sign = 1.0);

/// Dense matrix exponential (scaling and squaring, Pade).
CMatrix expm(const CMatrix& a);

/// exp(tau (L_H + L_D)), kind noisy-layer.
Superoperator layer_channel(const LayerSpec& layer);

/// exp(tau (-L_H + L_D)): reversed pulse under the same noise.
Superoperator pulse_inverse_channel(const LayerSpec& layer);

/// exp(-i H tau), from the Hilbert-space exponential.
CMatrix layer_unitary(const LayerSpec& layer);

struct CircuitChannels {
  Superoperator k;  ///< noisy circuit
  Superoperator u;  ///< ideal circuit
  Superoperator n;  ///< U^dag K, kind noise-channel
};

CircuitChannels circuit_channels(const CircuitSpec& c);

/// prod_l (K_s (K_s^I K_s)^j)^S with each layer cut into S slices K_s.
Superoperator amplified_channel(const CircuitSpec& c, int j, int slices_per_layer = 1);

/// Amplified channels for j = 0..m.
std::map<int, Superoperator> amplified_channel_set(const CircuitSpec& c, int m, int slices_per_layer = 1);

/// Propagates a state through the amplified circuit for j = 0..m without forming channels.
std::vector<CVector> amplified_states(const CircuitSpec& c, const DensityVector& rho0, int m,
                                      int slices_per_layer = 1);

/// U N^alpha for odd alpha.
Superoperator ideal_amplified(const Superoperator& u, const Superoperator& n_op, int alpha);

struct TrotterIsingParams {
  int steps = 20;
  double zz_angle = 1.0 / 30.0;
  double x_angle = 1.0 / 15.0;
  double strong_rate = 1.0 / 200.0;
  double weak_rate = 1.0 / 2000.0;
  /// false: R(theta) = exp(-i theta P); true: exp(-i theta P / 2).
  bool half_angle = false;
  /// Dephase all four qubits in every layer (false: only the qubits a layer acts on).
  bool dephase_idle = true;
};

constexpr int kTrotterQubits = 4;

/// Four-qubit Ising Trotter circuit, three layers per step: ZZ on (0,1),(2,3);
/// X on all qubits; ZZ on (1,2). Unit layer duration, sigma_z dephasing.
CircuitSpec trotter_ising_circuit(const TrotterIsingParams& p = {});

/// Pauli P (one of 'x', 'y', 'z') on `qubit` of an n-qubit register; qubit 0 is the
/// most significant tensor factor.
CMatrix pauli_on(char pauli, int qubit, int n_qubits);

/// Basis state |0...0> of dimension dim.
DensityVector ground_state(Eigen::Index dim);

struct HermiticityPoint {
  int slices = 1;
  double defect = 0.0;          ///< sum over layers and slices of the per-slice noise defect
  double circuit_defect = 0.0;  ///< hermiticity_defect(U^dag K) of the whole circuit
};

/// For each slicing S the per-slice effective noise N_s = U_s^dag K_s is formed for every
/// layer and its Hermiticity defect accumulated over the S L slices of the j = 0 pipeline.
std::vector<HermiticityPoint> hermiticity_scan(const CircuitSpec& c, const std::vector<int>& slicing);

struct SampledValue {
  double estimate = 0.0;
  double error = 0.0;
};

/// Draws `shots` eigenvalue outcomes of A in state rho (mt19937_64 seeded with `seed`).
SampledValue sample_expectation(const ObservableOp& a, const DensityVector& rho, long long shots,
                                std::uint64_t seed);

/// Exact (shots = 0) or sampled amplified series for an observable, factors 1..2m+1.
AmplifiedSeries simulate_series(const CircuitSpec& c, const DensityVector& rho0, const ObservableOp& a,
                                int m, long long shots, std::uint64_t seed, int slices_per_layer = 1,
                                const std::string& observable_name = {});

}  // namespace vns
