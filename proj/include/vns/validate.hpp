#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vns/liouville.hpp"
#include "vns/noisesim.hpp"

namespace vns {

CMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng);
/// Haar-like unitary from the QR of a complex Gaussian matrix.
CMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng);
/// Full-rank random density matrix W W^dag / tr.
DensityVector random_density(Eigen::Index n, std::mt19937_64& rng);

/// Mitigation layer = noise-only sublayer (H = 0, Hermitian jumps) then a noiseless unitary.
struct NoisyUnitaryLayer {
  LayerSpec noise;
  LayerSpec gate;
};

/// Random benign layer pair on dimension n whose combined noise has s_min >= min_smin.
std::pair<NoisyUnitaryLayer, NoisyUnitaryLayer> random_two_layer_instance(Eigen::Index n, std::mt19937_64& rng,
                                                                          double min_smin = 0.5);

struct TwoLayerCheck {
  double circuit_smin = 0.0;
  double smin_product = 0.0;
  double distance = 0.0;        ///< ||U - K_mit||_op for the composed circuit
  double mitigated_bound = 0.0; ///< I_A + I_B + I_A I_B
  double observable_error = 0.0;
  double observable_bound = 0.0;
};

/// Taylor order-m mitigation of each layer, composed, compared with the ideal circuit.
TwoLayerCheck check_two_layer(const NoisyUnitaryLayer& a, const NoisyUnitaryLayer& b, int m,
                              std::mt19937_64& rng);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the library's property battery (fast, deterministic in `seed`).
std::vector<CheckResult> run_property_battery(std::uint64_t seed = 20240601);

}  // namespace vns
