#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "vns/noisesim.hpp"
#include "vns/validate.hpp"

using namespace vns;
using testing::max_abs;
using testing::pauli;
using testing::pauli_rotation;
using testing::tensor;

namespace {

LayerSpec random_layer(Eigen::Index n, std::mt19937_64& rng, double rate, double tau = 1.0) {
  LayerSpec l;
  const CMatrix h = random_hermitian(n, rng);
  l.hamiltonian = h / operator_norm(h);
  for (int t = 0; t < 2; ++t) {
    const CMatrix op = random_hermitian(n, rng);
    l.lindblad.push_back({op / operator_norm(op), rate});
  }
  l.duration = tau;
  return l;
}

LayerSpec noiseless(LayerSpec l) {
  l.lindblad.clear();
  return l;
}

// exp(-i H tau) through the eigendecomposition of H.
CMatrix unitary_oracle(const CMatrix& h, double tau) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases(i) = std::exp(Complex(0, -tau * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_SUITE("noisesim") {
  TEST_CASE("noiseless layer is the unitary channel of exp(-i H tau)") {
    std::mt19937_64 rng(11);
    const LayerSpec l = noiseless(random_layer(3, rng, 0.0, 0.7));
    const Superoperator k = layer_channel(l);
    CHECK(max_abs(k.matrix() - unitary_superop(unitary_oracle(l.hamiltonian, 0.7)).matrix()) < 1e-12);
    CHECK(max_abs(layer_unitary(l) - unitary_oracle(l.hamiltonian, 0.7)) < 1e-12);
  }

  TEST_CASE("pure dephasing matches the closed form") {
    LayerSpec l;
    l.hamiltonian = CMatrix::Zero(2, 2);
    l.lindblad.push_back({pauli('z'), 0.03});
    l.duration = 1.5;
    const CMatrix k = layer_channel(l).matrix();
    CMatrix expected = CMatrix::Identity(4, 4);
    expected(1, 1) = expected(2, 2) = std::exp(-2.0 * 0.03 * 1.5);
    CHECK(max_abs(k - expected) < 1e-13);
  }

  TEST_CASE("every layer channel preserves trace") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
      const LayerSpec l = random_layer(3, rng, 0.05);
      CHECK(layer_channel(l).trace_preservation_defect() < 1e-10);
      CHECK(pulse_inverse_channel(l).trace_preservation_defect() < 1e-10);
    }
  }

  TEST_CASE("expm agrees with the eigendecomposition for normal generators") {
    std::mt19937_64 rng(13);
    LayerSpec l = noiseless(random_layer(3, rng, 0.0));
    const CMatrix gen = lindbladian(l);  // anti-Hermitian, hence normal
    Eigen::ComplexEigenSolver<CMatrix> es(gen);
    const CMatrix v = es.eigenvectors();
    const CVector d = es.eigenvalues().array().exp();
    CHECK(max_abs(expm(gen) - v * d.asDiagonal() * v.inverse()) < 1e-10);

    LayerSpec deph;
    deph.hamiltonian = CMatrix::Zero(2, 2);
    deph.lindblad.push_back({pauli('x'), 0.2});
    const CMatrix g2 = lindbladian(deph);  // Hermitian dissipator
    Eigen::SelfAdjointEigenSolver<CMatrix> hs(g2);
    const CMatrix e2 = hs.eigenvectors() * hs.eigenvalues().array().exp().matrix().cast<Complex>().asDiagonal() *
                       hs.eigenvectors().adjoint();
    CHECK(max_abs(expm(g2) - e2) < 1e-12);
  }

  TEST_CASE("noiseless pulse inverse undoes the layer") {
    std::mt19937_64 rng(14);
    const LayerSpec l = noiseless(random_layer(3, rng, 0.0));
    const CMatrix p = pulse_inverse_channel(l).matrix() * layer_channel(l).matrix();
    CHECK(max_abs(p - CMatrix::Identity(9, 9)) < 1e-10);
  }

  TEST_CASE("K_I K is Hermitian up to third order in the layer duration") {
    std::mt19937_64 rng(15);
    const LayerSpec base = random_layer(2, rng, 0.05);
    auto defect = [&](double tau) {
      LayerSpec l = base;
      l.duration = tau;
      return hermiticity_defect(CMatrix(pulse_inverse_channel(l).matrix() * layer_channel(l).matrix()));
    };
    const double ratio = defect(0.2) / defect(0.1);
    CHECK(ratio == doctest::Approx(8.0).epsilon(0.1));
  }

  TEST_CASE("circuit channels: noiseless N is the identity, U = I gives N = K") {
    std::mt19937_64 rng(16);
    CircuitSpec c;
    c.dim = 2;
    c.layers = {noiseless(random_layer(2, rng, 0.0)), noiseless(random_layer(2, rng, 0.0))};
    CHECK(max_abs(circuit_channels(c).n.matrix() - CMatrix::Identity(4, 4)) < 1e-10);

    LayerSpec deph;
    deph.hamiltonian = CMatrix::Zero(2, 2);
    deph.lindblad.push_back({pauli('z'), 0.04});
    CircuitSpec d;
    d.dim = 2;
    d.layers = {deph};
    CHECK(max_abs(circuit_channels(d).n.matrix() - layer_channel(deph).matrix()) < 1e-14);
  }

  TEST_CASE("layers act right to left") {
    std::mt19937_64 rng(17);
    const LayerSpec a = random_layer(2, rng, 0.02), b = random_layer(2, rng, 0.03);
    CircuitSpec c;
    c.dim = 2;
    c.layers = {a, b};
    const CircuitChannels ch = circuit_channels(c);
    CHECK(max_abs(ch.k.matrix() - layer_channel(b).matrix() * layer_channel(a).matrix()) < 1e-13);
    CHECK(max_abs(ch.u.matrix() - unitary_superop(layer_unitary(b) * layer_unitary(a)).matrix()) < 1e-12);
    CHECK(max_abs(ch.u.matrix() * ch.n.matrix() - ch.k.matrix()) < 1e-12);
  }

  TEST_CASE("amplified channels: j = 0 is K, noiseless gives U, states agree with channels") {
    std::mt19937_64 rng(18);
    CircuitSpec c;
    c.dim = 2;
    c.layers = {random_layer(2, rng, 0.02), random_layer(2, rng, 0.02), random_layer(2, rng, 0.02)};
    CHECK(max_abs(amplified_channel(c, 0).matrix() - circuit_channels(c).k.matrix()) == 0.0);

    const auto set = amplified_channel_set(c, 2, 2);
    const DensityVector rho = random_density(2, rng);
    const auto states = amplified_states(c, rho, 2, 2);
    for (int j = 0; j <= 2; ++j) {
      CHECK(set.at(j).trace_preservation_defect() < 1e-9);
      CHECK((set.at(j).matrix() * rho.data() - states[static_cast<std::size_t>(j)]).norm() < 1e-12);
    }

    CircuitSpec clean = c;
    for (auto& l : clean.layers) l.lindblad.clear();
    const CMatrix u = circuit_channels(clean).u.matrix();
    for (int j = 0; j <= 3; ++j)
      for (int s : {1, 3}) CHECK(max_abs(amplified_channel(clean, j, s).matrix() - u) < 1e-10);
  }

  TEST_CASE("slicing converges to the per-layer amplified generator as 1/S^2") {
    // A single layer amplified with j = 1 tends to exp(tau (L_H + 3 L_D)) as slices grow.
    std::mt19937_64 rng(19);
    const LayerSpec l = random_layer(2, rng, 0.05);
    CircuitSpec c;
    c.dim = 2;
    c.layers = {l};
    const CMatrix limit = expm(l.duration * (lindbladian(noiseless(l)) + 3.0 * (lindbladian(l) - lindbladian(noiseless(l)))));
    double prev = 1e300, first = 0.0, last = 0.0;
    for (int s : {1, 2, 4, 8}) {
      const double d = operator_norm(amplified_channel(c, 1, s).matrix() - limit);
      CHECK(d < prev);
      if (s == 1) first = d;
      last = d;
      prev = d;
    }
    CHECK(first / last > 32.0);
  }

  TEST_CASE("ideal_amplified") {
    std::mt19937_64 rng(20);
    const CMatrix u = random_unitary(2, rng);
    const CMatrix h = random_hermitian(4, rng);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    // Hermitian N with spectrum in (0.8, 1].
    RVector s(4);
    s << 0.8, 0.85, 0.9, 1.0;
    const CMatrix n = es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    const Superoperator uop = unitary_superop(u);
    const Superoperator nop(2, n, ChannelKind::Generic);
    CHECK(max_abs(ideal_amplified(uop, nop, 1).matrix() - uop.matrix() * n) < 1e-14);
    const CMatrix n3 = uop.matrix().adjoint() * ideal_amplified(uop, nop, 3).matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es3(0.5 * (n3 + n3.adjoint()));
    for (int i = 0; i < 4; ++i) CHECK(es3.eigenvalues()(i) == doctest::Approx(std::pow(s(i), 3)).epsilon(1e-10));
    CHECK_THROWS_AS(ideal_amplified(uop, nop, 2), ValidationError);
  }

  TEST_CASE("Trotter scenario has 60 layers on 16 dimensions") {
    const CircuitSpec c = trotter_ising_circuit();
    CHECK(c.layers.size() == 60);
    CHECK(c.dim == 16);
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("noiseless Trotter evolution matches a statevector oracle") {
    for (bool half : {false, true}) {
      TrotterIsingParams p;
      p.strong_rate = p.weak_rate = 0.0;
      p.half_angle = half;
      const CircuitSpec c = trotter_ising_circuit(p);
      const double scale = half ? 0.5 : 1.0;
      const CMatrix I = CMatrix::Identity(2, 2), X = pauli('x'), Z = pauli('z');
      const double zz = p.zz_angle * scale, xa = p.x_angle * scale;
      const CMatrix zz01 = pauli_rotation(tensor({Z, Z, I, I}), zz) * pauli_rotation(tensor({I, I, Z, Z}), zz);
      CMatrix xall = CMatrix::Identity(16, 16);
      for (int q = 0; q < 4; ++q) {
        std::vector<CMatrix> f(4, I);
        f[static_cast<std::size_t>(q)] = X;
        xall = xall * pauli_rotation(tensor({f[0], f[1], f[2], f[3]}), xa);
      }
      const CMatrix zz12 = pauli_rotation(tensor({I, Z, Z, I}), zz);
      const CMatrix step = zz12 * xall * zz01;

      CVector psi = CVector::Zero(16);
      psi(0) = 1.0;
      for (int s = 0; s < p.steps; ++s) psi = step * psi;
      const double z_oracle = (psi.adjoint() * tensor({Z, I, I, I}) * psi)(0).real();
      const double x_oracle = (psi.adjoint() * tensor({X, I, I, I}) * psi)(0).real();

      const DensityVector rho = apply(circuit_channels(c).k, ground_state(16));
      CHECK(std::abs(expectation(ObservableOp(pauli_on('z', 0, 4)), rho) - z_oracle) < 1e-10);
      CHECK(std::abs(expectation(ObservableOp(pauli_on('x', 0, 4)), rho) - x_oracle) < 1e-10);
    }
  }

  TEST_CASE("pauli_on puts qubit 0 in the most significant factor") {
    const CMatrix I = CMatrix::Identity(2, 2);
    CHECK(max_abs(pauli_on('y', 0, 3) - tensor({pauli('y'), I, I})) == 0.0);
    CHECK(max_abs(pauli_on('z', 2, 3) - tensor({I, I, pauli('z')})) == 0.0);
  }

  TEST_CASE("hermiticity scan is zero without noise") {
    TrotterIsingParams p;
    p.steps = 2;
    p.strong_rate = p.weak_rate = 0.0;
    for (const auto& pt : hermiticity_scan(trotter_ising_circuit(p), {1, 2, 4})) {
      CHECK(pt.defect < 1e-12);
      CHECK(pt.circuit_defect < 1e-12);
    }
  }

  TEST_CASE("sample_expectation") {
    CVector zero(2);
    zero << 1, 0;
    const ObservableOp z(pauli('z'));
    const SampledValue e = sample_expectation(z, DensityVector::pure(zero), 1000, 5);
    CHECK(e.estimate == 1.0);
    CHECK(e.error == 0.0);

    CVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const SampledValue big = sample_expectation(z, DensityVector::pure(plus), 1000000, 42);
    CHECK(std::abs(big.estimate) < 0.005);
    CHECK(big.error == doctest::Approx(1e-3).epsilon(0.01));

    const SampledValue r1 = sample_expectation(z, DensityVector::pure(plus), 500, 9);
    const SampledValue r2 = sample_expectation(z, DensityVector::pure(plus), 500, 9);
    CHECK(r1.estimate == r2.estimate);
    CHECK(r1.error == r2.error);
  }

  TEST_CASE("invalid layers are rejected") {
    LayerSpec l;
    l.hamiltonian = CMatrix::Identity(2, 2);
    l.hamiltonian(0, 1) = 1.0;
    CHECK_THROWS_AS(l.validate(), ValidationError);
    LayerSpec neg;
    neg.hamiltonian = CMatrix::Zero(2, 2);
    neg.lindblad.push_back({pauli('z'), -0.1});
    CHECK_THROWS_AS(neg.validate(), ValidationError);
  }
}
