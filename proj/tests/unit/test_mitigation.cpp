#include <doctest.h>

#include <numeric>
#include <random>

#include "helpers.hpp"
#include "vns/mitigation.hpp"
#include "vns/noisesim.hpp"
#include "vns/validate.hpp"

using namespace vns;
using testing::max_abs;

namespace {

// Exact rational p/q with 128-bit integers.
struct Frac {
  __int128 p = 0, q = 1;
  Frac() = default;
  Frac(__int128 a, __int128 b) : p(a), q(b) { norm(); }
  void norm() {
    if (q < 0) p = -p, q = -q;
    __int128 a = p < 0 ? -p : p, b = q;
    while (b) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) p /= a, q /= a;
  }
  Frac operator+(const Frac& o) const { return {p * o.q + o.p * q, q * o.q}; }
  Frac operator/(const Frac& o) const { return {p * o.q, q * o.p}; }
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

__int128 binom(int n, int k) {
  __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// a_k from integrating (1 - t^2)^m term by term: (-1)^k C(m,k) / ((2k+1) Z),
// Z = sum_k (-1)^k C(m,k) / (2k+1).
std::vector<Frac> exact_coefficients(int m) {
  Frac z;
  std::vector<Frac> terms;
  for (int k = 0; k <= m; ++k) {
    const Frac t((k % 2 ? -1 : 1) * binom(m, k), 2 * k + 1);
    terms.push_back(t);
    z = z + t;
  }
  for (auto& t : terms) t = t / z;
  return terms;
}

double dot_expect(const CMatrix& a, const CVector& v) { return expectation_raw(a, v).real(); }

}  // namespace

TEST_SUITE("mitigation") {
  TEST_CASE("coefficients match exact rational arithmetic up to m = 10") {
    for (int m = 0; m <= 10; ++m) {
      const auto exact = exact_coefficients(m);
      const Eigen::VectorXd a = taylor_coefficients(m);
      Frac sum;
      for (int k = 0; k <= m; ++k) {
        CHECK(a(k) == doctest::Approx(exact[static_cast<std::size_t>(k)].value()).epsilon(1e-14));
        sum = sum + exact[static_cast<std::size_t>(k)];
      }
      CHECK(sum.p == sum.q);  // exactly 1
    }
  }

  TEST_CASE("documented coefficient values") {
    const CoefficientVector c1 = coefficients(1);
    CHECK(c1.a(0) == doctest::Approx(1.5));
    CHECK(c1.a(1) == doctest::Approx(-0.5));
    const CoefficientVector c2 = coefficients(2);
    CHECK(c2.a(0) == doctest::Approx(15.0 / 8));
    CHECK(c2.a(1) == doctest::Approx(-5.0 / 4));
    CHECK(c2.a(2) == doctest::Approx(3.0 / 8));
    CHECK(c2.a.sum() == doctest::Approx(1.0));
    CHECK(coefficients(3).gamma == doctest::Approx(6.0).epsilon(1e-14));
  }

  TEST_CASE("coefficient identities: alternating signs, scaling by g") {
    for (int m = 1; m <= 20; ++m) {
      const CoefficientVector c = coefficients(m);
      for (int k = 0; k <= m; ++k) CHECK((c.a(k) > 0) == (k % 2 == 0));
      const CoefficientVector cg = coefficients(m, 1.3);
      for (int k = 0; k <= m; ++k) CHECK(cg.a(k) == doctest::Approx(c.a(k) * std::pow(1.3, 2 * k + 1)));
    }
  }

  TEST_CASE("a_0 dominates only up to m = 3") {
    // |a_k / a_0| = C(m, k) / (2k + 1): at most 1 for m <= 3, above 1 from m = 4.
    for (int m = 1; m <= 3; ++m) {
      const Eigen::VectorXd a = taylor_coefficients(m);
      CHECK(a.cwiseAbs().maxCoeff() == doctest::Approx(std::abs(a(0))));
    }
    const Eigen::VectorXd a4 = taylor_coefficients(4);
    CHECK(std::abs(a4(1) / a4(0)) == doctest::Approx(4.0 / 3.0));
  }

  TEST_CASE("large orders use the log-space route and match the ratio recursion") {
    // a_0 = prod (2i+1)/(2i); a_k / a_(k-1) = -(m-k+1)(2k-1) / (k (2k+1)).
    for (int m : {25, 26, 40, 60}) {
      const Eigen::VectorXd a = taylor_coefficients(m);
      REQUIRE(a.allFinite());
      long double ak = 1.0L;
      for (int i = 1; i <= m; ++i) ak *= (2.0L * i + 1) / (2.0L * i);
      for (int k = 0; k <= m; ++k) {
        if (k > 0) ak *= -static_cast<long double>(m - k + 1) * (2 * k - 1) / (static_cast<long double>(k) * (2 * k + 1));
        CHECK(a(k) == doctest::Approx(static_cast<double>(ak)).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(coefficients(-1), ValidationError);
  }

  TEST_CASE("mitigate_series examples") {
    const AmplifiedSeries raw = AmplifiedSeries::from_values({0.7}, {0.01});
    CHECK(mitigate_series(raw, coefficients(0)).value == 0.7);
    CHECK(mitigate_series(raw, coefficients(0)).error == doctest::Approx(0.01));

    const AmplifiedSeries single = AmplifiedSeries::from_values({0.8, 0.512});
    CHECK(mitigate_series(single, coefficients(1)).value == doctest::Approx(0.944).epsilon(1e-14));
    CHECK(mitigate_series(single, coefficients(1, 1.25)).value == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("error propagation adds in quadrature") {
    const AmplifiedSeries s = AmplifiedSeries::from_values({0.8, 0.5}, {0.01, 0.02});
    const Estimate e = mitigate_series(s, coefficients(1));
    CHECK(e.error == doctest::Approx(std::hypot(1.5 * 0.01, 0.5 * 0.02)));
  }

  TEST_CASE("mitigate_series is linear in the data") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int m = 0; m <= 5; ++m) {
      std::vector<double> x, y, z;
      for (int k = 0; k <= m; ++k) {
        x.push_back(u(rng));
        y.push_back(u(rng));
        z.push_back(0.3 * x.back() - 1.7 * y.back());
      }
      const CoefficientVector c = coefficients(m, 1.2);
      const double lhs = mitigate_series(AmplifiedSeries::from_values(z), c).value;
      const double rhs = 0.3 * mitigate_series(AmplifiedSeries::from_values(x), c).value -
                         1.7 * mitigate_series(AmplifiedSeries::from_values(y), c).value;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  TEST_CASE("mitigated operator: m = 0 is K, distance to U shrinks with m") {
    std::mt19937_64 rng(32);
    const auto [layer, unused] = random_two_layer_instance(2, rng, 0.8);
    (void)unused;
    const Superoperator n = layer_channel(layer.noise);
    const Superoperator u = unitary_superop(layer_unitary(layer.gate));
    const Superoperator k(2, u.matrix() * n.matrix(), ChannelKind::NoisyLayer);
    const Superoperator ki(2, n.matrix() * u.matrix().adjoint(), ChannelKind::NoisyLayer);
    CHECK(max_abs(mitigated_operator(k, ki, coefficients(0)).matrix() - k.matrix()) == 0.0);
    double prev = 1e300;
    for (int m = 0; m <= 6; ++m) {
      const double d = operator_norm(u.matrix() - mitigated_operator(k, ki, coefficients(m)).matrix());
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 1e-6);
  }

  TEST_CASE("two-layer grid mitigation equals operator-level mitigation") {
    std::mt19937_64 rng(33);
    const auto [la, lb] = random_two_layer_instance(2, rng);
    auto parts = [](const NoisyUnitaryLayer& l) {
      const CMatrix n = layer_channel(l.noise).matrix();
      const CMatrix u = unitary_superop(layer_unitary(l.gate)).matrix();
      return std::pair<CMatrix, CMatrix>{CMatrix(u * n), CMatrix(n * u.adjoint())};
    };
    const auto [ka, kia] = parts(la);
    const auto [kb, kib] = parts(lb);
    const DensityVector rho = random_density(2, rng);
    const CMatrix obs = random_hermitian(2, rng);
    const int m = 2;
    Eigen::MatrixXd grid(m + 1, m + 1);
    CMatrix pa = ka, pb = kb;
    std::vector<CMatrix> amp_a, amp_b;
    for (int i = 0; i <= m; ++i) {
      amp_a.push_back(pa);
      amp_b.push_back(pb);
      pa = pa * kia * ka;
      pb = pb * kib * kb;
    }
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) grid(i, j) = dot_expect(obs, amp_b[j] * amp_a[i] * rho.data());
    const CoefficientVector ca = coefficients(m, 1.1), cb = coefficients(m, 1.05);
    const double from_grid = mitigate_two_layer(AmplifiedGrid(grid), ca, cb).value;
    const Superoperator ma = mitigated_operator(Superoperator(2, ka), Superoperator(2, kia), ca);
    const Superoperator mb = mitigated_operator(Superoperator(2, kb), Superoperator(2, kib), cb);
    CHECK(from_grid == doctest::Approx(dot_expect(obs, mb.matrix() * ma.matrix() * rho.data())).epsilon(1e-8));
    CHECK(mitigate_two_layer(AmplifiedGrid(grid), coefficients(0), coefficients(0)).value == grid(0, 0));
  }

  TEST_CASE("separable single-mode grid is recovered exactly at g = 1/s per layer") {
    const double sa = 0.8, sb = 0.9, a0 = -0.37;
    const int m = 3;
    Eigen::MatrixXd v(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) v(i, j) = a0 * std::pow(sa, 2 * i + 1) * std::pow(sb, 2 * j + 1);
    const double r = mitigate_two_layer(AmplifiedGrid(v), coefficients(m, 1 / sa), coefficients(m, 1 / sb)).value;
    CHECK(r == doctest::Approx(a0).epsilon(1e-12));
  }

  TEST_CASE("first-order closed form") {
    const ClosedForm f = first_order_vns(AmplifiedSeries::from_values({0.8, 0.512}));
    CHECK(f.g == doctest::Approx(1.25));
    CHECK(f.value == doctest::Approx(1.0));
    const ClosedForm flat = first_order_vns(AmplifiedSeries::from_values({0.3, 0.3}));
    CHECK(flat.g == doctest::Approx(1.0));
    CHECK(flat.value == doctest::Approx(0.3));
    CHECK_THROWS_AS(first_order_vns(AmplifiedSeries::from_values({0.02, -0.01})), SignFlip);
    // Negative data with the right ordering is fine.
    CHECK(first_order_vns(AmplifiedSeries::from_values({-0.8, -0.512})).value == doctest::Approx(-1.0));
  }

  TEST_CASE("second-order closed form") {
    const ClosedForm f = second_order_vns(AmplifiedSeries::from_values({0.8, 0.512, 0.32768}));
    CHECK(f.g == doctest::Approx(1.25));
    CHECK(f.value == doctest::Approx(1.0).epsilon(1e-14));
    const ClosedForm c = second_order_vns(AmplifiedSeries::from_values({0.6, 0.6, 0.6}));
    CHECK(c.g == doctest::Approx(1.0));
    CHECK(c.value == doctest::Approx(0.6));
  }

  TEST_CASE("closed forms equal the generic engine at their own g") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    for (int t = 0; t < 200; ++t) {
      const double v1 = u(rng), v3 = v1 * u(rng), v5 = v3 * u(rng);
      const AmplifiedSeries s = AmplifiedSeries::from_values({v1, v3, v5});
      const ClosedForm f1 = first_order_vns(s), f2 = second_order_vns(s);
      CHECK(std::abs(f1.value - mitigate_series(s, coefficients(1, f1.g)).value) < 1e-12);
      CHECK(std::abs(f2.value - mitigate_series(s, coefficients(2, f2.g)).value) < 1e-12);
    }
  }

  TEST_CASE("B-shift recovers a small observable exactly under single-mode noise") {
    const double a = -0.01, b = 0.5, s = 0.85;
    std::vector<double> apb, bb;
    for (int k = 0; k <= 2; ++k) {
      apb.push_back((a + b) * std::pow(s, 2 * k + 1));
      bb.push_back(b * std::pow(s, 2 * k + 1));
    }
    for (int order : {1, 2})
      CHECK(b_shift_mitigate(AmplifiedSeries::from_values(apb), AmplifiedSeries::from_values(bb), order) ==
            doctest::Approx(a).epsilon(1e-12));
    CHECK(b_shift_mitigate(AmplifiedSeries::from_values(bb), AmplifiedSeries::from_values(bb), 2) == doctest::Approx(0.0));
  }

  TEST_CASE("B-shift reports which series flipped sign") {
    const AmplifiedSeries good = AmplifiedSeries::from_values({0.5, 0.4, 0.3});
    const AmplifiedSeries bad = AmplifiedSeries::from_values({0.02, -0.01, -0.02});
    try {
      b_shift_mitigate(good, bad, 1);
      FAIL("expected SignFlip");
    } catch (const SignFlip& e) {
      CHECK(e.which() == "B");
    }
    try {
      b_shift_mitigate(bad, good, 2);
      FAIL("expected SignFlip");
    } catch (const SignFlip& e) {
      CHECK(e.which() == "A+B");
    }
  }

  TEST_CASE("B-shift on a simulated dephasing circuit stays within two standard errors") {
    // One qubit rotated almost to |1> and dephased: <x> is about 0.02, B = -z is large.
    LayerSpec l;
    l.hamiltonian = 0.78 * testing::pauli('y');
    l.lindblad.push_back({testing::pauli('z'), 0.02});
    CircuitSpec c;
    c.dim = 2;
    c.layers = {l, l};
    CVector psi(2);
    psi << 1, 0;
    const DensityVector rho0 = DensityVector::pure(psi);
    const CMatrix x = testing::pauli('x'), z = testing::pauli('z');
    const CMatrix shift = -z;
    CircuitSpec clean = c;
    for (auto& layer : clean.layers) layer.lindblad.clear();
    const double ideal = expectation(ObservableOp(x), apply(circuit_channels(clean).k, rho0));
    const long long shots = 200000;
    const AmplifiedSeries apb = simulate_series(c, rho0, ObservableOp(x + shift), 2, shots, 7);
    const AmplifiedSeries bs = simulate_series(c, rho0, ObservableOp(shift), 2, shots, 8);
    const double est = b_shift_mitigate(apb, bs, 2);
    const Estimate ea = mitigate_series(apb, coefficients(2, std::sqrt(apb.value(1) / apb.value(2))));
    const Estimate eb = mitigate_series(bs, coefficients(2, std::sqrt(bs.value(1) / bs.value(2))));
    CHECK(std::abs(est - ideal) <= 2.0 * std::hypot(ea.error, eb.error));
  }
}
