#include "vns/validate.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "vns/gselect.hpp"
#include "vns/io.hpp"
#include "vns/mitigation.hpp"
#include "vns/overhead.hpp"

namespace vns {

namespace {

CMatrix gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = Complex(nd(rng), nd(rng));
  return m;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

double noise_smin(const LayerSpec& noise) {
  return noise_spectrum(layer_channel(noise), 1e-10).s_min;
}

}  // namespace

CMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  const CMatrix g = gaussian(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

CMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian(n, n, rng));
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

DensityVector random_density(Eigen::Index n, std::mt19937_64& rng) {
  const CMatrix w = gaussian(n, n, rng);
  CMatrix rho = w * w.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityVector::from_matrix(rho);
}

std::pair<NoisyUnitaryLayer, NoisyUnitaryLayer> random_two_layer_instance(Eigen::Index n, std::mt19937_64& rng,
                                                                          double min_smin) {
  std::uniform_real_distribution<double> rate(0.005, 0.04);
  auto make = [&]() {
    NoisyUnitaryLayer l;
    l.noise.hamiltonian = CMatrix::Zero(n, n);
    l.noise.duration = 1.0;
    for (int t = 0; t < 2; ++t) {
      CMatrix op = random_hermitian(n, rng);
      op /= operator_norm(op);
      l.noise.lindblad.push_back({op, rate(rng)});
    }
    CMatrix h = random_hermitian(n, rng);
    l.gate.hamiltonian = h / operator_norm(h);
    l.gate.duration = 1.0;
    return l;
  };
  for (;;) {
    auto a = make();
    auto b = make();
    if (noise_smin(a.noise) * noise_smin(b.noise) >= min_smin) return {a, b};
  }
}

TwoLayerCheck check_two_layer(const NoisyUnitaryLayer& a, const NoisyUnitaryLayer& b, int m,
                              std::mt19937_64& rng) {
  const Eigen::Index n = a.noise.dim();
  const CoefficientVector c = coefficients(m, 1.0);
  struct Built {
    CMatrix u, k, kmit;
    double smin, infid;
  };
  auto build = [&](const NoisyUnitaryLayer& l) {
    const Superoperator nl = layer_channel(l.noise);
    const Superoperator ul = unitary_superop(layer_unitary(l.gate));
    const Superoperator kl(n, ul.matrix() * nl.matrix(), ChannelKind::NoisyLayer);
    const Superoperator ki(n, nl.matrix() * ul.matrix().adjoint(), ChannelKind::NoisyLayer);
    Built out;
    out.u = ul.matrix();
    out.k = kl.matrix();
    out.kmit = mitigated_operator(kl, ki, c).matrix();
    out.smin = noise_spectrum(nl, 1e-10).s_min;
    out.infid = infidelity(m, out.smin);
    return out;
  };
  const Built la = build(a), lb = build(b);
  TwoLayerCheck r;
  const CMatrix u = lb.u * la.u;
  const CMatrix kmit = lb.kmit * la.kmit;
  r.circuit_smin = smallest_singular_value(u.adjoint() * (lb.k * la.k));
  r.smin_product = layer_bounds({la.smin, lb.smin}, BoundMode::SminProduct);
  r.distance = operator_norm(u - kmit);
  r.mitigated_bound = layer_bounds({la.infid, lb.infid}, BoundMode::Mitigated);
  const ObservableOp obs(random_hermitian(n, rng));
  const DensityVector rho = random_density(n, rng);
  const double ideal = expectation_raw(obs.matrix(), u * rho.data()).real();
  const double mit = expectation_raw(obs.matrix(), kmit * rho.data()).real();
  r.observable_error = std::abs(ideal - mit);
  r.observable_bound = observable_error_bound(obs, rho, r.distance);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> run_property_battery(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, const std::function<std::string(bool&)>& body) {
    CheckResult r;
    r.name = name;
    try {
      bool ok = true;
      r.detail = body(ok);
      r.passed = ok;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(r));
  };

  check("liouville.vec_roundtrip", [&](bool& ok) {
    const CMatrix m = gaussian(5, 5, rng);
    ok = unvec(vec(m), 5) == m;
    return std::string();
  });

  check("liouville.unitary_homomorphism", [&](bool& ok) {
    const CMatrix u = random_unitary(3, rng), v = random_unitary(3, rng);
    const double d = (unitary_superop(u).matrix() * unitary_superop(v).matrix() -
                      unitary_superop(u * v).matrix()).cwiseAbs().maxCoeff();
    ok = d <= 1e-10;
    return "deviation " + num(d);
  });

  check("liouville.channel_action", [&](bool& ok) {
    const CMatrix u = random_unitary(3, rng);
    const DensityVector rho = random_density(3, rng);
    const CMatrix direct = u * rho.matrix() * u.adjoint();
    const double d = (unvec(CVector(unitary_superop(u).apply(rho.data())), 3) - direct).cwiseAbs().maxCoeff();
    ok = d <= 1e-12;
    return "deviation " + num(d);
  });

  check("noisesim.trace_preservation", [&](bool& ok) {
    LayerSpec l;
    l.hamiltonian = random_hermitian(3, rng);
    l.lindblad.push_back({random_hermitian(3, rng), 0.1});
    l.duration = 0.7;
    const double d1 = layer_channel(l).trace_preservation_defect();
    const double d2 = pulse_inverse_channel(l).trace_preservation_defect();
    ok = d1 <= 1e-9 && d2 <= 1e-9;
    return "defects " + num(d1) + ", " + num(d2);
  });

  check("liouville.noise_spectrum_reconstruction", [&](bool& ok) {
    LayerSpec l;
    l.hamiltonian = CMatrix::Zero(3, 3);
    l.lindblad.push_back({random_hermitian(3, rng), 0.05});
    const Superoperator n = layer_channel(l);
    const NoiseSpectrum sp = noise_spectrum(n, 1e-10);
    const CMatrix rec = sp.eigenvectors * sp.eigenvalues.cast<Complex>().asDiagonal() * sp.eigenvectors.adjoint();
    const double d = (rec - n.matrix()).cwiseAbs().maxCoeff();
    bool sorted = true;
    for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i) sorted &= sp.eigenvalues(i) >= sp.eigenvalues(i - 1);
    ok = d <= 1e-9 && sorted && !sp.out_of_range && sp.s_min > 0.0;
    return "reconstruction " + num(d);
  });

  check("noisesim.amplified_j0_equals_k", [&](bool& ok) {
    CircuitSpec c;
    c.dim = 2;
    for (int i = 0; i < 3; ++i) {
      LayerSpec l;
      l.hamiltonian = random_hermitian(2, rng);
      l.lindblad.push_back({random_hermitian(2, rng), 0.02});
      c.layers.push_back(l);
    }
    const double d = (amplified_channel(c, 0, 1).matrix() - circuit_channels(c).k.matrix()).cwiseAbs().maxCoeff();
    ok = d <= 1e-12;
    return "deviation " + num(d);
  });

  check("mitigation.coefficient_sum", [&](bool& ok) {
    double worst = 0.0;
    // The alternating sum cancels; its rounding error scales with gamma = sum |a_k|.
    for (int m = 0; m <= 20; ++m) {
      const CoefficientVector c = coefficients(m);
      worst = std::max(worst, std::abs(c.a.sum() - 1.0) / (c.gamma * std::numeric_limits<double>::epsilon()));
    }
    ok = worst <= 16.0;
    return "max |sum - 1| / (gamma eps) = " + num(worst);
  });

  check("mitigation.gamma_dual_route", [&](bool& ok) {
    double worst = 0.0;
    for (int m = 0; m <= 20; ++m)
      for (double g : {1.0, 1.2, 1.4}) {
        const double a = coefficients(m, g).gamma, b = gamma_overhead(m, g);
        worst = std::max(worst, std::abs(a - b) / b);
      }
    ok = worst <= 1e-10;
    return "max relative deviation " + num(worst);
  });

  check("overhead.G_monotone", [&](bool& ok) {
    for (int m = 0; m <= 30 && ok; ++m) {
      // G itself rounds to 1 near s = 1, so test that the defect 1 - G strictly falls.
      double prev = mitigation_defect(m, 0.0);
      for (int i = 1; i <= 999; ++i) {
        const double v = mitigation_defect(m, i / 1000.0);
        if (!(v < prev)) ok = false;
        prev = v;
      }
    }
    return std::string();
  });

  check("overhead.infidelity_decreasing_in_m", [&](bool& ok) {
    for (double s : {0.2, 0.5, 0.8, 0.95})
      for (int m = 1; m <= 30; ++m)
        if (!(infidelity(m, s) < infidelity(m - 1, s))) ok = false;
    return std::string();
  });

  check("mitigation.closed_form_agreement", [&](bool& ok) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const double v1 = u(rng), v3 = v1 * u(rng), v5 = v3 * u(rng);
      const AmplifiedSeries s = AmplifiedSeries::from_values({v1, v3, v5});
      const ClosedForm f1 = first_order_vns(s), f2 = second_order_vns(s);
      worst = std::max(worst, std::abs(f1.value - mitigate_series(s, coefficients(1, f1.g)).value));
      worst = std::max(worst, std::abs(f2.value - mitigate_series(s, coefficients(2, f2.g)).value));
    }
    ok = worst <= 1e-12;
    return "max deviation " + num(worst);
  });

  check("gselect.single_mode_exactness", [&](bool& ok) {
    double worst = 0.0;
    for (double s : {0.7, 0.8, 0.9})
      for (int m = 1; m <= 6; ++m) {
        std::vector<double> v;
        for (int k = 0; k <= m; ++k) v.push_back(std::pow(s, 2 * k + 1));
        const AmplifiedSeries series = AmplifiedSeries::from_values(v);
        GPolicy pol;
        pol.g_max = 1.5;
        const GSelection sel = select_g(series, m, pol);
        const double err = std::abs(mitigate_series(series, coefficients(m, sel.g)).value - 1.0);
        // A plateau start is accepted once P varies by less than epsilon, so that is its bound.
        const double bound = sel.method == GMethod::PlateauStart ? sel.diagnostics.epsilon : 1e-9;
        if (err > bound) ok = false;
        worst = std::max(worst, err);
      }
    return "max error " + num(worst);
  });

  check("overhead.shot_allocation", [&](bool& ok) {
    for (int m = 0; m <= 3; ++m) {
      const CoefficientVector c = coefficients(m);
      const ShotAllocation a = shot_allocation(c, 60);
      long long total = 0;
      for (long long n : a.shots) total += n;
      if (total != 60 || a.realized < a.variance_factor - 1e-12) ok = false;
    }
    return std::string();
  });

  check("overhead.layer_bounds", [&](bool& ok) {
    double worst_gap = 1e300;
    for (int t = 0; t < 5; ++t) {
      const auto [a, b] = random_two_layer_instance(2, rng);
      const TwoLayerCheck r = check_two_layer(a, b, 2, rng);
      if (r.circuit_smin < r.smin_product - 1e-12 || r.distance > r.mitigated_bound + 1e-6 ||
          r.observable_error > r.observable_bound + 1e-12)
        ok = false;
      worst_gap = std::min(worst_gap, r.mitigated_bound - r.distance);
    }
    return "min bound slack " + num(worst_gap);
  });

  check("io.series_roundtrip", [&](bool& ok) {
    const AmplifiedSeries s = AmplifiedSeries::from_values({0.8, 0.512, 0.32768}, {0.01, 0.02, 0.03}, "z0");
    const AmplifiedSeries r = series_from_json(json::parse(to_json(s).dump()));
    for (int k = 0; k <= 2; ++k) ok &= r.value(k) == s.value(k) && r.error(k) == s.error(k);
    ok &= r.observable() == "z0";
    return std::string();
  });

  return out;
}

}  // namespace vns
