#include "vns/mitigation.hpp"

#include <cmath>

#include "vns/errors.hpp"

namespace vns {

Eigen::VectorXd taylor_coefficients(int m) {
  if (m < 0) throw ValidationError("mitigation order must be non-negative");
  Eigen::VectorXd a(m + 1);
  if (m <= 25) {
    // c_m = (2m+1)!! / (2^m m!) = prod_{i=1}^m (2i+1)/(2i); a_k = (-1)^k C(m,k) c_m / (2k+1)
    double c = 1.0;
    for (int i = 1; i <= m; ++i) c *= (2.0 * i + 1.0) / (2.0 * i);
    double binom = 1.0;
    for (int k = 0; k <= m; ++k) {
      a(k) = (k % 2 ? -1.0 : 1.0) * binom * c / (2.0 * k + 1.0);
      binom = binom * (m - k) / (k + 1.0);
    }
  } else {
    // log c_m = log Gamma(m + 3/2) - log Gamma(m + 1) - log Gamma(3/2)
    const double log_c = std::lgamma(m + 1.5) - std::lgamma(m + 1.0) - std::lgamma(1.5);
    for (int k = 0; k <= m; ++k) {
      const double log_binom = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
      a(k) = (k % 2 ? -1.0 : 1.0) * std::exp(log_c + log_binom - std::log(2.0 * k + 1.0));
    }
  }
  return a;
}

CoefficientVector coefficients(int m, double g) {
  if (!(g > 0.0)) throw ValidationError("scale factor g must be positive");
  CoefficientVector c;
  c.order = m;
  c.scale = g;
  c.a = taylor_coefficients(m);
  double gp = g;
  const double g2 = g * g;
  for (int k = 0; k <= m; ++k) {
    c.a(k) *= gp;
    gp *= g2;
  }
  c.gamma = c.a.cwiseAbs().sum();
  return c;
}

Estimate mitigate_series(const AmplifiedSeries& s, const CoefficientVector& c) {
  if (s.order() < c.order)
    throw ValidationError("series order " + std::to_string(s.order()) +
                          " is lower than mitigation order " + std::to_string(c.order));
  Estimate e;
  double var = 0.0;
  for (int k = 0; k <= c.order; ++k) {
    e.value += c.a(k) * s.value(k);
    var += c.a(k) * c.a(k) * s.error(k) * s.error(k);
  }
  e.error = std::sqrt(var);
  return e;
}

Superoperator mitigated_operator(const Superoperator& k, const Superoperator& k_inv,
                                 const CoefficientVector& c) {
  if (k.hilbert_dim() != k_inv.hilbert_dim()) throw ValidationError("superoperator dimension mismatch");
  const CMatrix x = k_inv.matrix() * k.matrix();
  // Horner: sum_k a_k X^k
  CMatrix poly = c.a(c.order) * CMatrix::Identity(x.rows(), x.cols());
  for (int j = c.order - 1; j >= 0; --j) {
    poly = x * poly;
    poly.diagonal().array() += c.a(j);
  }
  return Superoperator(k.hilbert_dim(), k.matrix() * poly, ChannelKind::Mitigated);
}

Estimate mitigate_two_layer(const AmplifiedGrid& grid, const CoefficientVector& c_a,
                            const CoefficientVector& c_b) {
  if (grid.order() < c_a.order || grid.order() < c_b.order)
    throw ValidationError("grid order is lower than mitigation order");
  const Eigen::VectorXd& a = c_a.a;
  const Eigen::VectorXd& b = c_b.a;
  Estimate e;
  double var = 0.0;
  for (int i = 0; i <= c_a.order; ++i)
    for (int j = 0; j <= c_b.order; ++j) {
      const double w = a(i) * b(j);
      e.value += w * grid.values()(i, j);
      var += w * w * grid.stderrs()(i, j) * grid.stderrs()(i, j);
    }
  e.error = std::sqrt(var);
  return e;
}

ClosedForm first_order_vns(const AmplifiedSeries& s) {
  if (s.order() < 1) throw ValidationError("first-order VNS needs factors 1 and 3");
  const double v1 = s.value(0), v3 = s.value(1);
  if (v1 * v3 <= 0.0) throw SignFlip("<A>_1 and <A>_3 differ in sign or vanish");
  const double ratio = v1 / v3;
  if (ratio < 1.0) throw SignFlip("|<A>_3| exceeds |<A>_1|, g would be below 1");
  ClosedForm out;
  out.g = std::sqrt(ratio);
  out.value = out.g * v1;
  return out;
}

ClosedForm second_order_vns(const AmplifiedSeries& s) {
  if (s.order() < 2) throw ValidationError("second-order VNS needs factors 1, 3 and 5");
  const double v1 = s.value(0), v3 = s.value(1), v5 = s.value(2);
  if (v3 * v5 <= 0.0 || v1 * v3 < 0.0) throw SignFlip("amplified values differ in sign or vanish");
  const double ratio = v3 / v5;
  if (ratio < 1.0) throw SignFlip("|<A>_5| exceeds |<A>_3|, g would be below 1");
  ClosedForm out;
  out.g = std::sqrt(ratio);
  out.value = 15.0 / 8.0 * out.g * v1 - 7.0 / 8.0 * out.g * out.g * out.g * v3;
  return out;
}

double b_shift_mitigate(const AmplifiedSeries& series_a_plus_b, const AmplifiedSeries& series_b,
                        int order) {
  if (order != 1 && order != 2) throw ValidationError("B-shift closed form supports order 1 or 2");
  auto closed = [order](const AmplifiedSeries& s, const char* which) {
    try {
      return order == 1 ? first_order_vns(s).value : second_order_vns(s).value;
    } catch (const SignFlip& e) {
      throw SignFlip(e.what(), which);
    }
  };
  const double ab = closed(series_a_plus_b, "A+B");
  const double b = closed(series_b, "B");
  return ab - b;
}

}  // namespace vns
