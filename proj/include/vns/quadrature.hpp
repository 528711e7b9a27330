#pragma once

#include <Eigen/Dense>

namespace vns {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point rule via the Golub-Welsch eigenvalue method. Exact for
/// polynomials of degree <= 2n - 1.
GaussRule gauss_legendre(int n);

/// Integral over [a, b] of a polynomial of degree <= 2n - 1 using an n-point rule
/// (a shared 64-point rule is used whenever n <= 64).
template <typename F>
double integrate_poly(F&& f, double a, double b, int degree);

namespace detail {
const GaussRule& gauss_legendre_64();
}

template <typename F>
double integrate_poly(F&& f, double a, double b, int degree) {
  const int n = degree / 2 + 1;
  const GaussRule local = n > 64 ? gauss_legendre(n) : GaussRule{};
  const GaussRule& rule = n > 64 ? local : detail::gauss_legendre_64();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights(i) * f(mid + half * rule.nodes(i));
  return half * acc;
}

}  // namespace vns
