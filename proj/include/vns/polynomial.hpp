#pragma once

#include <vector>

#include <Eigen/Dense>

namespace vns {

/// Real polynomial p(x) = sum_i c(i) x^i (ascending powers).
using Poly = Eigen::VectorXd;

double poly_eval(const Poly& p, double x);

/// Running rounding-error bound of Horner evaluation at x.
double poly_eval_noise(const Poly& p, double x);

Poly poly_derivative(const Poly& p);

/// Companion-matrix eigenvalues (leading zero coefficients are trimmed).
Eigen::VectorXcd poly_roots(const Poly& p);

struct RootSearch {
  std::vector<double> roots;          ///< odd-multiplicity real roots in (lo, hi], ascending
  std::vector<double> companion;      ///< real parts of near-real companion clusters in range
  std::vector<double> grid_only;      ///< roots found by the grid scan but not the companion route
};

/// Real roots of odd multiplicity (sign changes) in (lo, hi]. Candidates come from the
/// companion eigenvalues, clustered so that split multiple roots count once; each cluster
/// is accepted only if p changes sign across it by more than the evaluation noise, then
/// refined by bisection. A uniform grid scan with step grid_step cross-checks the result.
RootSearch sign_change_roots(const Poly& p, double lo, double hi, double grid_step);

}  // namespace vns
