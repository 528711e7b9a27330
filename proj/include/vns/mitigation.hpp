#pragma once

#include <string>

#include <Eigen/Dense>

#include "vns/liouville.hpp"
#include "vns/series.hpp"

namespace vns {

/// Mitigation coefficients a_k(g) = a_k * g^(2k+1), k = 0..m.
struct CoefficientVector {
  int order = 0;
  double scale = 1.0;
  Eigen::VectorXd a;
  double gamma = 1.0;  ///< sum |a_k|
};

/// Unscaled coefficients a_k = (-1)^k (2m+1)!! / (2^m (2k+1) k! (m-k)!).
/// Products of exact ratios for m <= 25, lgamma log-space beyond.
Eigen::VectorXd taylor_coefficients(int m);

CoefficientVector coefficients(int m, double g = 1.0);

struct Estimate {
  double value = 0.0;
  double error = 0.0;  ///< standard error
};

/// sum_k a_k(g) v_{2k+1}; errors added in quadrature assuming independent entries.
Estimate mitigate_series(const AmplifiedSeries& s, const CoefficientVector& c);

/// sum_k a_k(g) K (K_I K)^k
Superoperator mitigated_operator(const Superoperator& k, const Superoperator& k_inv,
                                 const CoefficientVector& c);

/// sum_ij a_i^A a_j^B v(i, j)
Estimate mitigate_two_layer(const AmplifiedGrid& grid, const CoefficientVector& c_a,
                            const CoefficientVector& c_b);

struct ClosedForm {
  double value = 0.0;
  double g = 1.0;
};

/// Extremum of the first-order curve: g = sqrt(v1/v3), value = g v1
/// (= sqrt(v1^3/v3) for positive data). Throws SignFlip when v1*v3 <= 0 or v1/v3 < 1.
ClosedForm first_order_vns(const AmplifiedSeries& s);

/// Inflection of the second-order curve: g = sqrt(v3/v5),
/// value = 15/8 g v1 - 7/8 g^3 v3 (= ... - 7/8 sqrt(v3^5/v5^3) for positive data).
ClosedForm second_order_vns(const AmplifiedSeries& s);

/// <A>_mit = <A+B>_mit - <B>_mit with the closed form of the given order (1 or 2).
/// SignFlip::which() names the failing series ("A+B" or "B").
double b_shift_mitigate(const AmplifiedSeries& series_a_plus_b, const AmplifiedSeries& series_b,
                        int order);

}  // namespace vns
