#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vns/liouville.hpp"
#include "vns/polynomial.hpp"
#include "vns/series.hpp"

namespace vns {

struct GPolicy {
  /// <= 0 selects the default: sqrt(2) for m >= 5, 2.0 for m <= 4.
  double g_max = 0.0;
  /// <= 0 selects the default: max(10 * stderr of P(1), 1e-4).
  double plateau_tolerance = 0.0;
  double plateau_width = 0.1;
  double grid_step = 1e-3;

  double resolved_g_max(int m) const;
};

enum class GMethod { PlateauStart, Extremum, Inflection, TaylorFallback };

const char* to_string(GMethod method);

struct GDiagnostics {
  std::vector<std::pair<double, double>> curve;  ///< (g, P(g)) on the policy grid
  std::vector<double> extremum_candidates;       ///< sign changes of P' in (1, g_max]
  std::vector<double> inflection_candidates;     ///< sign changes of P'' in (1, g_max]
  double epsilon = 0.0;
  double stderr_at_1 = 0.0;
  double plateau_variation = 0.0;  ///< max |P(g) - P(1)| on [1, 1 + width]
  double total_variation = 0.0;    ///< max |P(g) - P(1)| on [1, g_max]
  double g_max = 0.0;
  double residual = 0.0;           ///< |P'(g)| or |P''(g)| at the selected root
  std::string note;
};

struct GSelection {
  double g = 1.0;
  GMethod method = GMethod::TaylorFallback;
  GDiagnostics diagnostics;
};

/// Odd polynomial P(g) = sum_k a_k v_{2k+1} g^(2k+1) as ascending coefficients in g.
Poly mitigation_polynomial(const AmplifiedSeries& s, int m);

/// Samples P on g = lo, lo + step, ..., hi.
std::vector<std::pair<double, double>> mitigated_vs_g_curve(const AmplifiedSeries& s, int m,
                                                            double lo, double hi, double step);

/// Plateau, then smallest extremum, then smallest inflection point, else g = 1.
GSelection select_g(const AmplifiedSeries& s, int m, const GPolicy& policy = {});

enum class AnalyticG { Eq, InvSqrt, Midpoint, Det, GBar };

AnalyticG parse_analytic_g(const std::string& name);

/// eq: sqrt(2/(s^2+1)); inv_sqrt: 1/sqrt(s); midpoint: 2/(1+s);
/// det: det(N)^(-1/d) with d = n^2 the Liouville dimension;
/// gbar: sqrt((1 + s^(1/(m+1))) / (s^2 + s^(1/(m+1)))).
double analytic_g(AnalyticG mode, double s_min, std::optional<int> m = std::nullopt,
                  const Superoperator* n_op = nullptr);

}  // namespace vns
