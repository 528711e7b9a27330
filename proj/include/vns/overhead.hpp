#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vns/mitigation.hpp"

namespace vns {

// Closed-form analysis of Taylor / VNS mitigation.
//
// G(m, s) = sum_k a_k s^(2k+1) = int_0^s (1-t^2)^m dt / Z_m, Z_m = int_0^1 (1-t^2)^m dt.
// The integral forms are evaluated with Gauss-Legendre quadrature, which is
// exact here (polynomial integrands) and free of the cancellation that the
// alternating coefficient sum suffers at large m.

/// int_0^1 (1-t^2)^m dt
double taylor_norm(int m);

/// G(m, s), valid for any real s.
double mitigation_function(int m, double s);

/// 1 - G(m, s), computed without cancellation.
double mitigation_defect(int m, double s);

/// G(m, s) as the explicit coefficient sum (second route, used in tests).
double mitigation_function_sum(int m, double s);

/// g = 1: 1 - G(m, s); g > 1: max(|1 - G(m, g s)|, |1 - G(m, g)|).
double infidelity(int m, double s_min, double g = 1.0);

/// sum_k |a_k(g)| = int_0^g (1+t^2)^m dt / Z_m
double gamma_overhead(int m, double g = 1.0);

/// sum_k |a_k(g)| (2k+1) / gamma = g (1+g^2)^m / int_0^g (1+t^2)^m dt
double avg_depth(int m, double g = 1.0);

/// sqrt(2 / (s^2 + 1))
double g_eq(double s_min);

enum class SchemeTag { Taylor1L, VNS1L, Taylor2L, VNS2L, VNS3L };

struct Scheme {
  SchemeTag tag = SchemeTag::Taylor1L;
  int m = 0;

  int layers() const noexcept;
  /// VNS schemes apply g_eq per layer; Taylor schemes use g = 1.
  bool vns() const noexcept;
};

const char* to_string(SchemeTag tag);
SchemeTag parse_scheme(const std::string& name);
std::vector<SchemeTag> all_schemes();

struct OverheadReport {
  Scheme scheme;
  double g = 1.0;
  double s_layer = 1.0;
  double infidelity = 0.0;
  double gamma2 = 1.0;  ///< total gamma^2 (gamma^(2L) for L layers)
  double avg_depth = 1.0;
  double runtime = 1.0;  ///< gamma2 * avg_depth
  bool benign = true;    ///< s_min_tot >= 1/2
  bool reachable = true; ///< used by recommend_plan
};

/// Per-layer s = s_tot^(1/L); 1L: R = gamma^2 <d>, exact infidelity;
/// L >= 2: infidelity bound L * I(m, s, g), R = gamma^(2L) * m (depth 1 at m = 0).
OverheadReport runtime_overhead(const Scheme& scheme, double s_min_tot);

struct Asymptotics {
  double infidelity = 0.0;
  double gamma2m = 0.0;
};

/// Large-m forms: I ~ max over x in {g s, g} of |1-x^2|^(m+1) / (sqrt(pi m) x), the x = g
/// term dropping out at g = 1; gamma^2 m ~ (1+g^2)^(2m+2) / (pi g^2).
Asymptotics asymptotics(int m, double s_min, double g = 1.0);

/// Asymptotic d ln R / d ln I. Taylor: 2L ln2 / ln(1 - s_l^2);
/// VNS: 2L ln(1+x) / ln(x-1), x = 2 / (s_l^2 + 1).
double slope(SchemeTag tag, double s_min_tot);

enum class CrossoverMode { Asymptotic, FiniteOrder };

/// Asymptotic: smallest s in (0,1) where the two slopes are equal (bisection to 1e-10).
/// Finite-order: smallest s_tot from which the scheme with fewer layers has R(I) <= the
/// other's at every target I in [1e-3, 1e-1] (log-log interpolation between integer-m
/// markers, m <= 80). Requires the same g family and different layer counts.
std::optional<double> crossover(SchemeTag a, SchemeTag b, CrossoverMode mode);

/// R(I) curve value at a target infidelity: interpolated log-log between markers;
/// infinity when unreachable for m <= m_max; 1 when the unmitigated circuit suffices.
double runtime_at_target(SchemeTag tag, double s_min_tot, double target, int m_max = 80);

enum class BoundMode { SminProduct, Order0, Mitigated };

/// SminProduct: prod s_l. Order0: 1 - prod (1 - I_l). Mitigated: I <- I + I_l + I I_l.
double layer_bounds(const std::vector<double>& values, BoundMode mode);

struct ShotAllocation {
  std::vector<long long> shots;
  double variance_factor = 0.0;  ///< gamma^2 / n_total
  double realized = 0.0;         ///< sum a_k^2 / N_k for the integer allocation
};

/// N_k proportional to |a_k|, largest-remainder rounding, at least one shot per circuit.
ShotAllocation shot_allocation(const CoefficientVector& c, long long n_total);

/// Minimal-runtime scheme/order (m <= 30) whose infidelity bound meets the target; ties
/// go to fewer layers, then smaller m. reachable = false returns the lowest infidelity found.
OverheadReport recommend_plan(double s_min_tot, double target_infidelity, int m_max = 30);

}  // namespace vns
