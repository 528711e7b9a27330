#include "vns/gselect.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "vns/errors.hpp"
#include "vns/mitigation.hpp"

namespace vns {

double GPolicy::resolved_g_max(int m) const {
  if (g_max > 0.0) return g_max;
  return m >= 5 ? std::sqrt(2.0) : 2.0;
}

const char* to_string(GMethod method) {
  switch (method) {
    case GMethod::PlateauStart: return "plateau-start";
    case GMethod::Extremum: return "extremum";
    case GMethod::Inflection: return "inflection";
    case GMethod::TaylorFallback: return "taylor-fallback";
  }
  return "taylor-fallback";
}

Poly mitigation_polynomial(const AmplifiedSeries& s, int m) {
  if (m < 0) throw ValidationError("mitigation order must be non-negative");
  if (s.order() < m)
    throw ValidationError("series order " + std::to_string(s.order()) + " is lower than " +
                          std::to_string(m));
  const Eigen::VectorXd a = taylor_coefficients(m);
  Poly p = Poly::Zero(2 * m + 2);
  for (int k = 0; k <= m; ++k) p(2 * k + 1) = a(k) * s.value(k);
  return p;
}

std::vector<std::pair<double, double>> mitigated_vs_g_curve(const AmplifiedSeries& s, int m,
                                                            double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ValidationError("invalid g grid");
  const Poly p = mitigation_polynomial(s, m);
  std::vector<std::pair<double, double>> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) {
    const double g = lo + static_cast<double>(i) * step;
    out.emplace_back(g, poly_eval(p, g));
  }
  return out;
}

namespace {

// With u = g^2: P'(g) = Q1(u), P''(g) = g Q2(u).
Poly q1_of(const AmplifiedSeries& s, int m) {
  const Eigen::VectorXd a = taylor_coefficients(m);
  Poly q = Poly::Zero(m + 1);
  for (int k = 0; k <= m; ++k) q(k) = a(k) * s.value(k) * (2.0 * k + 1.0);
  return q;
}

Poly q2_of(const AmplifiedSeries& s, int m) {
  if (m < 1) return Poly::Zero(1);
  const Eigen::VectorXd a = taylor_coefficients(m);
  Poly q = Poly::Zero(m);
  for (int k = 1; k <= m; ++k) q(k - 1) = a(k) * s.value(k) * (2.0 * k + 1.0) * (2.0 * k);
  return q;
}

std::vector<double> g_roots(const Poly& q, double g_max, double grid_step) {
  const RootSearch rs = sign_change_roots(q, 1.0, g_max * g_max, 2.0 * grid_step);
  std::vector<double> out;
  for (double u : rs.roots) out.push_back(std::sqrt(u));
  return out;
}

}  // namespace

GSelection select_g(const AmplifiedSeries& s, int m, const GPolicy& policy) {
  const Poly p = mitigation_polynomial(s, m);
  GSelection sel;
  GDiagnostics& d = sel.diagnostics;
  d.g_max = policy.resolved_g_max(m);
  if (!(d.g_max > 1.0)) throw ValidationError("g_max must exceed 1");
  if (!(policy.grid_step > 0.0)) throw ValidationError("grid step must be positive");

  const CoefficientVector c1 = coefficients(m, 1.0);
  d.stderr_at_1 = mitigate_series(s, c1).error;
  d.epsilon = policy.plateau_tolerance > 0.0 ? policy.plateau_tolerance
                                             : std::max(10.0 * d.stderr_at_1, 1e-4);

  const Poly q1 = q1_of(s, m);
  const Poly q2 = q2_of(s, m);
  d.extremum_candidates = g_roots(q1, d.g_max, policy.grid_step);
  d.inflection_candidates = m >= 1 ? g_roots(q2, d.g_max, policy.grid_step) : std::vector<double>{};

  d.curve = mitigated_vs_g_curve(s, m, 1.0, d.g_max, policy.grid_step);
  const double p1 = poly_eval(p, 1.0);
  const double window = 1.0 + policy.plateau_width;
  for (const auto& [g, v] : d.curve) {
    const double dv = std::abs(v - p1);
    d.total_variation = std::max(d.total_variation, dv);
    if (g <= window + 1e-12) d.plateau_variation = std::max(d.plateau_variation, dv);
  }
  for (double g : d.extremum_candidates)
    if (g <= window) d.plateau_variation = std::max(d.plateau_variation, std::abs(poly_eval(p, g) - p1));
  d.plateau_variation = std::max(d.plateau_variation, std::abs(poly_eval(p, window) - p1));

  if (d.plateau_variation <= d.epsilon) {
    sel.g = 1.0;
    sel.method = GMethod::PlateauStart;
    d.note = "curve flat near g = 1";
    return sel;
  }
  if (!d.extremum_candidates.empty()) {
    sel.g = d.extremum_candidates.front();
    sel.method = GMethod::Extremum;
    d.residual = std::abs(poly_eval(q1, sel.g * sel.g));
    return sel;
  }
  if (!d.inflection_candidates.empty()) {
    sel.g = d.inflection_candidates.front();
    sel.method = GMethod::Inflection;
    d.residual = std::abs(sel.g * poly_eval(q2, sel.g * sel.g));
    return sel;
  }
  sel.g = 1.0;
  sel.method = GMethod::TaylorFallback;
  const double flat = 0.05 * std::abs(p1) + d.epsilon;
  d.note = d.total_variation <= flat ? "already mitigated: curve nearly flat up to g_max"
                                     : "order too low: curve varies strongly without extremum or inflection";
  return sel;
}

AnalyticG parse_analytic_g(const std::string& name) {
  if (name == "eq") return AnalyticG::Eq;
  if (name == "inv_sqrt" || name == "inv-sqrt") return AnalyticG::InvSqrt;
  if (name == "midpoint") return AnalyticG::Midpoint;
  if (name == "det") return AnalyticG::Det;
  if (name == "gbar") return AnalyticG::GBar;
  throw ValidationError("unknown analytic g mode '" + name + "'");
}

double analytic_g(AnalyticG mode, double s_min, std::optional<int> m, const Superoperator* n_op) {
  if (!(s_min > 0.0) || s_min > 1.0) throw ValidationError("s_min must lie in (0, 1]");
  switch (mode) {
    case AnalyticG::Eq: return std::sqrt(2.0 / (s_min * s_min + 1.0));
    case AnalyticG::InvSqrt: return 1.0 / std::sqrt(s_min);
    case AnalyticG::Midpoint: return 2.0 / (1.0 + s_min);
    case AnalyticG::GBar: {
      if (!m || *m < 0) throw ValidationError("gbar needs a non-negative order m");
      const double r = std::pow(s_min, 1.0 / (*m + 1.0));
      return std::sqrt((1.0 + r) / (s_min * s_min + r));
    }
    case AnalyticG::Det: {
      if (!n_op) throw ValidationError("det mode needs the noise superoperator");
      Eigen::PartialPivLU<CMatrix> lu(n_op->matrix());
      const auto diag = lu.matrixLU().diagonal();
      double log_det = 0.0;
      for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const double a = std::abs(diag(i));
        if (!(a > 0.0)) throw NumericalError("noise superoperator is singular");
        log_det += std::log(a);
      }
      return std::exp(-log_det / static_cast<double>(diag.size()));
    }
  }
  return 1.0;
}

}  // namespace vns
