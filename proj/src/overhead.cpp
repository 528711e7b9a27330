#include "vns/overhead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vns/errors.hpp"
#include "vns/quadrature.hpp"

namespace vns {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_order(int m) {
  if (m < 0) throw ValidationError("mitigation order must be non-negative");
}

// int_a^b (1 - t^2)^m dt
double int_minus(int m, double a, double b) {
  return integrate_poly([m](double t) { return std::pow(1.0 - t * t, m); }, a, b, 2 * m);
}

// int_0^g (1 + t^2)^m dt
double int_plus(int m, double g) {
  return integrate_poly([m](double t) { return std::pow(1.0 + t * t, m); }, 0.0, g, 2 * m);
}

}  // namespace

double taylor_norm(int m) {
  check_order(m);
  return 0.5 * std::sqrt(kPi) * std::exp(std::lgamma(m + 1.0) - std::lgamma(m + 1.5));
}

double mitigation_defect(int m, double s) {
  check_order(m);
  if (s < 0.0) return 2.0 - mitigation_defect(m, -s);
  const double z = taylor_norm(m);
  if (s <= 1.0) return int_minus(m, s, 1.0) / z;
  return -int_minus(m, 1.0, s) / z;
}

double mitigation_function(int m, double s) {
  check_order(m);
  if (s < 0.0) return -mitigation_function(m, -s);
  if (s <= 1.0) return int_minus(m, 0.0, s) / taylor_norm(m);
  return 1.0 - mitigation_defect(m, s);
}

double mitigation_function_sum(int m, double s) {
  const Eigen::VectorXd a = taylor_coefficients(m);
  double acc = 0.0, sp = s;
  for (int k = 0; k <= m; ++k) {
    acc += a(k) * sp;
    sp *= s * s;
  }
  return acc;
}

double infidelity(int m, double s_min, double g) {
  if (!(s_min > 0.0) || s_min > 1.0) throw ValidationError("s_min must lie in (0, 1]");
  if (!(g >= 1.0)) throw ValidationError("g must be >= 1");
  if (g == 1.0) return mitigation_defect(m, s_min);
  return std::max(std::abs(mitigation_defect(m, g * s_min)), std::abs(mitigation_defect(m, g)));
}

double gamma_overhead(int m, double g) {
  check_order(m);
  if (!(g > 0.0)) throw ValidationError("g must be positive");
  return int_plus(m, g) / taylor_norm(m);
}

double avg_depth(int m, double g) {
  check_order(m);
  if (!(g > 0.0)) throw ValidationError("g must be positive");
  return g * std::pow(1.0 + g * g, m) / int_plus(m, g);
}

double g_eq(double s_min) {
  if (!(s_min > 0.0) || s_min > 1.0) throw ValidationError("s_min must lie in (0, 1]");
  return std::sqrt(2.0 / (s_min * s_min + 1.0));
}

// ---------------------------------------------------------------------------

int Scheme::layers() const noexcept {
  switch (tag) {
    case SchemeTag::Taylor1L:
    case SchemeTag::VNS1L: return 1;
    case SchemeTag::Taylor2L:
    case SchemeTag::VNS2L: return 2;
    case SchemeTag::VNS3L: return 3;
  }
  return 1;
}

bool Scheme::vns() const noexcept {
  return tag == SchemeTag::VNS1L || tag == SchemeTag::VNS2L || tag == SchemeTag::VNS3L;
}

const char* to_string(SchemeTag tag) {
  switch (tag) {
    case SchemeTag::Taylor1L: return "taylor1l";
    case SchemeTag::VNS1L: return "vns1l";
    case SchemeTag::Taylor2L: return "taylor2l";
    case SchemeTag::VNS2L: return "vns2l";
    case SchemeTag::VNS3L: return "vns3l";
  }
  return "taylor1l";
}

SchemeTag parse_scheme(const std::string& name) {
  std::string n;
  for (char c : name)
    if (c != '-' && c != '_') n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (SchemeTag t : all_schemes())
    if (n == to_string(t)) return t;
  throw ValidationError("unknown scheme '" + name + "'");
}

std::vector<SchemeTag> all_schemes() {
  return {SchemeTag::Taylor1L, SchemeTag::VNS1L, SchemeTag::Taylor2L, SchemeTag::VNS2L,
          SchemeTag::VNS3L};
}

OverheadReport runtime_overhead(const Scheme& scheme, double s_min_tot) {
  if (!(s_min_tot > 0.0) || s_min_tot > 1.0) throw ValidationError("s_min_tot must lie in (0, 1]");
  check_order(scheme.m);
  OverheadReport r;
  r.scheme = scheme;
  const int layers = scheme.layers();
  r.s_layer = std::pow(s_min_tot, 1.0 / layers);
  r.g = scheme.vns() ? g_eq(r.s_layer) : 1.0;
  const double gamma = gamma_overhead(scheme.m, r.g);
  r.gamma2 = std::pow(gamma, 2 * layers);
  if (layers == 1) {
    r.infidelity = infidelity(scheme.m, r.s_layer, r.g);
    r.avg_depth = avg_depth(scheme.m, r.g);
  } else {
    r.infidelity = layers * infidelity(scheme.m, r.s_layer, r.g);
    r.avg_depth = std::max(scheme.m, 1);
  }
  r.runtime = r.gamma2 * r.avg_depth;
  r.benign = s_min_tot >= 0.5;
  return r;
}

Asymptotics asymptotics(int m, double s_min, double g) {
  if (m < 1) throw ValidationError("asymptotic forms need m >= 1");
  if (!(s_min > 0.0) || s_min > 1.0) throw ValidationError("s_min must lie in (0, 1]");
  if (!(g >= 1.0)) throw ValidationError("g must be >= 1");
  auto term = [m](double x) {
    return std::pow(std::abs(1.0 - x * x), m + 1) / (std::sqrt(kPi * m) * x);
  };
  Asymptotics a;
  a.infidelity = g == 1.0 ? term(s_min) : std::max(term(g * s_min), term(g));
  a.gamma2m = std::pow(1.0 + g * g, 2 * m + 2) / (kPi * g * g);
  return a;
}

double slope(SchemeTag tag, double s_min_tot) {
  if (!(s_min_tot > 0.0) || s_min_tot >= 1.0) throw ValidationError("s_min_tot must lie in (0, 1)");
  const Scheme sc{tag, 0};
  const int layers = sc.layers();
  const double s = std::pow(s_min_tot, 1.0 / layers);
  if (!sc.vns()) return 2.0 * layers * std::log(2.0) / std::log(1.0 - s * s);
  const double x = 2.0 / (s * s + 1.0);
  return 2.0 * layers * std::log(1.0 + x) / std::log(x - 1.0);
}

double runtime_at_target(SchemeTag tag, double s_min_tot, double target, int m_max) {
  double prev_i = 0.0, prev_r = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const OverheadReport r = runtime_overhead({tag, m}, s_min_tot);
    if (r.infidelity <= target) {
      if (m == 0) return r.runtime;
      const double t = (std::log(target) - std::log(prev_i)) / (std::log(r.infidelity) - std::log(prev_i));
      return std::exp(std::log(prev_r) + t * (std::log(r.runtime) - std::log(prev_r)));
    }
    prev_i = r.infidelity;
    prev_r = r.runtime;
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

bool fewer_layers_dominates(SchemeTag few, SchemeTag many, double s) {
  constexpr int kTargets = 41;
  for (int i = 0; i < kTargets; ++i) {
    const double target = std::pow(10.0, -3.0 + 2.0 * i / (kTargets - 1));
    const double r_few = runtime_at_target(few, s, target);
    const double r_many = runtime_at_target(many, s, target);
    if (std::isinf(r_few) && std::isinf(r_many)) continue;
    if (r_few > r_many * (1.0 + 1e-9)) return false;
  }
  return true;
}

}  // namespace

std::optional<double> crossover(SchemeTag a, SchemeTag b, CrossoverMode mode) {
  const Scheme sa{a, 0}, sb{b, 0};
  if (sa.vns() != sb.vns()) throw ValidationError("crossover needs schemes of the same g family");
  if (sa.layers() == sb.layers()) throw ValidationError("crossover needs different layer counts");

  if (mode == CrossoverMode::Asymptotic) {
    auto diff = [&](double s) { return slope(a, s) - slope(b, s); };
    constexpr double kStep = 0.001;
    double lo = kStep, flo = diff(lo);
    for (double hi = 2 * kStep; hi < 1.0 - 0.5 * kStep; hi += kStep) {
      const double fhi = diff(hi);
      if (flo == 0.0) return lo;
      if ((flo < 0.0) != (fhi < 0.0)) {
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = diff(mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
      lo = hi;
      flo = fhi;
    }
    return std::nullopt;
  }

  const SchemeTag few = sa.layers() < sb.layers() ? a : b;
  const SchemeTag many = few == a ? b : a;
  constexpr double kStep = 0.01;
  double ok = 0.99;
  if (!fewer_layers_dominates(few, many, ok)) return std::nullopt;
  double bad = -1.0;
  for (double s = ok - kStep; s > 0.5 * kStep; s -= kStep) {
    if (!fewer_layers_dominates(few, many, s)) {
      bad = s;
      break;
    }
    ok = s;
  }
  if (bad < 0.0) return std::nullopt;
  while (ok - bad > 1e-4) {
    const double mid = 0.5 * (ok + bad);
    if (fewer_layers_dominates(few, many, mid))
      ok = mid;
    else
      bad = mid;
  }
  return ok;
}

double layer_bounds(const std::vector<double>& values, BoundMode mode) {
  if (values.empty()) throw ValidationError("layer_bounds needs at least one layer");
  switch (mode) {
    case BoundMode::SminProduct: {
      double p = 1.0;
      for (double s : values) {
        if (!(s > 0.0) || s > 1.0) throw ValidationError("per-layer s_min must lie in (0, 1]");
        p *= s;
      }
      return p;
    }
    case BoundMode::Order0: {
      double p = 1.0;
      for (double i : values) {
        if (!(i >= 0.0)) throw ValidationError("per-layer infidelity must be non-negative");
        p *= 1.0 - i;
      }
      return 1.0 - p;
    }
    case BoundMode::Mitigated: {
      double acc = 0.0;
      for (double i : values) {
        if (!(i >= 0.0)) throw ValidationError("per-layer infidelity must be non-negative");
        acc = acc + i + acc * i;
      }
      return acc;
    }
  }
  return 0.0;
}

ShotAllocation shot_allocation(const CoefficientVector& c, long long n_total) {
  const int n = c.order + 1;
  if (n_total < n) throw ValidationError("need at least one shot per amplified circuit");
  ShotAllocation out;
  out.shots.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> rem(static_cast<std::size_t>(n));
  long long used = 0;
  for (int k = 0; k < n; ++k) {
    const double ideal = static_cast<double>(n_total) * std::abs(c.a(k)) / c.gamma;
    out.shots[k] = static_cast<long long>(std::floor(ideal));
    rem[k] = ideal - static_cast<double>(out.shots[k]);
    used += out.shots[k];
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return rem[x] > rem[y]; });
  for (long long i = 0; used < n_total; ++i, ++used) ++out.shots[idx[static_cast<std::size_t>(i % n)]];
  for (int k = 0; k < n; ++k) {
    if (out.shots[k] > 0) continue;
    const auto donor = std::max_element(out.shots.begin(), out.shots.end());
    --*donor;
    out.shots[k] = 1;
  }
  out.variance_factor = c.gamma * c.gamma / static_cast<double>(n_total);
  for (int k = 0; k < n; ++k) out.realized += c.a(k) * c.a(k) / static_cast<double>(out.shots[k]);
  return out;
}

OverheadReport recommend_plan(double s_min_tot, double target_infidelity, int m_max) {
  if (!(target_infidelity > 0.0)) throw ValidationError("target infidelity must be positive");
  std::optional<OverheadReport> best, closest;
  for (SchemeTag tag : all_schemes()) {
    for (int m = 0; m <= m_max; ++m) {
      const OverheadReport r = runtime_overhead({tag, m}, s_min_tot);
      if (!closest || r.infidelity < closest->infidelity) closest = r;
      if (r.infidelity > target_infidelity) continue;
      if (!best) {
        best = r;
        continue;
      }
      const double tol = 1e-12 * best->runtime;
      const bool tie = std::abs(r.runtime - best->runtime) <= tol;
      const bool better_tie = tie && (r.scheme.layers() < best->scheme.layers() ||
                                      (r.scheme.layers() == best->scheme.layers() && r.scheme.m < best->scheme.m));
      if ((!tie && r.runtime < best->runtime) || better_tie) best = r;
    }
  }
  if (best) return *best;
  OverheadReport r = *closest;
  r.reachable = false;
  return r;
}

}  // namespace vns
