#include "vns/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace vns {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Poly trimmed(const Poly& p) {
  Eigen::Index deg = p.size() - 1;
  while (deg > 0 && p(deg) == 0.0) --deg;
  return p.head(deg + 1);
}

int sign_of(const Poly& p, double x) {
  const double v = poly_eval(p, x);
  if (std::abs(v) <= poly_eval_noise(p, x)) return 0;
  return v > 0.0 ? 1 : -1;
}

// Bisection on a bracket with definite signs at both ends.
double bisect(const Poly& p, double a, double b, int sa) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double v = poly_eval(p, mid);
    if (v == 0.0) return mid;
    if ((v > 0.0 ? 1 : -1) == sa)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

// Nearest point left/right of x where the sign is definite, searching outward.
double definite_point(const Poly& p, double x, double step, double limit, int dir, int& sign) {
  double y = x;
  for (int it = 0; it < 60; ++it) {
    sign = sign_of(p, y);
    if (sign != 0) return y;
    y += dir * step;
    step *= 2.0;
    if ((dir < 0 && y < limit) || (dir > 0 && y > limit)) {
      y = limit;
      sign = sign_of(p, y);
      return y;
    }
  }
  return y;
}

}  // namespace

double poly_eval(const Poly& p, double x) {
  double acc = 0.0;
  for (Eigen::Index i = p.size() - 1; i >= 0; --i) acc = acc * x + p(i);
  return acc;
}

double poly_eval_noise(const Poly& p, double x) {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (Eigen::Index i = p.size() - 1; i >= 0; --i) acc = acc * ax + std::abs(p(i));
  return 4.0 * static_cast<double>(p.size() + 1) * kEps * acc;
}

Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return Poly::Zero(1);
  Poly d(p.size() - 1);
  for (Eigen::Index i = 1; i < p.size(); ++i) d(i - 1) = static_cast<double>(i) * p(i);
  return d;
}

Eigen::VectorXcd poly_roots(const Poly& p_in) {
  const Poly p = trimmed(p_in);
  const Eigen::Index deg = p.size() - 1;
  if (deg < 1) return Eigen::VectorXcd(0);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -p(i) / p(deg);
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  return es.eigenvalues();
}

RootSearch sign_change_roots(const Poly& p_in, double lo, double hi, double grid_step) {
  RootSearch out;
  const Poly p = trimmed(p_in);
  if (p.size() < 2 || !(hi > lo)) return out;
  const double scale = std::max(1.0, std::max(std::abs(lo), std::abs(hi)));

  // Cluster companion eigenvalues: multiple roots split into rings of radius ~ eps^(1/k).
  const Eigen::VectorXcd eig = poly_roots(p);
  std::vector<std::vector<std::complex<double>>> clusters;
  const double link = 1e-2 * scale;
  std::vector<bool> used(static_cast<std::size_t>(eig.size()), false);
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::complex<double>> c{eig(i)};
    used[i] = true;
    for (std::size_t q = 0; q < c.size(); ++q)
      for (Eigen::Index j = 0; j < eig.size(); ++j)
        if (!used[j] && std::abs(eig(j) - c[q]) <= link) {
          used[j] = true;
          c.push_back(eig(j));
        }
    clusters.push_back(std::move(c));
  }

  for (const auto& c : clusters) {
    std::complex<double> centre(0.0, 0.0);
    for (const auto& z : c) centre += z;
    centre /= static_cast<double>(c.size());
    double radius = 0.0;
    for (const auto& z : c) radius = std::max(radius, std::abs(z - centre));
    if (std::abs(centre.imag()) > 1e-8 * scale + 0.5 * radius) continue;
    const double x = centre.real();
    const double pad = radius + 1e-9 * scale;
    if (x + pad <= lo || x - pad > hi) continue;
    out.companion.push_back(x);
    int sa = 0, sb = 0;
    const double a = definite_point(p, std::max(lo, x - pad), pad, lo, -1, sa);
    const double b = definite_point(p, std::min(hi, x + pad), pad, hi, +1, sb);
    if (sa == 0 || sb == 0 || sa == sb) continue;
    const double r = bisect(p, a, b, sa);
    if (r > lo && r <= hi) out.roots.push_back(r);
  }

  // Grid cross-check.
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / grid_step)));
  double xa = lo;
  int sa = sign_of(p, xa);
  for (int i = 1; i <= n; ++i) {
    const double xb = i == n ? hi : lo + i * (hi - lo) / n;
    const int sb = sign_of(p, xb);
    if (sb == 0) continue;
    if (sa != 0 && sb != sa) {
      const double r = bisect(p, xa, xb, sa);
      const bool known = std::any_of(out.roots.begin(), out.roots.end(),
                                     [&](double q) { return std::abs(q - r) <= 2.0 * grid_step; });
      if (!known && r > lo) {
        out.grid_only.push_back(r);
        out.roots.push_back(r);
      }
    }
    xa = xb;
    sa = sb;
  }

  std::sort(out.roots.begin(), out.roots.end());
  out.roots.erase(std::unique(out.roots.begin(), out.roots.end(),
                              [&](double x, double y) { return std::abs(x - y) <= 1e-9 * scale; }),
                  out.roots.end());
  std::sort(out.companion.begin(), out.companion.end());
  return out;
}

}  // namespace vns
