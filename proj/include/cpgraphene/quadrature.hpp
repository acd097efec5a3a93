#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "cpgraphene/errors.hpp"

namespace cpgraphene::quadrature {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
};

namespace detail {

// 15-point Kronrod abscissae with the embedded 7-point Gauss weights.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += wgk[j] * (f1 + f2);
    resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration over consecutive
/// panels [points[0], points[1]], ..., [points[n-2], points[n-1]]. Bisects
/// the panel with the largest error estimate until
/// error <= max(abs_tol, rel_tol |value|). Throws ConvergenceError when
/// `max_panels` is exhausted.
template <class F>
QuadResult integrate(const F& f, std::span<const double> points, double rel_tol, double abs_tol = 0.0,
                     std::size_t max_panels = 2000) {
  QuadResult out;
  if (points.size() < 2) return out;
  std::priority_queue<detail::Panel> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] == points[i + 1]) continue;
    auto p = detail::gauss_kronrod_15(f, points[i], points[i + 1]);
    heap.push(p);
    total += p.value;
    total_err += p.error;
    out.evaluations += 15;
  }
  if (heap.empty()) return out;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_panels) {
      throw ConvergenceError("adaptive quadrature on [" + std::to_string(points.front()) + ", " +
                             std::to_string(points.back()) + "] did not converge: estimate " +
                             std::to_string(total) + ", error " + std::to_string(total_err) +
                             " after " + std::to_string(heap.size()) + " panels");
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel below resolution
    heap.pop();
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  out.intervals = heap.size();
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  return out;
}

template <class F>
QuadResult integrate(const F& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                     std::size_t max_panels = 2000) {
  const double pts[2] = {a, b};
  return integrate(f, std::span<const double>(pts), rel_tol, abs_tol, max_panels);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
template <class Real = double>
struct GaussLegendreRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;

  explicit GaussLegendreRule(std::size_t n) : nodes(n), weights(n) {
    const Real pi_r = Real(3.14159265358979323846264338327950288L);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
      Real x = std::cos(pi_r * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
      Real dp = 0;
      for (int iter = 0; iter < 100; ++iter) {
        Real p0 = 1, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const Real pk = ((2 * Real(k) - 1) * x * p1 - (Real(k) - 1) * p0) / Real(k);
          p0 = p1;
          p1 = pk;
        }
        if (n == 1) p0 = 1;
        dp = Real(n) * (x * p1 - p0) / (x * x - 1);
        const Real step = p1 / dp;
        x -= step;
        if (std::abs(step) < 4 * std::numeric_limits<Real>::epsilon()) break;
      }
      // Recompute the derivative at the converged node.
      Real p0 = 1, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const Real pk = ((2 * Real(k) - 1) * x * p1 - (Real(k) - 1) * p0) / Real(k);
        p0 = p1;
        p1 = pk;
      }
      dp = Real(n) * (x * p1 - p0) / (x * x - 1);
      const Real w = 2 / ((1 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }

  /// Fixed-rule integral of f over [a, b].
  template <class F>
  Real integrate(const F& f, Real a, Real b) const {
    const Real half = (b - a) / 2, mid = (a + b) / 2;
    Real sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

/// Shared 20-point rule for smooth low-cost corrections.
inline const GaussLegendreRule<double>& gauss_legendre_20() {
  static const GaussLegendreRule<double> rule(20);
  return rule;
}

}  // namespace cpgraphene::quadrature
