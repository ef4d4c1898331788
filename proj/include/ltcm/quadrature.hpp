#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

namespace ltcm {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment kronrod_segment(F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int k = 0; k < 7; ++k) {
    const double dx = half * kKronrodNodes[k];
    const double sum = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[k] * sum;
    if (k % 2 == 1) gauss += kGaussWeights[k / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrate f over [a, b] until the summed error estimate is below
/// abs_tol + rel_tol * |value|, bisecting the worst segment each round.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                                    int max_intervals = 20000) {
  std::priority_queue<detail::Segment> heap;
  // a few initial pieces so oscillatory kernels are sampled before the first estimate
  constexpr int kInitial = 8;
  for (int k = 0; k < kInitial; ++k) {
    const double lo = a + (b - a) * k / kInitial;
    const double hi = k + 1 == kInitial ? b : a + (b - a) * (k + 1) / kInitial;
    heap.push(detail::kronrod_segment(f, lo, hi));
  }
  auto totals = [&heap] {
    double v = 0.0, e = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };
  auto [value, error] = totals();
  int intervals = kInitial;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && intervals < max_intervals) {
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::kronrod_segment(f, worst.a, mid);
    const auto right = detail::kronrod_segment(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    // refresh the running sums now and then to shed accumulated cancellation
    if (intervals % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(value, error) = totals();
  return {value, error, intervals};
}

}  // namespace ltcm
