#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration for scalar, complex
// or Eigen-matrix valued integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace specsqueeze::quadrature {

template <typename T>
struct QuadResult {
  T value;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double norm_of(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

// Nodes and weights on [-1, 1]; Gauss points are the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 8> kNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrod{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGauss{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename T, typename F>
Segment<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kKronrod[7];
  T gauss = fc * kGauss[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kNodes[j];
    const T s = f(c - dx) + f(c + dx);
    kron = kron + s * kKronrod[j];
    if (j % 2 == 1) gauss = gauss + s * kGauss[j / 2];
  }
  T value = kron * h;
  const double err = norm_of((kron - gauss) * h);
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over the union of consecutive [breaks[i], breaks[i+1]].
/// Refinement continues until the summed error estimate is below abs_tol
/// or max_intervals is reached; callers decide what residual error is
/// acceptable from the returned estimate.
template <typename T, typename F>
QuadResult<T> integrate(F&& f, const std::vector<double>& breaks, double abs_tol,
                        int max_intervals = 20000) {
  std::priority_queue<detail::Segment<T>> heap;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto seg = detail::gk15<T>(f, breaks[i], breaks[i + 1]);
    total_err += seg.error;
    heap.push(seg);
  }
  int count = static_cast<int>(heap.size());
  while (!heap.empty() && total_err > abs_tol && count < max_intervals) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  QuadResult<T> out{T{}, 0.0, count};
  bool first = true;
  double err = 0.0;
  while (!heap.empty()) {
    const auto& seg = heap.top();
    out.value = first ? seg.value : T(out.value + seg.value);
    first = false;
    err += seg.error;
    heap.pop();
  }
  if (first) out.value = T(f(0.0) * 0.0);
  out.error = err;
  return out;
}

/// Sorted, de-duplicated breakpoints clipped to [lo, hi].
inline std::vector<double> make_breaks(double lo, double hi, std::vector<double> extra) {
  std::vector<double> b{lo, hi};
  for (double x : extra) {
    if (x > lo && x < hi) b.push_back(x);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace specsqueeze::quadrature
