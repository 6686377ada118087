#pragma once

// Test-side central-difference oracle. Kept independent of the library's
// own derivative code on purpose: it only drives the plain evaluator.

#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

using RealFn = std::function<double(const std::vector<double>&)>;

inline double fd_first(const RealFn& f, std::vector<double> p, int i) {
  const std::size_t k = static_cast<std::size_t>(i - 1);
  const double h = 1e-4 * std::max(1.0, std::abs(p[k]));
  std::vector<double> hi = p, lo = p;
  hi[k] += h;
  lo[k] -= h;
  return (f(hi) - f(lo)) / (2 * h);
}

inline double fd_mixed(const RealFn& f, std::vector<double> p, int i, int j) {
  const std::size_t ki = static_cast<std::size_t>(i - 1);
  const std::size_t kj = static_cast<std::size_t>(j - 1);
  const double hi = 1e-4 * std::max(1.0, std::abs(p[ki]));
  const double hj = 1e-4 * std::max(1.0, std::abs(p[kj]));
  auto at = [&](double di, double dj) {
    std::vector<double> s = p;
    s[ki] += di;
    s[kj] += dj;
    return f(s);
  };
  if (i == j) {
    return (at(hi, 0) - 2 * f(p) + at(-hi, 0)) / (hi * hi);
  }
  return (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) / (4 * hi * hj);
}

inline double rel_err(double x, double y) {
  return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace testsupport
