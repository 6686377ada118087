#pragma once

#include <cmath>

#include "nqweb/errors.hpp"

namespace nqweb {

inline constexpr double kJetDivisionEps = 1e-6;

/// Second-order two-direction forward jet: value, the two first partials
/// along the chosen directions, and the one mixed second partial. Sum,
/// product and quotient rules propagate all four slots in a single pass;
/// taking the two directions equal yields the repeated second partial.
/// The direction indices ride along for reporting; arithmetic assumes both
/// operands share them.
struct Jet2 {
  double v = 0, di = 0, dj = 0, dij = 0;
  int i = 0, j = 0;
};

inline Jet2 jet_constant(double c) { return {c, 0, 0, 0}; }

/// Leaf for variable x_k when differentiating along directions (i, j).
inline Jet2 jet_variable(double x, bool along_i, bool along_j) {
  return {x, along_i ? 1.0 : 0.0, along_j ? 1.0 : 0.0, 0.0};
}

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.di + b.di, a.dj + b.dj, a.dij + b.dij};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.di - b.di, a.dj - b.dj, a.dij - b.dij};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.di * b.v + a.v * b.di,
          a.dj * b.v + a.v * b.dj,
          a.dij * b.v + a.di * b.dj + a.dj * b.di + a.v * b.dij};
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (std::abs(b.v) < kJetDivisionEps)
    throw SingularPointError("division by near-zero during jet propagation");
  Jet2 q;
  q.v = a.v / b.v;
  q.di = (a.di - q.v * b.di) / b.v;
  q.dj = (a.dj - q.v * b.dj) / b.v;
  q.dij = (a.dij - q.di * b.dj - q.dj * b.di - q.v * b.dij) / b.v;
  return q;
}

inline Jet2 jet_pow(const Jet2& base, int exponent) {
  Jet2 r = jet_constant(1.0);
  for (int k = 0; k < exponent; ++k) r = r * base;
  return r;
}

}  // namespace nqweb
