#include "nqweb/quasigroup.hpp"

#include <cmath>
#include <string>

#include "nqweb/multipoly.hpp"

namespace nqweb {

namespace {

constexpr int kMaxPointRetries = 1000;

double as_double(const Rational& r) { return to_double(r); }
double as_double(double d) { return d; }

}  // namespace

RationalQuasigroup::RationalQuasigroup(int n, std::vector<Polynomial> funcs,
                                       Rational A, Rational a)
    : n_(n), funcs_(std::move(funcs)), A_(std::move(A)), a_(std::move(a)) {
  if (n_ < 2) throw Error("arity must be at least 2, got " + std::to_string(n_));
  if (static_cast<int>(funcs_.size()) != n_)
    throw Error("expected " + std::to_string(n_) + " functions, got " +
                std::to_string(funcs_.size()));
}

double RationalQuasigroup::denominator(std::span<const double> p) const {
  double s = to_double(a_);
  for (double x : p) s += x;
  return s;
}

Rational RationalQuasigroup::denominator(std::span<const Rational> p) const {
  Rational s = a_;
  for (const Rational& x : p) s += x;
  return s;
}

namespace {

template <class T>
struct JetParts {
  T S;           // sum(x) + a
  T G;           // sum(f) + A
  std::vector<std::array<T, 3>> f;  // (f_i, f_i', f_i'') at x_i
};

template <class T>
JetParts<T> collect(const RationalQuasigroup& q, std::span<const T> p) {
  if (static_cast<int>(p.size()) != q.arity())
    throw Error("point has dimension " + std::to_string(p.size()) +
                ", expected " + std::to_string(q.arity()));
  JetParts<T> parts;
  parts.S = q.denominator(p);
  if (std::abs(as_double(parts.S)) < kSingularEps)
    throw SingularPointError("point lies within " + std::to_string(kSingularEps) +
                             " of the singular hyperplane");
  if constexpr (std::is_same_v<T, double>) {
    parts.G = to_double(q.numerator_constant());
  } else {
    parts.G = q.numerator_constant();
  }
  parts.f.reserve(p.size());
  for (int i = 1; i <= q.arity(); ++i) {
    parts.f.push_back(q.func(i).eval_jet(p[static_cast<std::size_t>(i - 1)]));
    parts.G += parts.f.back()[0];
  }
  return parts;
}

}  // namespace

double RationalQuasigroup::eval(std::span<const double> p) const {
  const auto parts = collect<double>(*this, p);
  return parts.G / parts.S;
}

Rational RationalQuasigroup::eval(std::span<const Rational> p) const {
  const auto parts = collect<Rational>(*this, p);
  return parts.G / parts.S;
}

template <class T>
static T first_partial_impl(const RationalQuasigroup& q, int i, std::span<const T> p) {
  const auto parts = collect<T>(q, p);
  const T& fp = parts.f[static_cast<std::size_t>(i - 1)][1];
  return (fp * parts.S - parts.G) / (parts.S * parts.S);
}

double RationalQuasigroup::first_partial(int i, std::span<const double> p) const {
  return first_partial_impl<double>(*this, i, p);
}

Rational RationalQuasigroup::first_partial(int i, std::span<const Rational> p) const {
  return first_partial_impl<Rational>(*this, i, p);
}

template <class T>
static T second_partial_impl(const RationalQuasigroup& q, int i, int j,
                             std::span<const T> p) {
  const auto parts = collect<T>(q, p);
  const T S2 = parts.S * parts.S;
  const T S3 = S2 * parts.S;
  const auto& fi = parts.f[static_cast<std::size_t>(i - 1)];
  if (i == j) return fi[2] / parts.S - (fi[1] * parts.S - parts.G) * 2 / S3;
  const auto& fj = parts.f[static_cast<std::size_t>(j - 1)];
  return (parts.G * 2 - (fi[1] + fj[1]) * parts.S) / S3;
}

double RationalQuasigroup::second_partial(int i, int j, std::span<const double> p) const {
  return second_partial_impl<double>(*this, i, j, p);
}

Rational RationalQuasigroup::second_partial(int i, int j,
                                            std::span<const Rational> p) const {
  return second_partial_impl<Rational>(*this, i, j, p);
}

RationalQuasigroup RationalQuasigroup::isotopy_normalize() const {
  if (A_ == 0 && a_ == 0) return *this;
  std::vector<Polynomial> funcs = funcs_;
  Polynomial shifted = funcs.back().shift(-a_);
  std::vector<Rational> coeffs = shifted.coeffs();
  if (coeffs.empty()) coeffs.push_back(Rational(0));
  coeffs[0] += A_;
  funcs.back() = Polynomial(std::move(coeffs));
  return RationalQuasigroup(n_, std::move(funcs), 0, 0);
}

std::vector<int> RationalQuasigroup::degenerate_indices() const {
  // sum(x) + a and sum(f) + A expanded once, reused per index.
  MultiPoly S = MultiPoly::constant(n_, a_);
  MultiPoly G = MultiPoly::constant(n_, A_);
  for (int i = 1; i <= n_; ++i) {
    S = S + MultiPoly::variable(n_, i);
    G = G + MultiPoly::from_univariate(n_, i, func(i));
  }
  std::vector<int> degenerate;
  for (int i = 1; i <= n_; ++i) {
    const MultiPoly numerator =
        MultiPoly::from_univariate(n_, i, func(i).derivative()) * S - G;
    if (numerator.is_zero()) degenerate.push_back(i);
  }
  return degenerate;
}

RationalQuasigroup RationalQuasigroup::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != n_) throw Error("permutation size mismatch");
  std::vector<Polynomial> funcs(static_cast<std::size_t>(n_));
  for (int i = 1; i <= n_; ++i)
    funcs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i - 1)] - 1)] = func(i);
  return RationalQuasigroup(n_, std::move(funcs), A_, a_);
}

Box RationalQuasigroup::default_box() const {
  const double shift = (a_ == 0) ? 5.0 : 0.0;
  return Box::cube(n_, -2.0 + shift, 2.0 + shift);
}

std::vector<double> sample_regular_point(const RationalQuasigroup& q, const Box& box,
                                         SplitMix64& rng) {
  if (box.dim() != q.arity()) throw Error("box dimension mismatch");
  std::vector<double> p(static_cast<std::size_t>(q.arity()));
  for (int attempt = 0; attempt < kMaxPointRetries; ++attempt) {
    for (std::size_t k = 0; k < p.size(); ++k)
      p[k] = rng.uniform(box.ranges[k].first, box.ranges[k].second);
    if (std::abs(q.denominator(std::span<const double>(p))) >= kSingularEps) return p;
  }
  throw SingularBoxError("sampling box hugs the singular hyperplane");
}

}  // namespace nqweb
