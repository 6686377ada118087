#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "nqweb/errors.hpp"
#include "nqweb/rational.hpp"

namespace nqweb {

/// Exact-coefficient univariate polynomial, stored ascending by degree
/// (coeffs()[k] multiplies x^k). The empty coefficient vector is the zero
/// polynomial; otherwise the top coefficient is nonzero.
class Polynomial {
 public:
  static constexpr int kDefaultMaxDegree = 16;

  Polynomial() = default;  // zero polynomial

  explicit Polynomial(std::vector<Rational> coeffs, int max_degree = kDefaultMaxDegree)
      : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    if (degree() > max_degree)
      throw Error("polynomial degree " + std::to_string(degree()) +
                  " exceeds the maximum of " + std::to_string(max_degree));
  }

  static Polynomial constant(Rational c) { return Polynomial({std::move(c)}); }

  // c*x + d
  static Polynomial linear(Rational c, Rational d = 0) {
    return Polynomial({std::move(d), std::move(c)});
  }

  static Polynomial monomial(int degree, Rational c = 1) {
    std::vector<Rational> v(static_cast<std::size_t>(degree) + 1, Rational(0));
    v.back() = std::move(c);
    return Polynomial(std::move(v));
  }

  bool is_zero() const { return coeffs_.empty(); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const std::vector<Rational>& coeffs() const { return coeffs_; }

  Rational coeff(int k) const {
    if (k < 0 || k > degree()) return Rational(0);
    return coeffs_[static_cast<std::size_t>(k)];
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return Polynomial();
    std::vector<Rational> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
      d[k - 1] = coeffs_[k] * static_cast<int>(k);
    return Polynomial(std::move(d));
  }

  /// Horner evaluation; exact for Rational arguments.
  template <class T>
  T eval(const T& x) const {
    T v(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      v = v * x + convert<T>(*it);
    return v;
  }

  /// One Horner pass producing (f(x), f'(x), f''(x)).
  template <class T>
  std::array<T, 3> eval_jet(const T& x) const {
    T v(0), d1(0), d2(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      d2 = d2 * x + d1 * 2;
      d1 = d1 * x + v;
      v = v * x + convert<T>(*it);
    }
    return {v, d1, d2};
  }

  /// f(x + s) by exact synthetic division.
  Polynomial shift(const Rational& s) const {
    if (is_zero() || s == 0) return *this;
    std::vector<Rational> c = coeffs_;
    const std::size_t d = c.size() - 1;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = d - 1; j + 1 > i; --j) c[j] += s * c[j + 1];
    return Polynomial(std::move(c));
  }

  /// (c, d) with f = c*x + d, present iff degree <= 1.
  std::optional<std::pair<Rational, Rational>> linear_slope() const {
    if (degree() > 1) return std::nullopt;
    return std::make_pair(coeff(1), coeff(0));
  }

  Polynomial operator+(const Polynomial& o) const {
    std::vector<Rational> c(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) c[k] += o.coeffs_[k];
    return Polynomial(std::move(c));
  }

  Polynomial operator-(const Polynomial& o) const {
    std::vector<Rational> c(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) c[k] -= o.coeffs_[k];
    return Polynomial(std::move(c));
  }

  bool operator==(const Polynomial&) const = default;

 private:
  template <class T>
  static T convert(const Rational& r) {
    if constexpr (std::is_same_v<T, double>) {
      return to_double(r);
    } else {
      return T(r);
    }
  }

  std::vector<Rational> coeffs_;
};

}  // namespace nqweb
