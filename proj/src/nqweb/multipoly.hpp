#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nqweb/polynomial.hpp"
#include "nqweb/rational.hpp"

namespace nqweb {

/// Sparse exact multivariate polynomial over n variables. Just enough
/// arithmetic to expand solvability numerators and condition factors and
/// decide identical vanishing; not a general computer-algebra type.
class MultiPoly {
 public:
  using Exponents = std::vector<std::uint32_t>;

  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, const Rational& c) {
    MultiPoly p(nvars);
    if (c != 0) p.terms_[Exponents(static_cast<std::size_t>(nvars), 0)] = c;
    return p;
  }

  /// x_var as a polynomial; var is 1-based.
  static MultiPoly variable(int nvars, int var) {
    MultiPoly p(nvars);
    Exponents e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(var - 1)] = 1;
    p.terms_[std::move(e)] = 1;
    return p;
  }

  /// u(x_var) lifted into n variables; var is 1-based.
  static MultiPoly from_univariate(int nvars, int var, const Polynomial& u) {
    MultiPoly p(nvars);
    for (int k = 0; k <= u.degree(); ++k) {
      if (u.coeff(k) == 0) continue;
      Exponents e(static_cast<std::size_t>(nvars), 0);
      e[static_cast<std::size_t>(var - 1)] = static_cast<std::uint32_t>(k);
      p.terms_[std::move(e)] = u.coeff(k);
    }
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  int nvars() const { return nvars_; }

  MultiPoly operator+(const MultiPoly& o) const {
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  MultiPoly operator-(const MultiPoly& o) const {
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
  }

  MultiPoly operator*(const MultiPoly& o) const {
    MultiPoly r(nvars_);
    for (const auto& [ea, ca] : terms_) {
      for (const auto& [eb, cb] : o.terms_) {
        Exponents e(ea.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  bool operator==(const MultiPoly& o) const { return (*this - o).is_zero(); }

 private:
  void add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  int nvars_;
  std::map<Exponents, Rational> terms_;
};

}  // namespace nqweb
