#pragma once

#include <span>
#include <vector>

#include "nqweb/errors.hpp"
#include "nqweb/polynomial.hpp"
#include "nqweb/rational.hpp"
#include "nqweb/rng.hpp"

namespace nqweb {

/// Points closer than this to the singular hyperplane sum(x) + a = 0 are
/// rejected by samplers and refused by evaluation.
inline constexpr double kSingularEps = 1e-6;

/// Local n-quasigroup of the rational family
///
///   F(x_1, ..., x_n) = (f_1(x_1) + ... + f_n(x_n) + A) / (x_1 + ... + x_n + a)
///
/// with exact-rational polynomial f_i and exact constants A, a. Immutable
/// after construction; all member functions are pure and re-entrant.
class RationalQuasigroup {
 public:
  RationalQuasigroup(int n, std::vector<Polynomial> funcs, Rational A = 0,
                     Rational a = 0);

  int arity() const { return n_; }
  const std::vector<Polynomial>& funcs() const { return funcs_; }
  /// i is 1-based throughout, matching the block/triple index convention.
  const Polynomial& func(int i) const { return funcs_[static_cast<std::size_t>(i - 1)]; }
  const Rational& numerator_constant() const { return A_; }
  const Rational& denominator_constant() const { return a_; }

  double eval(std::span<const double> p) const;
  Rational eval(std::span<const Rational> p) const;

  /// F_i = (f_i'(x_i) * S - G) / S^2 with S = sum(x) + a, G = sum(f) + A.
  double first_partial(int i, std::span<const double> p) const;
  Rational first_partial(int i, std::span<const Rational> p) const;

  /// F_ij = (-(f_i' + f_j') * S + 2G) / S^3 for i != j,
  /// F_ii = f_i'' / S - 2 (f_i' * S - G) / S^3.
  double second_partial(int i, int j, std::span<const double> p) const;
  Rational second_partial(int i, int j, std::span<const Rational> p) const;

  /// Equivalent instance with A = a = 0: x_n absorbs the shift and f_n
  /// becomes f_n(x - a) + A. Classification is invariant under this map;
  /// evaluations correspond via x_n -> x_n + a.
  RationalQuasigroup isotopy_normalize() const;

  /// Indices i whose partial-derivative numerator
  /// f_i'(x_i) * (sum x + a) - (sum f + A), expanded exactly, is the zero
  /// polynomial. Nonempty means the equation is not solvable in those slots
  /// and the instance is not a local n-quasigroup.
  std::vector<int> degenerate_indices() const;

  bool is_solvable() const { return degenerate_indices().empty(); }

  /// Instance with the variables relabelled: slot perm[i-1] of the result
  /// gets f_i. perm is a 1-based permutation of 1..n.
  RationalQuasigroup permuted(std::span<const int> perm) const;

  /// S = sum(x) + a; |S| below kSingularEps counts as singular.
  double denominator(std::span<const double> p) const;
  Rational denominator(std::span<const Rational> p) const;

  /// Default sampling box: [-2, 2]^n, shifted by +5 per coordinate when
  /// a = 0 so the box clears the singular hyperplane through the origin.
  Box default_box() const;

  bool operator==(const RationalQuasigroup&) const = default;

 private:
  int n_;
  std::vector<Polynomial> funcs_;
  Rational A_;
  Rational a_;
};

/// Draws a point uniformly from the box, rejecting the kSingularEps
/// neighbourhood of the singular hyperplane. Throws SingularBoxError once
/// the retry cap is hit.
std::vector<double> sample_regular_point(const RationalQuasigroup& q, const Box& box,
                                         SplitMix64& rng);

}  // namespace nqweb
