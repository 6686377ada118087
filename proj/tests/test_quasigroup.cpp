#include "nqweb/quasigroup.hpp"

#include <cmath>

#include "doctest.h"
#include "nqweb/gallery.hpp"
#include "nqweb/multipoly.hpp"
#include "nqweb/verification.hpp"
#include "support/finite_diff.hpp"

using nqweb::Polynomial;
using nqweb::Rational;
using nqweb::RationalQuasigroup;

namespace {

RationalQuasigroup squares_cubes_linear() {
  // f = (x^2, x^3, x), A = a = 0
  return RationalQuasigroup(
      3, {Polynomial::monomial(2), Polynomial::monomial(3), Polynomial::linear(1)});
}

std::vector<Rational> rat_point(std::initializer_list<long long> xs) {
  std::vector<Rational> p;
  for (long long x : xs) p.emplace_back(x);
  return p;
}

}  // namespace

TEST_CASE("eval: fixed values and the singular guard") {
  const auto eq18 = nqweb::example_instance("eq18", 3);
  const std::vector<double> ones{1, 1, 1};
  CHECK(eq18.eval(ones) == doctest::Approx(2.0).epsilon(1e-14));

  const auto q = squares_cubes_linear();
  const std::vector<double> p{1, 2, 1};
  CHECK(q.eval(p) == doctest::Approx(2.5).epsilon(1e-14));

  const std::vector<double> singular{1, -2, 1};  // sum = 0 = -a
  CHECK_THROWS_AS(q.eval(singular), nqweb::SingularPointError);

  CHECK(q.eval(rat_point({1, 2, 1})) == Rational(5, 2));
}

TEST_CASE("first_partial: fixed values, exact and floating") {
  const auto q = squares_cubes_linear();
  CHECK(q.first_partial(3, rat_point({1, 2, 1})) == Rational(-3, 8));
  const std::vector<double> p{1, 2, 1};
  CHECK(q.first_partial(3, p) == doctest::Approx(-0.375).epsilon(1e-14));

  const auto eq18 = nqweb::example_instance("eq18", 3);
  CHECK(eq18.first_partial(1, rat_point({1, 1, 1})) == Rational(-1, 3));
}

TEST_CASE("mixed second partial vanishes for equal affine slopes") {
  // f = (2x, 2x): G = 2S when A = a = 0, so F_12 = (-4S + 4S)/S^3 = 0
  const RationalQuasigroup q(2, {Polynomial::linear(2), Polynomial::linear(2)});
  const std::vector<double> p{0.7, 2.1};
  CHECK(q.second_partial(1, 2, p) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(q.second_partial(1, 2, rat_point({3, 5})) == 0);
}

TEST_CASE("partials agree with the finite-difference oracle") {
  nqweb::SplitMix64 rng(101);
  nqweb::InstanceGenConfig gen;
  for (int t = 0; t < 50; ++t) {
    const auto q = nqweb::random_instance(rng, gen, false, nullptr, nullptr);
    auto p = nqweb::sample_regular_point(q, q.default_box(), rng);
    if (std::abs(q.denominator(std::span<const double>(p))) < 0.5) continue;
    auto f = [&q](const std::vector<double>& x) {
      return q.eval(std::span<const double>(x));
    };
    for (int i = 1; i <= q.arity(); ++i) {
      CHECK(testsupport::rel_err(q.first_partial(i, p), testsupport::fd_first(f, p, i)) <
            1e-5);
      for (int j = 1; j <= q.arity(); ++j) {
        CHECK(testsupport::rel_err(q.second_partial(i, j, p),
                                   testsupport::fd_mixed(f, p, i, j)) < 1e-5);
      }
    }
  }
}

TEST_CASE("isotopy_normalize: fixed substitutions") {
  // f = (x^2, x^3, x), A = 4, a = 1: f3 becomes (x - 1) + 4 = x + 3
  const RationalQuasigroup q(
      3, {Polynomial::monomial(2), Polynomial::monomial(3), Polynomial::linear(1)},
      Rational(4), Rational(1));
  const auto normalized = q.isotopy_normalize();
  CHECK(normalized.numerator_constant() == 0);
  CHECK(normalized.denominator_constant() == 0);
  CHECK(normalized.func(1) == Polynomial::monomial(2));
  CHECK(normalized.func(3) == Polynomial::linear(1, 3));

  // A = a = 0 is a fixed point
  const auto plain = squares_cubes_linear();
  CHECK(plain.isotopy_normalize() == plain);

  // f = (x, 2x, x^2), A = a = -1: f3 becomes (x + 1)^2 - 1 = x^2 + 2x
  const RationalQuasigroup ex2(
      3, {Polynomial::linear(1), Polynomial::linear(2), Polynomial::monomial(2)},
      Rational(-1), Rational(-1));
  const auto ex2n = ex2.isotopy_normalize();
  CHECK(ex2n.func(3) == Polynomial({Rational(0), Rational(2), Rational(1)}));
}

TEST_CASE("property: normalized instance evaluates like the original under the shift") {
  nqweb::SplitMix64 rng(102);
  nqweb::InstanceGenConfig gen;
  for (int t = 0; t < 50; ++t) {
    const auto q = nqweb::random_instance(rng, gen, (t & 1) != 0, nullptr, nullptr);
    const auto normalized = q.isotopy_normalize();
    const double a = nqweb::to_double(q.denominator_constant());
    for (int r = 0; r < 10; ++r) {
      std::vector<double> p;
      try {
        p = nqweb::sample_regular_point(q, q.default_box(), rng);
      } catch (const nqweb::SingularBoxError&) {
        break;
      }
      std::vector<double> shifted = p;
      shifted.back() += a;  // x_n -> x_n + a
      double lhs, rhs;
      try {
        lhs = q.eval(std::span<const double>(p));
        rhs = normalized.eval(std::span<const double>(shifted));
      } catch (const nqweb::SingularPointError&) {
        continue;
      }
      CHECK(testsupport::rel_err(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("degenerate_indices: exact solvability decisions") {
  // all f_i = c x_i with A = a = 0: F is constant, not solvable anywhere
  const RationalQuasigroup degenerate(
      3, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::linear(2)});
  CHECK(degenerate.degenerate_indices() == std::vector<int>{1, 2, 3});
  CHECK_FALSE(degenerate.is_solvable());

  // f = (x^2, x): F_1 numerator = x1^2 + 2 x1 x2 - x2 != 0
  const RationalQuasigroup ok(2, {Polynomial::monomial(2), Polynomial::linear(1)});
  CHECK(ok.is_solvable());

  CHECK(nqweb::example_instance("eq18", 3).is_solvable());
  CHECK(nqweb::example_instance("eq18", 6).is_solvable());

  // equal slopes but the constant condition fails: solvable (complete block)
  const RationalQuasigroup shifted(
      3, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::linear(2, 1)});
  CHECK(shifted.is_solvable());

  // equal slopes, intercepts tuned so sum(d) + A = c*a: degenerate again
  const RationalQuasigroup tuned(
      2, {Polynomial::linear(3, 1), Polynomial::linear(3, 2)}, Rational(3), Rational(2));
  CHECK_FALSE(tuned.is_solvable());
}

TEST_CASE("multipoly: arithmetic sanity behind the solvability oracle") {
  using nqweb::MultiPoly;
  const auto x = MultiPoly::variable(2, 1);
  const auto y = MultiPoly::variable(2, 2);
  CHECK((x * y - y * x).is_zero());
  CHECK(((x + y) * (x - y) - (x * x - y * y)).is_zero());
  CHECK_FALSE((x - y).is_zero());
  const auto lifted = MultiPoly::from_univariate(2, 1, Polynomial::monomial(2));
  CHECK((lifted - x * x).is_zero());
}

TEST_CASE("permuted relabels the functions") {
  const auto q = squares_cubes_linear();
  const std::vector<int> perm{2, 3, 1};  // slot perm[i-1] receives f_i
  const auto p = q.permuted(perm);
  CHECK(p.func(2) == q.func(1));
  CHECK(p.func(3) == q.func(2));
  CHECK(p.func(1) == q.func(3));
}

TEST_CASE("construction validates shape") {
  CHECK_THROWS_AS(RationalQuasigroup(1, {Polynomial::linear(1)}), nqweb::Error);
  CHECK_THROWS_AS(RationalQuasigroup(3, {Polynomial::linear(1)}), nqweb::Error);
}
