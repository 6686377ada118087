#include <cmath>

#include "doctest.h"
#include "nqweb/expr.hpp"
#include "nqweb/gallery.hpp"
#include "nqweb/verification.hpp"
#include "support/finite_diff.hpp"

using nqweb::GenericMap;
using nqweb::Jet2;

TEST_CASE("parse and evaluate the quotient example") {
  const auto m = GenericMap::parse("(/ (+ (pow x1 2) x2) (+ x1 x2))");
  CHECK(m.arity() == 2);
  const std::vector<double> p{2, 1};
  CHECK(m.eval(p) == doctest::Approx((4.0 + 1.0) / 3.0));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(GenericMap::parse("(+ x1 x2"), nqweb::ParseError);
  CHECK_THROWS_AS(GenericMap::parse("(? x1 x2)"), nqweb::ParseError);
  CHECK_THROWS_AS(GenericMap::parse("(+ x1 y2)"), nqweb::ParseError);
  CHECK_THROWS_AS(GenericMap::parse("(pow x1 x2)"), nqweb::ParseError);
  CHECK_THROWS_AS(GenericMap::parse("(+ x1 x2) junk"), nqweb::ParseError);
  CHECK_THROWS_AS(GenericMap::parse("(+ x1 x3)", 2), nqweb::ParseError);
  bool threw = false;
  try {
    GenericMap::parse("(+ x1 @)");
  } catch (const nqweb::ParseError& e) {
    threw = true;
    CHECK(e.position == 6);  // the offending atom
  }
  CHECK(threw);
}

TEST_CASE("jet: product rule example") {
  const auto m = GenericMap::parse("(* x1 x2)");
  const std::vector<double> p{3, 5};
  const Jet2 jet = m.jet_eval(p, 1, 2);
  CHECK(jet.v == doctest::Approx(15));
  CHECK(jet.di == doctest::Approx(5));
  CHECK(jet.dj == doctest::Approx(3));
  CHECK(jet.dij == doctest::Approx(1));
}

TEST_CASE("jet: linear maps have zero mixed partials") {
  const auto m = GenericMap::parse("(+ x1 x2 x3)");
  const std::vector<double> p{0.3, -1.5, 4.0};
  const Jet2 jet = m.jet_eval(p, 1, 2);
  CHECK(jet.dij == doctest::Approx(0));
  CHECK(jet.di == doctest::Approx(1));
}

TEST_CASE("jet on the linear-slope gallery instance matches closed forms") {
  const auto q = nqweb::example_instance("eq18", 3);
  const auto m = GenericMap::from_quasigroup(q);
  const std::vector<double> p{1, 1, 1};
  const Jet2 jet = m.jet_eval(p, 1, 3);
  CHECK(jet.di == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(jet.v == doctest::Approx(2.0));
  CHECK(jet.di == doctest::Approx(q.first_partial(1, p)).epsilon(1e-12));
  CHECK(jet.dij == doctest::Approx(q.second_partial(1, 3, p)).epsilon(1e-12));
}

TEST_CASE("jet guards division by near-zero") {
  const auto m = GenericMap::parse("(/ 1 (+ x1 x2))");
  const std::vector<double> p{1, -1};
  CHECK_THROWS_AS(m.jet_eval(p, 1, 2), nqweb::SingularPointError);
  CHECK_THROWS_AS(m.eval(p), nqweb::SingularPointError);
}

TEST_CASE("pow, unary minus, rational and decimal literals") {
  const auto m = GenericMap::parse("(- (pow x1 3))");
  const std::vector<double> p{2};
  CHECK(m.eval(p) == doctest::Approx(-8));

  const auto r = GenericMap::parse("(* 3/4 x1)");
  CHECK(r.eval(p) == doctest::Approx(1.5));

  const auto d = GenericMap::parse("(+ 0.5 x1)");
  CHECK(d.eval(p) == doctest::Approx(2.5));

  const auto z = GenericMap::parse("(pow x1 0)");
  CHECK(z.eval(p) == doctest::Approx(1));
}

TEST_CASE("property: jets match finite differences on random maps") {
  // Random rational-family instances exercised through their expression
  // encoding; the jet must reproduce FD derivatives of the plain evaluator.
  nqweb::SplitMix64 rng(7);
  nqweb::InstanceGenConfig gen;
  int checked = 0;
  for (int t = 0; t < 60 && checked < 40; ++t) {
    const auto q = nqweb::random_instance(rng, gen, false, nullptr, nullptr);
    const auto m = GenericMap::from_quasigroup(q);
    auto p = nqweb::sample_regular_point(q, q.default_box(), rng);
    if (std::abs(q.denominator(std::span<const double>(p))) < 0.5) continue;
    ++checked;
    auto f = [&m](const std::vector<double>& x) {
      return m.eval(std::span<const double>(x));
    };
    const int i = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    int j = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    const Jet2 jet = m.jet_eval(p, i, j);
    CHECK(testsupport::rel_err(jet.di, testsupport::fd_first(f, p, i)) < 1e-5);
    CHECK(testsupport::rel_err(jet.dj, testsupport::fd_first(f, p, j)) < 1e-5);
    CHECK(testsupport::rel_err(jet.dij, testsupport::fd_mixed(f, p, i, j)) < 1e-5);
  }
  CHECK(checked >= 30);
}

TEST_CASE("repeated-direction jets produce second derivatives") {
  const auto m = GenericMap::parse("(pow x1 3)");
  const std::vector<double> p{2};
  const Jet2 jet = m.jet_eval(p, 1, 1);
  CHECK(jet.v == doctest::Approx(8));
  CHECK(jet.di == doctest::Approx(12));
  CHECK(jet.dij == doctest::Approx(12));  // (x^3)'' = 6x
}

TEST_CASE("prefix round trip re-parses to the same values") {
  const auto m = GenericMap::parse("(/ (+ (pow x1 2) (* 2 x2)) (- x1 x2))");
  const auto round = GenericMap::parse(m.to_prefix_string());
  const std::vector<double> p{1.25, -0.5};
  CHECK(m.eval(p) == doctest::Approx(round.eval(p)).epsilon(1e-15));
}
