#include "nqweb/reducibility.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "nqweb/gallery.hpp"
#include "nqweb/multipoly.hpp"
#include "nqweb/verification.hpp"
#include "support/finite_diff.hpp"

using nqweb::Classification;
using nqweb::ConditionTriple;
using nqweb::Polynomial;
using nqweb::Rational;
using nqweb::RationalQuasigroup;
using nqweb::ReducibilityStructure;
using nqweb::Verdict;

namespace {

std::vector<Rational> rat_point(std::initializer_list<long long> xs) {
  std::vector<Rational> p;
  for (long long x : xs) p.emplace_back(x);
  return p;
}

std::set<ConditionTriple> triple_set(const std::vector<ConditionTriple>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("conditions: flat 2-block emits (a,b,p) against every outside index") {
  const auto s = ReducibilityStructure::parse("[[1,2],3,4]");
  s.validate(4);
  CHECK(triple_set(s.conditions()) ==
        std::set<ConditionTriple>{{1, 2, 3}, {1, 2, 4}});
}

TEST_CASE("conditions: two disjoint blocks") {
  const auto s = ReducibilityStructure::parse("[[1,2],[3,4,5],6]");
  s.validate(6);
  std::set<ConditionTriple> expected;
  for (int p : {3, 4, 5, 6}) expected.insert({1, 2, p});
  for (int a : {3, 4, 5})
    for (int b : {3, 4, 5})
      if (a < b)
        for (int sigma : {1, 2, 6}) expected.insert({a, b, sigma});
  CHECK(triple_set(s.conditions()) == expected);
}

TEST_CASE("conditions: nested blocks add the inner-scope triple") {
  const auto s = ReducibilityStructure::parse("[[[1,2],3],4,5]");
  s.validate(5);
  std::set<ConditionTriple> expected;
  for (int a : {1, 2, 3})
    for (int b : {1, 2, 3})
      if (a < b)
        for (int p : {4, 5}) expected.insert({a, b, p});
  expected.insert({1, 2, 3});
  CHECK(triple_set(s.conditions()) == expected);
}

TEST_CASE("conditions: flat block count is k(k-1)/2 * (n-k)") {
  for (int n = 3; n <= 7; ++n) {
    for (int k = 2; k < n; ++k) {
      std::vector<int> block;
      for (int i = 1; i <= k; ++i) block.push_back(i);
      const auto s = ReducibilityStructure::flat_block(block, n);
      CHECK(static_cast<int>(s.conditions().size()) == k * (k - 1) / 2 * (n - k));
    }
  }
}

TEST_CASE("structure validation rejects bad trees") {
  CHECK_THROWS_AS(ReducibilityStructure::parse("[[1,2],3").validate(3),
                  nqweb::ParseError);
  // index 3 missing
  CHECK_THROWS_AS(ReducibilityStructure::parse("[[1,2],4]").validate(4)
                  , nqweb::InvalidStructureError);
  // duplicate
  CHECK_THROWS_AS(ReducibilityStructure::parse("[[1,2],2,3]").validate(3),
                  nqweb::InvalidStructureError);
  // block equals its scope (k <= n-1 violated)
  CHECK_THROWS_AS(ReducibilityStructure::parse("[[1,2,3]]").validate(3),
                  nqweb::InvalidStructureError);
  // singleton block
  CHECK_THROWS_AS(ReducibilityStructure::parse("[[1],2,3]").validate(3),
                  nqweb::InvalidStructureError);
  CHECK_NOTHROW(ReducibilityStructure::parse("[[1,[2,3]],4]").validate(4));
}

TEST_CASE("residual and factored: frozen example values") {
  const RationalQuasigroup q(
      3, {Polynomial::monomial(2), Polynomial::monomial(3), Polynomial::linear(1)});
  const ConditionTriple t{1, 2, 3};

  CHECK(nqweb::factored_residual(q, t, rat_point({1, 2, 1})) == 60);
  const auto exact = residual(q, t, std::span<const Rational>(rat_point({1, 2, 1})));
  CHECK(exact.raw == Rational(60, 256));  // 0.234375

  const std::vector<double> p{1, 2, 1};
  CHECK(residual(q, t, std::span<const double>(p)).raw ==
        doctest::Approx(0.234375).epsilon(1e-12));

  // isolated zero of the second factor at (1,1,1); not reducibility
  CHECK(nqweb::factored_residual(q, t, rat_point({1, 1, 1})) == 0);

  const auto eq18 = nqweb::example_instance("eq18", 3);
  CHECK(nqweb::factored_residual(eq18, t, rat_point({1, 2, 1})) == -4);
  const auto exact18 = residual(eq18, t, std::span<const Rational>(rat_point({1, 2, 1})));
  CHECK(exact18.raw == Rational(-4, 256));  // -0.015625
}

TEST_CASE("equal slopes kill the residual identically") {
  const RationalQuasigroup q(
      3, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::monomial(2)});
  nqweb::SplitMix64 rng(33);
  const auto box = q.default_box();
  for (int t = 0; t < 20; ++t) {
    const auto p = nqweb::sample_regular_point(q, box, rng);
    const auto rv = residual(q, {1, 2, 3}, std::span<const double>(p));
    CHECK(rv.rho < 1e-12);
  }
  CHECK(nqweb::factored_residual(q, {1, 2, 3}, rat_point({5, 7, 11})) == 0);
}

TEST_CASE("property: residual times S^4 equals the factored form exactly") {
  nqweb::SplitMix64 rng(34);
  nqweb::InstanceGenConfig gen;
  int done = 0;
  while (done < 300) {
    const auto q = nqweb::random_instance(rng, gen, (done & 1) != 0, nullptr, nullptr);
    std::vector<Rational> p;
    for (int i = 0; i < q.arity(); ++i)
      p.emplace_back(static_cast<long long>(rng.below(17)) - 8,
                     1 + static_cast<long long>(rng.below(4)));
    const Rational S = q.denominator(std::span<const Rational>(p));
    if (S == 0 || std::abs(nqweb::to_double(S)) < nqweb::kSingularEps) continue;
    const int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    int b = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    if (b == a) b = (b % q.arity()) + 1;
    int pp = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    while (pp == a || pp == b) pp = (pp % q.arity()) + 1;
    const ConditionTriple t{std::min(a, b), std::max(a, b), pp};
    const auto exact = residual(q, t, std::span<const Rational>(p));
    const Rational factored = nqweb::factored_residual(q, t, std::span<const Rational>(p));
    CHECK(exact.raw * S * S * S * S == factored);
    ++done;
  }
}

TEST_CASE("classify: gallery and fixed instances") {
  CHECK(classify(nqweb::example_instance("eq18", 3)).verdict == Verdict::Irreducible);
  CHECK(classify(nqweb::example_instance("eq18", 5)).verdict == Verdict::Irreducible);
  CHECK(classify(nqweb::example_instance("circles", 2)).verdict == Verdict::Irreducible);
  CHECK(classify(nqweb::example_instance("spheres", 5)).verdict == Verdict::Irreducible);

  // f = (3x, 3x, x^2): block {1,2} with slope 3
  const RationalQuasigroup planted(
      3, {Polynomial::linear(3), Polynomial::linear(3), Polynomial::monomial(2)});
  const Classification c = classify(planted);
  REQUIRE(c.verdict == Verdict::Reducible);
  REQUIRE(c.blocks.size() == 1);
  CHECK(c.blocks[0].indices == std::vector<int>{1, 2});
  CHECK(c.blocks[0].slope == 3);

  // affine intercepts do not split a block
  const RationalQuasigroup affine(
      3, {Polynomial::linear(2, 1), Polynomial::linear(2, 5), Polynomial::monomial(3)});
  const Classification ca = classify(affine);
  REQUIRE(ca.verdict == Verdict::Reducible);
  REQUIRE(ca.blocks.size() == 1);
  CHECK(ca.blocks[0].indices == std::vector<int>{1, 2});
  CHECK(ca.blocks[0].slope == 2);
  CHECK(ca.blocks[0].intercepts == std::vector<Rational>{1, 5});

  // all linear with one slope and A = a = 0: degenerate
  const RationalQuasigroup degenerate(
      3, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::linear(2)});
  const Classification cd = classify(degenerate);
  CHECK(cd.verdict == Verdict::NotAQuasigroup);
  CHECK(cd.degenerate == std::vector<int>{1, 2, 3});

  // equal slopes with an offset constant: complete reducibility
  const RationalQuasigroup complete(
      3, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::linear(2, 1)});
  CHECK(classify(complete).verdict == Verdict::CompletelyReducible);

  // two separate blocks
  const RationalQuasigroup two(
      5, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::linear(3),
          Polynomial::linear(3), Polynomial::monomial(2)});
  const Classification c2 = classify(two);
  REQUIRE(c2.verdict == Verdict::Reducible);
  REQUIRE(c2.blocks.size() == 2);
  CHECK(c2.blocks[0].indices == std::vector<int>{1, 2});
  CHECK(c2.blocks[1].indices == std::vector<int>{3, 4});
}

TEST_CASE("property: classification is permutation-equivariant") {
  nqweb::SplitMix64 rng(35);
  nqweb::InstanceGenConfig gen;
  for (int t = 0; t < 60; ++t) {
    std::vector<int> planted;
    Rational slope;
    const auto q = nqweb::random_instance(rng, gen, (t & 1) != 0, &planted, &slope);
    std::vector<int> perm(static_cast<std::size_t>(q.arity()));
    for (int i = 0; i < q.arity(); ++i) perm[static_cast<std::size_t>(i)] = i + 1;
    for (std::size_t k = perm.size(); k > 1; --k)
      std::swap(perm[k - 1], perm[rng.below(k)]);

    const Classification before = classify(q);
    const Classification after = classify(q.permuted(perm));
    CHECK(before.verdict == after.verdict);
    REQUIRE(before.blocks.size() == after.blocks.size());

    // blocks must map through the permutation (as index sets per slope)
    for (const auto& block : before.blocks) {
      std::vector<int> mapped;
      for (int i : block.indices)
        mapped.push_back(perm[static_cast<std::size_t>(i - 1)]);
      std::sort(mapped.begin(), mapped.end());
      const bool found = std::any_of(
          after.blocks.begin(), after.blocks.end(), [&](const nqweb::SlopeBlock& g) {
            return g.indices == mapped && g.slope == block.slope;
          });
      CHECK(found);
    }
  }
}

TEST_CASE("property: classification is isotopy-invariant") {
  nqweb::SplitMix64 rng(36);
  nqweb::InstanceGenConfig gen;
  for (int t = 0; t < 60; ++t) {
    const auto q = nqweb::random_instance(rng, gen, (t & 1) != 0, nullptr, nullptr);
    const Classification before = classify(q);
    const Classification after = classify(q.isotopy_normalize());
    CHECK(before.verdict == after.verdict);
    REQUIRE(before.blocks.size() == after.blocks.size());
    for (std::size_t k = 0; k < before.blocks.size(); ++k) {
      CHECK(before.blocks[k].indices == after.blocks[k].indices);
      CHECK(before.blocks[k].slope == after.blocks[k].slope);
    }
  }
}

TEST_CASE("check_structure: sampled verdicts on fixed instances") {
  nqweb::SamplerConfig config;
  config.samples = 64;
  config.tol = 1e-8;
  config.seed = 42;

  const auto eq18 = nqweb::example_instance("eq18", 3);
  const auto fails = check_structure(eq18, ReducibilityStructure::parse("[[1,2],3]"), config);
  CHECK_FALSE(fails.all_hold);

  const RationalQuasigroup planted(
      4, {Polynomial::linear(3), Polynomial::linear(3), Polynomial::monomial(2),
          Polynomial::monomial(3)});
  const auto holds =
      check_structure(planted, ReducibilityStructure::parse("[[1,2],3,4]"), config);
  CHECK(holds.all_hold);
  for (const auto& tr : holds.triples) CHECK(tr.max_rho <= 1e-10);

  const auto spheres = nqweb::example_instance("spheres", 3);
  const auto sphere_check =
      check_structure(spheres, ReducibilityStructure::parse("[[1,2],3]"), config);
  CHECK_FALSE(sphere_check.all_hold);

  CHECK_THROWS_AS(
      check_structure(RationalQuasigroup(3, {Polynomial::linear(1), Polynomial::linear(1),
                                             Polynomial::linear(1)}),
                      ReducibilityStructure::parse("[[1,2],3]"), config),
      nqweb::NotAQuasigroupError);
}

TEST_CASE("check_structure: reports are deterministic for a fixed seed") {
  const auto eq18 = nqweb::example_instance("eq18", 4);
  nqweb::SamplerConfig config;
  config.seed = 7;
  const auto s = ReducibilityStructure::parse("[[1,2],3,4]");
  const auto r1 = check_structure(eq18, s, config);
  const auto r2 = check_structure(eq18, s, config);
  REQUIRE(r1.triples.size() == r2.triples.size());
  for (std::size_t k = 0; k < r1.triples.size(); ++k) {
    CHECK(r1.triples[k].max_rho == r2.triples[k].max_rho);
    CHECK(r1.triples[k].mean_rho == r2.triples[k].mean_rho);
  }
}

TEST_CASE("per-triple substreams: shared triples get identical samples across structures") {
  // The same condition triple inside two different structures must see the
  // same sample stream, so its statistics cannot depend on which other
  // triples were evaluated or in what order.
  const auto q = nqweb::example_instance("eq18", 4);
  nqweb::SamplerConfig config;
  config.seed = 21;
  const auto flat = check_structure(q, ReducibilityStructure::parse("[[1,2],3,4]"), config);
  const auto nested =
      check_structure(q, ReducibilityStructure::parse("[[[1,2],3],4]"), config);
  for (const auto& tf : flat.triples) {
    for (const auto& tn : nested.triples) {
      if (tf.triple == tn.triple) {
        CHECK(tf.max_rho == tn.max_rho);
        CHECK(tf.mean_rho == tn.mean_rho);
      }
    }
  }
  const auto shared = [&](const nqweb::ConditionTriple& t) {
    return std::any_of(nested.triples.begin(), nested.triples.end(),
                       [&](const auto& tn) { return tn.triple == t; });
  };
  CHECK(shared({1, 2, 4}));  // both structures emit this one
}

TEST_CASE("check_structure on a generic map matches the quasigroup route") {
  const auto q = nqweb::example_instance("eq18", 3);
  const auto m = nqweb::GenericMap::from_quasigroup(q);
  nqweb::SamplerConfig config;
  config.seed = 5;
  config.box = nqweb::Box::cube(3, 3.0, 7.0);
  const auto s = ReducibilityStructure::parse("[[1,2],3]");
  const auto via_q = check_structure(q, s, config);
  const auto via_m = check_structure(m, s, config);
  REQUIRE(via_q.triples.size() == via_m.triples.size());
  CHECK(via_q.all_hold == via_m.all_hold);
  for (std::size_t k = 0; k < via_q.triples.size(); ++k)
    CHECK(via_q.triples[k].max_rho ==
          doctest::Approx(via_m.triples[k].max_rho).epsilon(1e-9));
}

TEST_CASE("emit_reduction: composed form reproduces the instance") {
  const RationalQuasigroup q(
      4, {Polynomial::linear(3, 1), Polynomial::linear(3), Polynomial::monomial(2),
          Polynomial::monomial(3)},
      Rational(2), Rational(1));
  const auto form = emit_reduction(q, {1, 2});
  CHECK(form.slope == 3);
  CHECK(form.intercept_sum == 1);
  CHECK(form.rest == std::vector<int>{3, 4});

  nqweb::SplitMix64 rng(37);
  const auto box = q.default_box();
  for (int t = 0; t < 10; ++t) {
    const auto p = nqweb::sample_regular_point(q, box, rng);
    CHECK(testsupport::rel_err(form.eval(p), q.eval(std::span<const double>(p))) < 1e-12);
  }

  CHECK_THROWS_AS(emit_reduction(q, {1, 3}), nqweb::NotReducibleBlockError);
  CHECK_THROWS_AS(emit_reduction(q, {1}), nqweb::NotReducibleBlockError);

  // complete block on an all-affine instance
  const RationalQuasigroup complete(
      3, {Polynomial::linear(2), Polynomial::linear(2), Polynomial::linear(2, 1)});
  const auto whole = emit_reduction(complete, {1, 2, 3});
  const std::vector<double> p{4, 5, 6};
  CHECK(testsupport::rel_err(whole.eval(p), complete.eval(std::span<const double>(p))) <
        1e-12);
  CHECK_FALSE(whole.describe().empty());
}

TEST_CASE("soundness and completeness margins of the sampled check") {
  nqweb::SplitMix64 rng(38);
  nqweb::InstanceGenConfig gen;
  nqweb::SamplerConfig config;
  config.seed = 40;
  for (int t = 0; t < 30; ++t) {
    std::vector<int> planted;
    Rational slope;
    const auto q = nqweb::random_instance(rng, gen, true, &planted, &slope);
    const auto cls = classify(q);

    // classified block pairs: every sampled residual vanishes to 1e-10, and
    // the first factor of the factored form is identically zero as a
    // polynomial in the two block variables
    for (std::size_t x = 0; x < planted.size(); ++x) {
      for (std::size_t y = x + 1; y < planted.size(); ++y) {
        const int i = planted[x], j = planted[y];
        const auto report =
            check_structure(q, ReducibilityStructure::flat_block({i, j}, q.arity()), config);
        for (const auto& tr : report.triples) CHECK(tr.max_rho <= 1e-10);

        const auto da = nqweb::MultiPoly::from_univariate(2, 1, q.func(i).derivative());
        const auto db = nqweb::MultiPoly::from_univariate(2, 2, q.func(j).derivative());
        CHECK((da - db).is_zero());
      }
    }

    // pairs straddling the block boundary: sampling finds a witness with a
    // margin of at least 10x the verdict tolerance
    if (static_cast<int>(planted.size()) < q.arity()) {
      int outside = 1;
      while (std::find(planted.begin(), planted.end(), outside) != planted.end())
        ++outside;
      const int inside = planted.front();
      const auto pair = std::minmax(inside, outside);
      const auto report = check_structure(
          q, ReducibilityStructure::flat_block({pair.first, pair.second}, q.arity()),
          config);
      double witness = 0;
      for (const auto& tr : report.triples) witness = std::max(witness, tr.max_rho);
      CHECK(witness > 10 * config.tol);
      CHECK_FALSE(report.all_hold);
    }
  }
}

TEST_CASE("cross_validate: smoke run agrees and recovers planted blocks") {
  nqweb::CrossValidateConfig config;
  config.trials = 30;
  config.seed = 42;
  const auto report = cross_validate(config);
  CHECK(report.all_agree);
  CHECK(report.disagreements == 0);
  CHECK(report.planted_recovered == report.planted);
  CHECK(report.planted > 0);
  CHECK(report.skipped_unsolvable == 0);
}
