#include "nqweb/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "nqweb/serialize.hpp"

namespace nqweb {

namespace {

Rational random_small_rational(SplitMix64& rng, int max_num, int max_den,
                               bool nonzero = false) {
  while (true) {
    const long long num =
        static_cast<long long>(rng.below(static_cast<std::uint64_t>(2 * max_num + 1))) -
        max_num;
    const long long den = 1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(max_den)));
    if (nonzero && num == 0) continue;
    return Rational(num, den);
  }
}

Polynomial random_polynomial(SplitMix64& rng, int degree) {
  if (degree < 0) return Polynomial();
  std::vector<Rational> coeffs(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k < degree; ++k)
    coeffs[static_cast<std::size_t>(k)] = random_small_rational(rng, 5, 3);
  coeffs[static_cast<std::size_t>(degree)] = random_small_rational(rng, 5, 3, true);
  return Polynomial(std::move(coeffs));
}

}  // namespace

RationalQuasigroup random_instance(SplitMix64& rng, const InstanceGenConfig& config,
                                   bool plant_block, std::vector<int>* planted_indices,
                                   Rational* planted_slope) {
  const int n = config.n_min +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(
                    config.n_max - config.n_min + 1)));
  std::vector<Polynomial> funcs(static_cast<std::size_t>(n));

  if (plant_block) {
    const int block_size =
        2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, n - 2))));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    for (std::size_t k = order.size(); k > 1; --k)
      std::swap(order[k - 1], order[rng.below(k)]);
    std::vector<int> block(order.begin(), order.begin() + block_size);
    std::sort(block.begin(), block.end());

    const Rational slope = random_small_rational(rng, 5, 3, true);
    for (int i : block) {
      const Rational intercept =
          (rng.next() & 1) ? Rational(0) : random_small_rational(rng, 5, 2);
      funcs[static_cast<std::size_t>(i - 1)] = Polynomial::linear(slope, intercept);
    }
    // Degree >= 2 everywhere else keeps the planted block maximal.
    for (int i = 1; i <= n; ++i) {
      if (std::find(block.begin(), block.end(), i) == block.end()) {
        const int degree =
            2 + static_cast<int>(rng.below(
                    static_cast<std::uint64_t>(std::max(1, config.max_degree - 1))));
        funcs[static_cast<std::size_t>(i - 1)] = random_polynomial(rng, degree);
      }
    }
    if (planted_indices) *planted_indices = block;
    if (planted_slope) *planted_slope = slope;
  } else {
    for (int i = 0; i < n; ++i) {
      const int degree =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(config.max_degree + 1)));
      funcs[static_cast<std::size_t>(i)] = random_polynomial(rng, degree);
    }
    if (planted_indices) planted_indices->clear();
    if (planted_slope) *planted_slope = 0;
  }

  Rational A(0), a(0);
  if (config.allow_constants && (rng.next() & 1)) {
    A = random_small_rational(rng, 4, 2);
    a = random_small_rational(rng, 4, 2);
  }
  return RationalQuasigroup(n, std::move(funcs), A, a);
}

CrossValidateReport cross_validate(const CrossValidateConfig& config) {
  CrossValidateReport report;
  report.trials = config.trials;
  for (int trial = 0; trial < config.trials; ++trial) {
    SplitMix64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(trial) * 2 + 1));
    const bool plant = (rng.next() & 1) != 0;
    std::vector<int> planted;
    Rational planted_slope;
    const RationalQuasigroup q =
        random_instance(rng, config.gen, plant, &planted, &planted_slope);
    const Classification cls = classify(q);

    bool flagged = false;
    if (plant) {
      ++report.planted;
      const bool recovered = cls.verdict == Verdict::Reducible &&
                             cls.blocks.size() == 1 &&
                             cls.blocks.front().indices == planted &&
                             cls.blocks.front().slope == planted_slope;
      if (recovered) {
        ++report.planted_recovered;
      } else {
        report.all_agree = false;
        report.disagreeing_specs.push_back(quasigroup_to_json(q));
        flagged = true;
      }
    }

    if (cls.verdict == Verdict::NotAQuasigroup) {
      ++report.skipped_unsolvable;
      continue;
    }

    SamplerConfig sampler;
    sampler.samples = config.samples;
    sampler.tol = config.tol;
    sampler.seed = mix_seed(config.seed, static_cast<std::uint64_t>(trial) * 2);
    bool disagreed = false;
    for (int i = 1; i <= q.arity(); ++i) {
      for (int j = i + 1; j <= q.arity(); ++j) {
        const auto structure = ReducibilityStructure::flat_block({i, j}, q.arity());
        const ResidualReport rr = check_structure(q, structure, sampler);
        ++report.pair_checks;
        if (rr.all_hold != same_block(cls, i, j)) {
          disagreed = true;
          ++report.disagreements;
        }
      }
    }
    if (disagreed) {
      report.all_agree = false;
      if (!flagged) report.disagreeing_specs.push_back(quasigroup_to_json(q));
    }
  }
  report.agreement_pct =
      report.pair_checks == 0
          ? 100.0
          : 100.0 * (report.pair_checks - report.disagreements) / report.pair_checks;
  if (report.planted_recovered != report.planted) report.all_agree = false;
  return report;
}

namespace {

double rel_err(double x, double y) {
  return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

// Central differences on the plain evaluator; the step follows the
// coordinate scale.
double fd_first(const RationalQuasigroup& q, int i, std::vector<double> p) {
  const std::size_t k = static_cast<std::size_t>(i - 1);
  const double h = 1e-4 * std::max(1.0, std::abs(p[k]));
  std::vector<double> hi = p, lo = p;
  hi[k] += h;
  lo[k] -= h;
  return (q.eval(hi) - q.eval(lo)) / (2 * h);
}

double fd_mixed(const RationalQuasigroup& q, int i, int j, std::vector<double> p) {
  const std::size_t ki = static_cast<std::size_t>(i - 1);
  const std::size_t kj = static_cast<std::size_t>(j - 1);
  const double hi = 1e-4 * std::max(1.0, std::abs(p[ki]));
  const double hj = 1e-4 * std::max(1.0, std::abs(p[kj]));
  auto at = [&q, &p, ki, kj](double di, double dj) {
    std::vector<double> s = p;
    s[ki] += di;
    s[kj] += dj;
    return q.eval(s);
  };
  return (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) / (4 * hi * hj);
}

}  // namespace

DerivativeCheckReport check_derivative_oracles(const DerivativeCheckConfig& config) {
  DerivativeCheckReport report;
  report.cases = config.cases;
  for (int c = 0; c < config.cases; ++c) {
    SplitMix64 rng(mix_seed(config.seed ^ 0xD5u, static_cast<std::uint64_t>(c)));
    const RationalQuasigroup q = random_instance(rng, config.gen, false, nullptr, nullptr);
    const GenericMap m = GenericMap::from_quasigroup(q);
    const Box box = q.default_box();
    // FD steps reach ~1e-3 past the point, so keep a wide margin from the
    // singular hyperplane; conditioning of the comparison needs it too.
    std::vector<double> p = sample_regular_point(q, box, rng);
    for (int tries = 0; std::abs(q.denominator(std::span<const double>(p))) < 0.5 && tries < 200;
         ++tries)
      p = sample_regular_point(q, box, rng);
    const int i = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    int j = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q.arity())));
    if (j == i) j = (j % q.arity()) + 1;

    const double closed_i = q.first_partial(i, p);
    const double closed_j = q.first_partial(j, p);
    const double closed_ij = q.second_partial(i, j, p);
    const Jet2 jet = m.jet_eval(p, i, j);

    report.max_rel_closed_vs_jet = std::max({report.max_rel_closed_vs_jet,
                                             rel_err(closed_i, jet.di),
                                             rel_err(closed_j, jet.dj),
                                             rel_err(closed_ij, jet.dij)});
    report.max_rel_vs_fd = std::max({report.max_rel_vs_fd,
                                     rel_err(closed_i, fd_first(q, i, p)),
                                     rel_err(closed_j, fd_first(q, j, p)),
                                     rel_err(closed_ij, fd_mixed(q, i, j, p)),
                                     rel_err(jet.dij, fd_mixed(q, i, j, p))});
  }
  report.pass = report.max_rel_closed_vs_jet <= config.tol_closed_vs_jet &&
                report.max_rel_vs_fd <= config.tol_vs_fd;
  return report;
}

FactorizationCheckReport check_factorization_identity(
    const FactorizationCheckConfig& config) {
  FactorizationCheckReport report;
  report.cases = config.cases;
  int done = 0;
  SplitMix64 rng(mix_seed(config.seed ^ 0xFACu, 1));
  while (done < config.cases) {
    const RationalQuasigroup q = random_instance(rng, config.gen, (done & 1) != 0,
                                                 nullptr, nullptr);
    const std::vector<double> p = sample_regular_point(q, q.default_box(), rng);
    const double S = q.denominator(std::span<const double>(p));
    if (std::abs(S) < 0.5) continue;
    const int n = q.arity();
    const int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int b = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (b == a) b = (b % n) + 1;
    int pp = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    while (pp == a || pp == b) pp = (pp % n) + 1;
    const ConditionTriple t{std::min(a, b), std::max(a, b), pp};
    ++done;

    const double lhs = residual(q, t, std::span<const double>(p)).raw * S * S * S * S;
    // factored route, evaluated directly in doubles
    double G = to_double(q.numerator_constant());
    for (int i = 1; i <= n; ++i)
      G += q.func(i).eval(p[static_cast<std::size_t>(i - 1)]);
    auto dfi = [&q, &p](int i) {
      return q.func(i).eval_jet(p[static_cast<std::size_t>(i - 1)])[1];
    };
    const double rhs = (dfi(t.a) - dfi(t.b)) * (dfi(t.p) * S - G);
    report.max_rel = std::max(report.max_rel, rel_err(lhs, rhs));
  }
  report.pass = report.max_rel <= config.tol;
  return report;
}

VerifyReport verify(const VerifyConfig& config) {
  VerifyReport report;
  report.cross = cross_validate(config.cross);
  report.derivative = check_derivative_oracles(config.derivative);
  report.factorization = check_factorization_identity(config.factorization);
  report.all_pass =
      report.cross.all_agree && report.derivative.pass && report.factorization.pass;
  if (config.cross.trials == 0) {
    report.warning = "no cross-validation trials requested; vacuous pass";
  }
  return report;
}

std::string verify_report_to_json(const VerifyReport& report) {
  nlohmann::json cross = {{"trials", report.cross.trials},
                          {"pair_checks", report.cross.pair_checks},
                          {"disagreements", report.cross.disagreements},
                          {"planted", report.cross.planted},
                          {"planted_recovered", report.cross.planted_recovered},
                          {"skipped_unsolvable", report.cross.skipped_unsolvable},
                          {"agreement_pct", report.cross.agreement_pct},
                          {"all_agree", report.cross.all_agree},
                          {"disagreeing_specs", report.cross.disagreeing_specs}};
  nlohmann::json derivative = {
      {"cases", report.derivative.cases},
      {"max_rel_closed_vs_jet", report.derivative.max_rel_closed_vs_jet},
      {"max_rel_vs_fd", report.derivative.max_rel_vs_fd},
      {"pass", report.derivative.pass}};
  nlohmann::json factorization = {{"cases", report.factorization.cases},
                                  {"max_rel", report.factorization.max_rel},
                                  {"pass", report.factorization.pass}};
  nlohmann::json j = {{"cross_validate", cross},
                      {"derivative_checks", derivative},
                      {"factorization_identity", factorization},
                      {"all_pass", report.all_pass}};
  if (!report.warning.empty()) j["warning"] = report.warning;
  return j.dump();
}

}  // namespace nqweb
