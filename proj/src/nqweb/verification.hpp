#pragma once

#include <string>
#include <vector>

#include "nqweb/quasigroup.hpp"
#include "nqweb/reducibility.hpp"

namespace nqweb {

struct InstanceGenConfig {
  int n_min = 3;
  int n_max = 6;
  int max_degree = 4;
  bool allow_constants = true;  // random A, a (zero half the time)
};

/// Draws a random rational-family instance with small rational
/// coefficients. When plant_block is set, a random equal-slope block of
/// size 2..n-1 is installed on a random index subset and every other slot
/// gets degree >= 2, so the planted block is the unique maximal one.
RationalQuasigroup random_instance(SplitMix64& rng, const InstanceGenConfig& config,
                                   bool plant_block, std::vector<int>* planted_indices,
                                   Rational* planted_slope);

struct CrossValidateConfig {
  int trials = 200;
  std::uint64_t seed = 0;
  InstanceGenConfig gen;
  int samples = 64;
  double tol = kDefaultResidualTol;
};

struct CrossValidateReport {
  int trials = 0;
  int pair_checks = 0;
  int disagreements = 0;
  int planted = 0;
  int planted_recovered = 0;
  int skipped_unsolvable = 0;
  double agreement_pct = 100.0;
  bool all_agree = true;
  std::vector<std::string> disagreeing_specs;  // serialized for triage
};

/// Generates random instances (half with planted equal-slope blocks), runs
/// the exact classifier against the sampled condition check on every
/// 2-element block, and reports agreement.
CrossValidateReport cross_validate(const CrossValidateConfig& config);

struct DerivativeCheckConfig {
  int cases = 1000;
  std::uint64_t seed = 0;
  double tol_closed_vs_jet = 1e-10;
  double tol_vs_fd = 1e-5;
  InstanceGenConfig gen;
};

struct DerivativeCheckReport {
  int cases = 0;
  double max_rel_closed_vs_jet = 0;
  double max_rel_vs_fd = 0;
  bool pass = false;
};

/// Pairwise agreement of the closed-form partials, the generic jet
/// propagation, and central finite differences on random instances,
/// points, and direction pairs.
DerivativeCheckReport check_derivative_oracles(const DerivativeCheckConfig& config);

struct FactorizationCheckConfig {
  int cases = 500;
  std::uint64_t seed = 0;
  double tol = kDefaultResidualTol;
  InstanceGenConfig gen;
};

struct FactorizationCheckReport {
  int cases = 0;
  double max_rel = 0;
  bool pass = false;
};

/// The cross-multiplied residual and the factored form divided by S^4 are
/// the same quantity through two different floating routes; their relative
/// gap is pure roundoff, so this is the check that a tolerance below
/// machine precision is expected to fail.
FactorizationCheckReport check_factorization_identity(const FactorizationCheckConfig& config);

struct VerifyConfig {
  CrossValidateConfig cross;
  DerivativeCheckConfig derivative;
  FactorizationCheckConfig factorization;
};

struct VerifyReport {
  CrossValidateReport cross;
  DerivativeCheckReport derivative;
  FactorizationCheckReport factorization;
  bool all_pass = false;
  std::string warning;
};

VerifyReport verify(const VerifyConfig& config);

std::string verify_report_to_json(const VerifyReport& report);

}  // namespace nqweb
