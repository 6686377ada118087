#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nqweb/expr.hpp"
#include "nqweb/quasigroup.hpp"

namespace nqweb {

/// Floor of the residual normalization denominator.
inline constexpr double kResidualTau = 1e-30;

/// Default verdict tolerance on normalized residuals.
inline constexpr double kDefaultResidualTol = 1e-8;

/// One cross-multiplied reducibility condition
/// F_pa * F_b - F_pb * F_a = 0, canonically a < b, p outside {a, b}.
struct ConditionTriple {
  int a = 0, b = 0, p = 0;
  auto operator<=>(const ConditionTriple&) const = default;
};

/// Nested block description of a candidate reduction over {1..n}: leaves
/// are variable indices, every internal node groups >= 2 of them, and each
/// block must be strictly smaller than its enclosing scope.
class ReducibilityStructure {
 public:
  struct Node {
    bool is_leaf = false;
    int index = 0;                // leaves, 1-based
    std::vector<Node> children;   // blocks
  };

  /// Bracket syntax, e.g. "[[1,2],3,4]" or "[[[1,2],3],4,5]".
  static ReducibilityStructure parse(std::string_view text);

  /// The structure [[block...], rest...] with the remaining indices flat.
  static ReducibilityStructure flat_block(std::vector<int> block, int n);

  explicit ReducibilityStructure(Node root) : root_(std::move(root)) {}

  /// Checks leaf coverage of 1..arity and the block size bounds; throws
  /// InvalidStructureError.
  void validate(int arity) const;

  /// All condition triples: for each block B with enclosing scope P, the
  /// pairs a < b inside B against every p in P \ B. Deduplicated, sorted.
  std::vector<ConditionTriple> conditions() const;

  int index_count() const;
  const Node& root() const { return root_; }
  std::string to_string() const;

 private:
  Node root_;
};

struct ResidualValue {
  double raw = 0;  // F_pa * F_b - F_pb * F_a
  double rho = 0;  // |raw| / (|F_pa F_b| + |F_pb F_a| + tau)
};

struct ExactResidualValue {
  Rational raw;
  double rho = 0;
};

/// Cross-multiplied condition residual from the closed-form partials.
ResidualValue residual(const RationalQuasigroup& q, const ConditionTriple& t,
                       std::span<const double> p);

/// Same residual with exact rational arithmetic.
ExactResidualValue residual(const RationalQuasigroup& q, const ConditionTriple& t,
                            std::span<const Rational> p);

/// Residual for an arbitrary map via two second-order jet passes.
ResidualValue residual(const GenericMap& m, const ConditionTriple& t,
                       std::span<const double> p);

/// The factored form (f_a'(x_a) - f_b'(x_b)) * (f_p'(x_p) * S - G) with
/// S = sum(x) + a and G = sum(f) + A. Equals residual * S^4 identically.
Rational factored_residual(const RationalQuasigroup& q, const ConditionTriple& t,
                           std::span<const Rational> p);

struct SamplerConfig {
  int samples = 64;
  double tol = kDefaultResidualTol;
  std::uint64_t seed = 0;
  std::optional<Box> box;  // default: target's default box
};

struct TripleReport {
  ConditionTriple triple;
  int samples = 0;
  double max_rho = 0;
  double mean_rho = 0;
  bool holds = false;
};

struct ResidualReport {
  std::vector<TripleReport> triples;
  bool all_hold = false;
  int samples = 0;
  double tol = 0;
  std::uint64_t seed = 0;
  Box box;
  std::string structure;
};

/// Samples every condition of the structure at `samples` regular points
/// (per-triple deterministic substreams) and records normalized residuals.
ResidualReport check_structure(const RationalQuasigroup& q,
                               const ReducibilityStructure& s,
                               const SamplerConfig& config);
ResidualReport check_structure(const GenericMap& m, const ReducibilityStructure& s,
                               const SamplerConfig& config);

enum class Verdict { Irreducible, Reducible, CompletelyReducible, NotAQuasigroup };

std::string_view to_string(Verdict v);

struct SlopeBlock {
  std::vector<int> indices;          // sorted, size >= 2
  Rational slope;                    // shared exact slope c
  std::vector<Rational> intercepts;  // aligned with indices
};

struct Classification {
  Verdict verdict = Verdict::Irreducible;
  std::vector<SlopeBlock> blocks;    // sorted by smallest index
  std::vector<int> degenerate;       // nonempty only for NotAQuasigroup
};

/// Exact classification: indices with affine f_i grouped by slope; any
/// group of >= 2 indices is a reducible block, a group covering all
/// indices is complete reducibility, and instances whose equation is not
/// solvable are flagged instead of classified.
Classification classify(const RationalQuasigroup& q);

/// True iff i and j share a block of the classification.
bool same_block(const Classification& c, int i, int j);

/// Machine-checkable reduced form for one block B with slope c:
///   F = (c*h + sum_{i not in B} f_i(x_i) + D + A) / (h + sum_{i not in B} x_i + a),
/// h = sum_{i in B} x_i, D = sum of the block intercepts.
struct ReducedForm {
  std::vector<int> block;
  Rational slope;
  Rational intercept_sum;
  std::vector<int> rest;
  std::vector<Polynomial> rest_funcs;  // aligned with rest
  Rational A, a;

  /// Evaluates through the composed two-stage form g(h(x_B), x_rest).
  double eval(std::span<const double> p) const;
  std::string describe() const;
};

/// Requires `block` to sit inside one classified slope block; throws
/// NotReducibleBlockError otherwise.
ReducedForm emit_reduction(const RationalQuasigroup& q, const std::vector<int>& block);

}  // namespace nqweb
