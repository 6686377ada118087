#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nqweb/jet.hpp"
#include "nqweb/quasigroup.hpp"

namespace nqweb {

/// Arbitrary map F(x_1, ..., x_n) as a flat expression tree, evaluable as a
/// plain value or as a second-order two-direction jet. Parsed from prefix
/// notation, e.g. "(/ (+ (pow x1 2) x2) (+ x1 x2))".
class GenericMap {
 public:
  enum class Kind { Constant, Variable, Add, Subtract, Multiply, Divide, Power };

  struct Node {
    Kind kind;
    double value = 0;  // Constant
    int var = 0;       // Variable, 1-based
    int exponent = 0;  // Power
    int lhs = -1;
    int rhs = -1;
  };

  /// Parses prefix notation. Operators: + - * / pow; variables x1..xn;
  /// numeric literals as integers, decimals, or p/q rationals. "+", "*",
  /// "-", "/" fold left over two or more operands; "-" with one operand
  /// negates. Throws ParseError with the character position on bad input.
  /// The declared arity is max(arity_hint, highest variable index).
  static GenericMap parse(std::string_view text, int arity_hint = 0);

  /// Horner encoding of the rational family; the single division node is
  /// the instance's singular-locus guard.
  static GenericMap from_quasigroup(const RationalQuasigroup& q);

  int arity() const { return arity_; }

  double eval(std::span<const double> p) const;

  /// Forward propagation of (value, F_i, F_j, F_ij); i == j gives F_ii.
  Jet2 jet_eval(std::span<const double> p, int i, int j) const;

  std::string to_prefix_string() const;

 private:
  GenericMap(std::vector<Node> nodes, int arity)
      : nodes_(std::move(nodes)), arity_(arity) {}

  std::vector<Node> nodes_;  // children precede parents; root is the last node
  int arity_ = 0;
};

}  // namespace nqweb
