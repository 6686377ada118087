#include "nqweb/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "nqweb/rational.hpp"

namespace nqweb {

namespace {

struct Token {
  enum class Type { LParen, RParen, Atom, End } type;
  std::string_view text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ >= text_.size()) return {Token::Type::End, {}, pos_};
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::Type::LParen, text_.substr(start, 1), start};
    }
    if (c == ')') {
      ++pos_;
      return {Token::Type::RParen, text_.substr(start, 1), start};
    }
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    return {Token::Type::Atom, text_.substr(start, pos_ - start), start};
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  int parse_expr(std::vector<GenericMap::Node>& nodes, int& max_var) {
    if (current_.type == Token::Type::LParen) return parse_call(nodes, max_var);
    if (current_.type == Token::Type::Atom) return parse_atom(nodes, max_var);
    throw ParseError("expected expression", current_.pos);
  }

  void expect_end() {
    if (current_.type != Token::Type::End)
      throw ParseError("trailing input after expression", current_.pos);
  }

 private:
  void advance() { current_ = lexer_.next(); }

  int parse_atom(std::vector<GenericMap::Node>& nodes, int& max_var) {
    const Token tok = current_;
    advance();
    if (tok.text.size() >= 2 && tok.text[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(tok.text[1]))) {
      int var = 0;
      auto [ptr, ec] =
          std::from_chars(tok.text.data() + 1, tok.text.data() + tok.text.size(), var);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || var < 1)
        throw ParseError("bad variable '" + std::string(tok.text) + "'", tok.pos);
      max_var = std::max(max_var, var);
      nodes.push_back({GenericMap::Kind::Variable, 0, var, 0, -1, -1});
      return static_cast<int>(nodes.size()) - 1;
    }
    nodes.push_back({GenericMap::Kind::Constant, parse_number(tok), 0, 0, -1, -1});
    return static_cast<int>(nodes.size()) - 1;
  }

  static double parse_number(const Token& tok) {
    if (auto r = parse_rational(tok.text)) return to_double(*r);
    const std::string s(tok.text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
      throw ParseError("bad number '" + s + "'", tok.pos);
    return v;
  }

  int parse_call(std::vector<GenericMap::Node>& nodes, int& max_var) {
    advance();  // consume '('
    if (current_.type != Token::Type::Atom)
      throw ParseError("expected operator after '('", current_.pos);
    const Token op = current_;
    advance();

    if (op.text == "pow") {
      const int base = parse_expr(nodes, max_var);
      if (current_.type != Token::Type::Atom)
        throw ParseError("pow expects a literal integer exponent", current_.pos);
      int exponent = 0;
      auto [ptr, ec] = std::from_chars(
          current_.text.data(), current_.text.data() + current_.text.size(), exponent);
      if (ec != std::errc() || ptr != current_.text.data() + current_.text.size() ||
          exponent < 0)
        throw ParseError("pow expects a non-negative integer exponent", current_.pos);
      advance();
      close_paren();
      nodes.push_back({GenericMap::Kind::Power, 0, 0, exponent, base, -1});
      return static_cast<int>(nodes.size()) - 1;
    }

    GenericMap::Kind kind;
    if (op.text == "+") kind = GenericMap::Kind::Add;
    else if (op.text == "-") kind = GenericMap::Kind::Subtract;
    else if (op.text == "*") kind = GenericMap::Kind::Multiply;
    else if (op.text == "/") kind = GenericMap::Kind::Divide;
    else throw ParseError("unknown operator '" + std::string(op.text) + "'", op.pos);

    std::vector<int> args;
    while (current_.type != Token::Type::RParen) {
      if (current_.type == Token::Type::End)
        throw ParseError("unbalanced '('", current_.pos);
      args.push_back(parse_expr(nodes, max_var));
    }
    advance();  // consume ')'
    if (args.empty()) throw ParseError("operator with no operands", op.pos);

    if (args.size() == 1) {
      if (kind == GenericMap::Kind::Subtract) {
        nodes.push_back({GenericMap::Kind::Constant, 0.0, 0, 0, -1, -1});
        const int zero = static_cast<int>(nodes.size()) - 1;
        nodes.push_back({GenericMap::Kind::Subtract, 0, 0, 0, zero, args[0]});
        return static_cast<int>(nodes.size()) - 1;
      }
      if (kind == GenericMap::Kind::Add || kind == GenericMap::Kind::Multiply)
        return args[0];
      throw ParseError("'" + std::string(op.text) + "' needs two operands", op.pos);
    }

    int acc = args[0];
    for (std::size_t k = 1; k < args.size(); ++k) {
      nodes.push_back({kind, 0, 0, 0, acc, args[k]});
      acc = static_cast<int>(nodes.size()) - 1;
    }
    return acc;
  }

  void close_paren() {
    if (current_.type != Token::Type::RParen)
      throw ParseError("expected ')'", current_.pos);
    advance();
  }

  Lexer lexer_;
  Token current_;
};

}  // namespace

GenericMap GenericMap::parse(std::string_view text, int arity_hint) {
  std::vector<Node> nodes;
  int max_var = 0;
  Parser parser(text);
  const int root = parser.parse_expr(nodes, max_var);
  parser.expect_end();
  if (root != static_cast<int>(nodes.size()) - 1) {
    // Single-operand folds can hand back an interior node; re-root so the
    // last node is always the result.
    nodes.push_back({Kind::Constant, 0.0, 0, 0, -1, -1});
    nodes.push_back({Kind::Add, 0, 0, 0, static_cast<int>(nodes.size()) - 1, root});
  }
  const int arity = std::max(arity_hint, max_var);
  if (arity_hint > 0 && max_var > arity_hint)
    throw ParseError("variable index " + std::to_string(max_var) +
                         " exceeds declared arity " + std::to_string(arity_hint),
                     0);
  return GenericMap(std::move(nodes), arity);
}

GenericMap GenericMap::from_quasigroup(const RationalQuasigroup& q) {
  std::vector<Node> nodes;
  auto push = [&nodes](Node n) {
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  };
  auto constant = [&](double c) { return push({Kind::Constant, c, 0, 0, -1, -1}); };
  auto variable = [&](int i) { return push({Kind::Variable, 0, i, 0, -1, -1}); };
  auto binary = [&](Kind k, int l, int r) { return push({k, 0, 0, 0, l, r}); };

  // Horner form of each f_i.
  auto horner = [&](const Polynomial& f, int var) {
    if (f.is_zero()) return constant(0.0);
    int acc = constant(to_double(f.coeff(f.degree())));
    for (int k = f.degree() - 1; k >= 0; --k) {
      const int prod = binary(Kind::Multiply, acc, variable(var));
      acc = binary(Kind::Add, prod, constant(to_double(f.coeff(k))));
    }
    return acc;
  };

  int numerator = horner(q.func(1), 1);
  for (int i = 2; i <= q.arity(); ++i)
    numerator = binary(Kind::Add, numerator, horner(q.func(i), i));
  if (q.numerator_constant() != 0)
    numerator = binary(Kind::Add, numerator, constant(to_double(q.numerator_constant())));

  int denominator = variable(1);
  for (int i = 2; i <= q.arity(); ++i)
    denominator = binary(Kind::Add, denominator, variable(i));
  if (q.denominator_constant() != 0)
    denominator =
        binary(Kind::Add, denominator, constant(to_double(q.denominator_constant())));

  binary(Kind::Divide, numerator, denominator);
  return GenericMap(std::move(nodes), q.arity());
}

double GenericMap::eval(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != arity_) throw Error("point dimension mismatch");
  std::vector<double> value(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& n = nodes_[k];
    switch (n.kind) {
      case Kind::Constant: value[k] = n.value; break;
      case Kind::Variable: value[k] = p[static_cast<std::size_t>(n.var - 1)]; break;
      case Kind::Add: value[k] = value[n.lhs] + value[n.rhs]; break;
      case Kind::Subtract: value[k] = value[n.lhs] - value[n.rhs]; break;
      case Kind::Multiply: value[k] = value[n.lhs] * value[n.rhs]; break;
      case Kind::Divide:
        if (std::abs(value[n.rhs]) < kJetDivisionEps)
          throw SingularPointError("division by near-zero in map evaluation");
        value[k] = value[n.lhs] / value[n.rhs];
        break;
      case Kind::Power: value[k] = std::pow(value[n.lhs], n.exponent); break;
    }
  }
  return value.back();
}

Jet2 GenericMap::jet_eval(std::span<const double> p, int i, int j) const {
  if (static_cast<int>(p.size()) != arity_) throw Error("point dimension mismatch");
  std::vector<Jet2> jet(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& n = nodes_[k];
    switch (n.kind) {
      case Kind::Constant: jet[k] = jet_constant(n.value); break;
      case Kind::Variable:
        jet[k] = jet_variable(p[static_cast<std::size_t>(n.var - 1)], n.var == i,
                              n.var == j);
        break;
      case Kind::Add: jet[k] = jet[n.lhs] + jet[n.rhs]; break;
      case Kind::Subtract: jet[k] = jet[n.lhs] - jet[n.rhs]; break;
      case Kind::Multiply: jet[k] = jet[n.lhs] * jet[n.rhs]; break;
      case Kind::Divide: jet[k] = jet[n.lhs] / jet[n.rhs]; break;
      case Kind::Power: jet[k] = jet_pow(jet[n.lhs], n.exponent); break;
    }
  }
  Jet2 result = jet.back();
  result.i = i;
  result.j = j;
  return result;
}

namespace {

void print_node(const std::vector<GenericMap::Node>& nodes, int k, std::string& out) {
  const GenericMap::Node& n = nodes[static_cast<std::size_t>(k)];
  switch (n.kind) {
    case GenericMap::Kind::Constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case GenericMap::Kind::Variable:
      out += "x" + std::to_string(n.var);
      return;
    case GenericMap::Kind::Power:
      out += "(pow ";
      print_node(nodes, n.lhs, out);
      out += " " + std::to_string(n.exponent) + ")";
      return;
    default: {
      const char* op = n.kind == GenericMap::Kind::Add        ? "+"
                       : n.kind == GenericMap::Kind::Subtract ? "-"
                       : n.kind == GenericMap::Kind::Multiply ? "*"
                                                              : "/";
      out += "(";
      out += op;
      out += " ";
      print_node(nodes, n.lhs, out);
      out += " ";
      print_node(nodes, n.rhs, out);
      out += ")";
      return;
    }
  }
}

}  // namespace

std::string GenericMap::to_prefix_string() const {
  std::string out;
  print_node(nodes_, static_cast<int>(nodes_.size()) - 1, out);
  return out;
}

}  // namespace nqweb
