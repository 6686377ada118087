#include "nqweb/reducibility.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace nqweb {

// --- structure parsing -----------------------------------------------------

namespace {

using Node = ReducibilityStructure::Node;

class StructureParser {
 public:
  explicit StructureParser(std::string_view text) : text_(text) {}

  Node parse() {
    skip_space();
    Node root = parse_block();
    skip_space();
    if (pos_ != text_.size())
      throw ParseError("trailing input after structure", pos_);
    return root;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of structure", pos_);
    return text_[pos_];
  }

  Node parse_block() {
    if (peek() != '[') throw ParseError("expected '['", pos_);
    ++pos_;
    Node node;
    node.is_leaf = false;
    while (true) {
      skip_space();
      if (peek() == ']') {
        ++pos_;
        break;
      }
      if (!node.children.empty()) {
        if (peek() != ',') throw ParseError("expected ',' or ']'", pos_);
        ++pos_;
        skip_space();
      }
      if (peek() == '[') {
        node.children.push_back(parse_block());
      } else {
        node.children.push_back(parse_leaf());
      }
    }
    if (node.children.empty()) throw ParseError("empty block", pos_);
    return node;
  }

  Node parse_leaf() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) throw ParseError("expected index or '['", pos_);
    Node leaf;
    leaf.is_leaf = true;
    leaf.index = std::stoi(std::string(text_.substr(start, pos_ - start)));
    return leaf;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_indices(const Node& node, std::vector<int>& out) {
  if (node.is_leaf) {
    out.push_back(node.index);
    return;
  }
  for (const Node& c : node.children) collect_indices(c, out);
}

void print_node(const Node& node, std::string& out) {
  if (node.is_leaf) {
    out += std::to_string(node.index);
    return;
  }
  out += '[';
  for (std::size_t k = 0; k < node.children.size(); ++k) {
    if (k) out += ',';
    print_node(node.children[k], out);
  }
  out += ']';
}

}  // namespace

ReducibilityStructure ReducibilityStructure::parse(std::string_view text) {
  return ReducibilityStructure(StructureParser(text).parse());
}

ReducibilityStructure ReducibilityStructure::flat_block(std::vector<int> block, int n) {
  Node root;
  Node inner;
  std::sort(block.begin(), block.end());
  for (int i : block) inner.children.push_back({true, i, {}});
  root.children.push_back(std::move(inner));
  std::set<int> in_block(block.begin(), block.end());
  for (int i = 1; i <= n; ++i)
    if (!in_block.count(i)) root.children.push_back({true, i, {}});
  return ReducibilityStructure(std::move(root));
}

int ReducibilityStructure::index_count() const {
  std::vector<int> indices;
  collect_indices(root_, indices);
  return static_cast<int>(indices.size());
}

void ReducibilityStructure::validate(int arity) const {
  std::vector<int> indices;
  collect_indices(root_, indices);
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 1; i <= arity; ++i) {
    if (i > static_cast<int>(sorted.size()) || sorted[static_cast<std::size_t>(i - 1)] != i)
      throw InvalidStructureError(
          "structure must mention every index 1.." + std::to_string(arity) +
          " exactly once, got " + to_string());
  }
  if (static_cast<int>(sorted.size()) != arity)
    throw InvalidStructureError("structure mentions more indices than the arity " +
                                std::to_string(arity));

  // Block size bounds: 2 <= |B| <= |scope| - 1 for every non-root block.
  auto check = [](const Node& node, int scope_size, auto&& self) -> void {
    for (const Node& child : node.children) {
      if (child.is_leaf) continue;
      std::vector<int> sub;
      collect_indices(child, sub);
      const int size = static_cast<int>(sub.size());
      if (size < 2)
        throw InvalidStructureError("block of size " + std::to_string(size) +
                                    " (blocks need at least 2 indices)");
      if (size > scope_size - 1)
        throw InvalidStructureError(
            "block of size " + std::to_string(size) + " must be smaller than its scope (" +
            std::to_string(scope_size) + ")");
      self(child, size, self);
    }
  };
  check(root_, arity, check);
}

std::vector<ConditionTriple> ReducibilityStructure::conditions() const {
  std::set<ConditionTriple> out;
  auto visit = [&out](const Node& node, const std::vector<int>& scope, auto&& self) -> void {
    for (const Node& child : node.children) {
      if (child.is_leaf) continue;
      std::vector<int> block;
      collect_indices(child, block);
      std::sort(block.begin(), block.end());
      std::vector<int> outside;
      std::set_difference(scope.begin(), scope.end(), block.begin(), block.end(),
                          std::back_inserter(outside));
      for (std::size_t x = 0; x < block.size(); ++x)
        for (std::size_t y = x + 1; y < block.size(); ++y)
          for (int p : outside) out.insert({block[x], block[y], p});
      self(child, block, self);
    }
  };
  std::vector<int> all;
  collect_indices(root_, all);
  std::sort(all.begin(), all.end());
  visit(root_, all, visit);
  return {out.begin(), out.end()};
}

std::string ReducibilityStructure::to_string() const {
  std::string out;
  print_node(root_, out);
  return out;
}

// --- residuals ---------------------------------------------------------------

ResidualValue residual(const RationalQuasigroup& q, const ConditionTriple& t,
                       std::span<const double> p) {
  const double Fa = q.first_partial(t.a, p);
  const double Fb = q.first_partial(t.b, p);
  const double Fpa = q.second_partial(t.p, t.a, p);
  const double Fpb = q.second_partial(t.p, t.b, p);
  const double lhs = Fpa * Fb, rhs = Fpb * Fa;
  ResidualValue r;
  r.raw = lhs - rhs;
  r.rho = std::abs(r.raw) / (std::abs(lhs) + std::abs(rhs) + kResidualTau);
  return r;
}

ExactResidualValue residual(const RationalQuasigroup& q, const ConditionTriple& t,
                            std::span<const Rational> p) {
  const Rational Fa = q.first_partial(t.a, p);
  const Rational Fb = q.first_partial(t.b, p);
  const Rational Fpa = q.second_partial(t.p, t.a, p);
  const Rational Fpb = q.second_partial(t.p, t.b, p);
  const Rational lhs = Fpa * Fb, rhs = Fpb * Fa;
  ExactResidualValue r;
  r.raw = lhs - rhs;
  r.rho = std::abs(to_double(r.raw)) /
          (std::abs(to_double(lhs)) + std::abs(to_double(rhs)) + kResidualTau);
  return r;
}

ResidualValue residual(const GenericMap& m, const ConditionTriple& t,
                       std::span<const double> p) {
  const Jet2 ja = m.jet_eval(p, t.p, t.a);  // value, F_p, F_a, F_pa
  const Jet2 jb = m.jet_eval(p, t.p, t.b);  // value, F_p, F_b, F_pb
  const double lhs = ja.dij * jb.dj, rhs = jb.dij * ja.dj;
  ResidualValue r;
  r.raw = lhs - rhs;
  r.rho = std::abs(r.raw) / (std::abs(lhs) + std::abs(rhs) + kResidualTau);
  return r;
}

Rational factored_residual(const RationalQuasigroup& q, const ConditionTriple& t,
                           std::span<const Rational> p) {
  const Rational S = q.denominator(p);
  if (std::abs(to_double(S)) < kSingularEps)
    throw SingularPointError("point lies on the singular hyperplane");
  Rational G = q.numerator_constant();
  for (int i = 1; i <= q.arity(); ++i)
    G += q.func(i).eval(p[static_cast<std::size_t>(i - 1)]);
  auto dfi = [&q, &p](int i) {
    return q.func(i).derivative().eval(p[static_cast<std::size_t>(i - 1)]);
  };
  return (dfi(t.a) - dfi(t.b)) * (dfi(t.p) * S - G);
}

// --- sampled structure checking ---------------------------------------------

namespace {

std::uint64_t triple_stream(const ConditionTriple& t) {
  return (static_cast<std::uint64_t>(t.a) << 42) ^
         (static_cast<std::uint64_t>(t.b) << 21) ^ static_cast<std::uint64_t>(t.p);
}

constexpr int kMapPointRetries = 1000;

template <class Residual, class Sampler>
ResidualReport check_structure_impl(const ReducibilityStructure& s,
                                    const SamplerConfig& config, const Box& box,
                                    Residual&& residual_at, Sampler&& sample) {
  if (config.samples < 1) throw Error("samples must be >= 1");
  if (config.tol <= 0) throw Error("tol must be positive");
  ResidualReport report;
  report.samples = config.samples;
  report.tol = config.tol;
  report.seed = config.seed;
  report.box = box;
  report.structure = s.to_string();
  report.all_hold = true;
  for (const ConditionTriple& t : s.conditions()) {
    SplitMix64 rng(mix_seed(config.seed, triple_stream(t)));
    TripleReport tr;
    tr.triple = t;
    double sum = 0;
    for (int k = 0; k < config.samples; ++k) {
      const std::vector<double> p = sample(rng);
      const ResidualValue rv = residual_at(t, p);
      tr.max_rho = std::max(tr.max_rho, rv.rho);
      sum += rv.rho;
      ++tr.samples;
    }
    tr.mean_rho = sum / config.samples;
    tr.holds = tr.max_rho <= config.tol;
    report.all_hold = report.all_hold && tr.holds;
    report.triples.push_back(std::move(tr));
  }
  return report;
}

}  // namespace

ResidualReport check_structure(const RationalQuasigroup& q,
                               const ReducibilityStructure& s,
                               const SamplerConfig& config) {
  s.validate(q.arity());
  if (const auto degenerate = q.degenerate_indices(); !degenerate.empty())
    throw NotAQuasigroupError("target is not solvable; degenerate in " +
                              std::to_string(degenerate.size()) + " slot(s)");
  const Box box = config.box.value_or(q.default_box());
  return check_structure_impl(
      s, config, box,
      [&q](const ConditionTriple& t, const std::vector<double>& p) {
        return residual(q, t, std::span<const double>(p));
      },
      [&q, &box](SplitMix64& rng) { return sample_regular_point(q, box, rng); });
}

ResidualReport check_structure(const GenericMap& m, const ReducibilityStructure& s,
                               const SamplerConfig& config) {
  s.validate(m.arity());
  const Box box = config.box.value_or(Box::cube(m.arity(), 3.0, 7.0));
  auto sample = [&m, &box](SplitMix64& rng) {
    std::vector<double> p(static_cast<std::size_t>(m.arity()));
    for (int attempt = 0; attempt < kMapPointRetries; ++attempt) {
      for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = rng.uniform(box.ranges[k].first, box.ranges[k].second);
      try {
        m.eval(p);
        return p;
      } catch (const SingularPointError&) {
        continue;
      }
    }
    throw SingularBoxError("sampling box hugs the map's singular locus");
  };
  return check_structure_impl(
      s, config, box,
      [&m](const ConditionTriple& t, const std::vector<double>& p) {
        return residual(m, t, std::span<const double>(p));
      },
      sample);
}

// --- exact classification -----------------------------------------------------

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Irreducible: return "Irreducible";
    case Verdict::Reducible: return "Reducible";
    case Verdict::CompletelyReducible: return "CompletelyReducible";
    case Verdict::NotAQuasigroup: return "NotAQuasigroup";
  }
  return "?";
}

Classification classify(const RationalQuasigroup& q) {
  Classification c;
  c.degenerate = q.degenerate_indices();
  if (!c.degenerate.empty()) {
    c.verdict = Verdict::NotAQuasigroup;
    return c;
  }

  // Group affine slots by exact slope; intercepts are recorded but do not
  // split groups (equal derivatives already force the condition residual
  // to vanish, and any intercept is absorbable by the isotopy constants).
  std::map<Rational, SlopeBlock> groups;
  for (int i = 1; i <= q.arity(); ++i) {
    const auto affine = q.func(i).linear_slope();
    if (!affine) continue;
    SlopeBlock& g = groups[affine->first];
    g.slope = affine->first;
    g.indices.push_back(i);
    g.intercepts.push_back(affine->second);
  }
  for (auto& [slope, g] : groups)
    if (g.indices.size() >= 2) c.blocks.push_back(g);
  std::sort(c.blocks.begin(), c.blocks.end(),
            [](const SlopeBlock& x, const SlopeBlock& y) {
              return x.indices.front() < y.indices.front();
            });

  if (c.blocks.empty()) {
    c.verdict = Verdict::Irreducible;
  } else if (c.blocks.size() == 1 &&
             static_cast<int>(c.blocks.front().indices.size()) == q.arity()) {
    c.verdict = Verdict::CompletelyReducible;
  } else {
    c.verdict = Verdict::Reducible;
  }
  return c;
}

bool same_block(const Classification& c, int i, int j) {
  for (const SlopeBlock& b : c.blocks) {
    const bool has_i = std::find(b.indices.begin(), b.indices.end(), i) != b.indices.end();
    const bool has_j = std::find(b.indices.begin(), b.indices.end(), j) != b.indices.end();
    if (has_i && has_j) return true;
  }
  return false;
}

// --- reduced form ---------------------------------------------------------------

double ReducedForm::eval(std::span<const double> p) const {
  double h = 0;  // inner operation: plain sum over the block
  for (int i : block) h += p[static_cast<std::size_t>(i - 1)];
  double num = to_double(slope) * h + to_double(intercept_sum) + to_double(A);
  double den = h + to_double(a);
  for (std::size_t k = 0; k < rest.size(); ++k) {
    const double x = p[static_cast<std::size_t>(rest[k] - 1)];
    num += rest_funcs[k].eval(x);
    den += x;
  }
  if (std::abs(den) < kSingularEps)
    throw SingularPointError("reduced form evaluated at a singular point");
  return num / den;
}

std::string ReducedForm::describe() const {
  std::ostringstream out;
  out << "h = ";
  for (std::size_t k = 0; k < block.size(); ++k)
    out << (k ? " + " : "") << "x" << block[k];
  out << "; F = (" << to_string(slope) << "*h";
  for (int i : rest) out << " + f" << i << "(x" << i << ")";
  const Rational offset = intercept_sum + A;
  if (offset != 0) out << " + " << to_string(offset);
  out << ") / (h";
  for (int i : rest) out << " + x" << i;
  if (a != 0) out << " + " << to_string(a);
  out << ")";
  return out.str();
}

ReducedForm emit_reduction(const RationalQuasigroup& q, const std::vector<int>& block) {
  if (block.size() < 2)
    throw NotReducibleBlockError("a reducible block needs at least 2 indices");
  const Classification c = classify(q);
  const SlopeBlock* host = nullptr;
  for (const SlopeBlock& g : c.blocks) {
    const bool contains_all = std::all_of(block.begin(), block.end(), [&g](int i) {
      return std::find(g.indices.begin(), g.indices.end(), i) != g.indices.end();
    });
    if (contains_all) {
      host = &g;
      break;
    }
  }
  if (host == nullptr)
    throw NotReducibleBlockError("indices do not form an equal-slope block");

  ReducedForm form;
  form.block = block;
  std::sort(form.block.begin(), form.block.end());
  form.slope = host->slope;
  form.A = q.numerator_constant();
  form.a = q.denominator_constant();
  for (int i : form.block) {
    const auto affine = q.func(i).linear_slope();
    form.intercept_sum += affine->second;
  }
  for (int i = 1; i <= q.arity(); ++i) {
    if (std::find(form.block.begin(), form.block.end(), i) == form.block.end()) {
      form.rest.push_back(i);
      form.rest_funcs.push_back(q.func(i));
    }
  }
  return form;
}

}  // namespace nqweb
