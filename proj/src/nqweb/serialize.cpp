#include "nqweb/serialize.hpp"

#include <sstream>

#include "json.hpp"

namespace nqweb {

namespace {

using json = nlohmann::json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("JSON: ") + e.what(), e.byte);
  }
}

Rational rational_field(const json& j, const std::string& field) {
  std::string text;
  if (j.is_number_integer()) {
    text = std::to_string(j.get<long long>());
  } else if (j.is_string()) {
    text = j.get<std::string>();
  } else {
    throw ParseError(field + ": expected a rational string or integer", 0);
  }
  const auto r = parse_rational(text);
  if (!r) throw ParseError(field + ": invalid rational '" + text + "'", 0);
  return *r;
}

Polynomial polynomial_field(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("poly"))
    throw ParseError(field + ": expected {\"poly\": [...]}", 0);
  const json& coeffs = j.at("poly");
  if (!coeffs.is_array()) throw ParseError(field + ".poly: expected an array", 0);
  std::vector<Rational> c;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    c.push_back(rational_field(coeffs[k], field + ".poly[" + std::to_string(k) + "]"));
  return Polynomial(std::move(c));
}

}  // namespace

RationalQuasigroup quasigroup_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("spec: expected a JSON object", 0);
  for (const char* field : {"n", "f"})
    if (!j.contains(field))
      throw ParseError(std::string("spec: missing field '") + field + "'", 0);
  if (!j.at("n").is_number_integer())
    throw ParseError("spec.n: expected an integer", 0);
  const int n = j.at("n").get<int>();
  const Rational A = j.contains("A") ? rational_field(j.at("A"), "spec.A") : Rational(0);
  const Rational a = j.contains("a") ? rational_field(j.at("a"), "spec.a") : Rational(0);
  if (!j.at("f").is_array())
    throw ParseError("spec.f: expected an array of polynomials", 0);
  std::vector<Polynomial> funcs;
  for (std::size_t k = 0; k < j.at("f").size(); ++k)
    funcs.push_back(polynomial_field(j.at("f")[k], "spec.f[" + std::to_string(k) + "]"));
  try {
    return RationalQuasigroup(n, std::move(funcs), A, a);
  } catch (const Error& e) {
    throw ParseError(std::string("spec: ") + e.what(), 0);
  }
}

std::string quasigroup_to_json(const RationalQuasigroup& q) {
  json f = json::array();
  for (int i = 1; i <= q.arity(); ++i) {
    json coeffs = json::array();
    for (const Rational& c : q.func(i).coeffs()) coeffs.push_back(to_string(c));
    f.push_back({{"poly", coeffs}});
  }
  const json j = {{"n", q.arity()},
                  {"A", to_string(q.numerator_constant())},
                  {"a", to_string(q.denominator_constant())},
                  {"f", f}};
  return j.dump();
}

TargetSpec target_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (j.is_object() && j.contains("map")) {
    if (!j.at("map").is_string()) throw ParseError("spec.map: expected a string", 0);
    const int n = j.contains("n") ? j.at("n").get<int>() : 0;
    return GenericMap::parse(j.at("map").get<std::string>(), n);
  }
  return quasigroup_from_json(text);
}

std::string classification_to_json(const Classification& c) {
  json blocks = json::array();
  for (const SlopeBlock& b : c.blocks) {
    json intercepts = json::array();
    for (const Rational& d : b.intercepts) intercepts.push_back(to_string(d));
    blocks.push_back(
        {{"indices", b.indices}, {"slope", to_string(b.slope)}, {"intercepts", intercepts}});
  }
  json j = {{"verdict", std::string(to_string(c.verdict))}, {"blocks", blocks}};
  if (!c.degenerate.empty()) j["degenerate_indices"] = c.degenerate;
  return j.dump();
}

namespace {

json box_to_json(const Box& box) {
  json ranges = json::array();
  for (const auto& [lo, hi] : box.ranges) ranges.push_back({lo, hi});
  return ranges;
}

}  // namespace

std::string residual_report_to_json(const ResidualReport& report) {
  json triples = json::array();
  for (const TripleReport& tr : report.triples) {
    triples.push_back({{"a", tr.triple.a},
                       {"b", tr.triple.b},
                       {"p", tr.triple.p},
                       {"samples", tr.samples},
                       {"max_rho", tr.max_rho},
                       {"mean_rho", tr.mean_rho},
                       {"verdict", tr.holds ? "holds" : "fails"}});
  }
  const json j = {{"structure", report.structure},
                  {"samples", report.samples},
                  {"tol", report.tol},
                  {"seed", report.seed},
                  {"box", box_to_json(report.box)},
                  {"triples", triples},
                  {"all_hold", report.all_hold}};
  return j.dump();
}

std::string residual_report_to_csv(const ResidualReport& report) {
  std::ostringstream out;
  out << "a,b,p,samples,max_rho,mean_rho,verdict\n";
  out.precision(17);
  for (const TripleReport& tr : report.triples) {
    out << tr.triple.a << ',' << tr.triple.b << ',' << tr.triple.p << ',' << tr.samples
        << ',' << tr.max_rho << ',' << tr.mean_rho << ','
        << (tr.holds ? "holds" : "fails") << '\n';
  }
  return out.str();
}

}  // namespace nqweb
