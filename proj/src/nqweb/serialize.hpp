#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "nqweb/expr.hpp"
#include "nqweb/quasigroup.hpp"
#include "nqweb/reducibility.hpp"

namespace nqweb {

/// Spec JSON: {"n": int, "A": "rat", "a": "rat", "f": [{"poly": ["c0", ...]}, ...]}
/// with each coefficient a decimal integer or "p/q" string. Parse errors name
/// the offending field.
RationalQuasigroup quasigroup_from_json(std::string_view text);
std::string quasigroup_to_json(const RationalQuasigroup& q);

/// A check target is either a rational-family instance or a generic map
/// {"n": int, "map": "(/ (+ ...) ...)"} in prefix notation.
using TargetSpec = std::variant<RationalQuasigroup, GenericMap>;
TargetSpec target_from_json(std::string_view text);

std::string classification_to_json(const Classification& c);

std::string residual_report_to_json(const ResidualReport& report);
/// One row per triple: a,b,p,samples,max_rho,mean_rho,verdict.
std::string residual_report_to_csv(const ResidualReport& report);

}  // namespace nqweb
