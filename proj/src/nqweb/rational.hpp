#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace nqweb {

// Arbitrary-precision rational scalar. All exact paths (classification,
// solvability, shifted coefficients) run on this type; doubles are the
// sampling fast path only. Expression templates are off so the type has
// plain value semantics under template deduction.
using Rational =
    boost::multiprecision::number<boost::multiprecision::backends::rational_adaptor<
                                      boost::multiprecision::backends::cpp_int_backend<>>,
                                  boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// "p/q" in lowest terms, plain "p" when the denominator is 1.
std::string to_string(const Rational& r);

// Accepts "p", "-p", "p/q", "-p/q" with decimal-integer parts.
std::optional<Rational> parse_rational(std::string_view s);

}  // namespace nqweb
