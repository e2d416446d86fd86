#pragma once

// Shared fixtures: the three-variable cubic/quadratic template with
// invariants x2^2 - x1 and x3^3 + 2 x2^2 - x1, and its reference output.

#include <string>
#include <vector>

#include "loopsynth/synthesis.hpp"

namespace loopsynth::testing {

inline LoopTemplate cubic_template() {
  auto x = VarContext::of_program({"x1", "x2", "x3"});
  auto p = [&](const char* s) { return parse_polynomial(s, x); };
  return LoopTemplate{x,
                      {1, 1, -1},
                      Polynomial::constant(x, 1),
                      {{p("x1^3"), p("x2^2")}, {p("x1"), p("x2^2")}, {p("x1")}}};
}

inline InvariantSpec cubic_invariants(const ContextPtr& x) {
  return InvariantSpec{{parse_polynomial("x2^2 - x1", x), parse_polynomial("x3^3 + 2*x2^2 - x1", x)}};
}

/// The four reference polynomials.
inline std::vector<std::string> reference_system_text() {
  return {
      "(y3+y4)^2-y1-y2",
      "y5^3+2*(y3+y4)^2-y1-y2",
      "2*y3^4*y4^2+8*y3^3*y4^3+12*y3^2*y4^4+8*y3*y4^5+2*y4^6+y1^3*y5^3+3*y1^2*y2*y5^3"
      "+3*y1*y2^2*y5^3+y2^3*y5^3+4*y1*y3^3*y4+4*y2*y3^3*y4+8*y1*y3^2*y4^2"
      "+8*y2*y3^2*y4^2+4*y1*y3*y4^3+4*y2*y3*y4^3-y1^4-3*y1^3*y2-3*y1^2*y2^2-y1*y2^3"
      "+2*y1^2*y3^2+4*y1*y2*y3^2+2*y2^2*y3^2-y2*y3^2-2*y2*y3*y4-y2*y4^2",
      "y3^4*y4^2+4*y3^3*y4^3+6*y3^2*y4^4+4*y3*y4^5+y4^6+2*y1*y3^3*y4+2*y2*y3^3*y4"
      "+4*y1*y3^2*y4^2+4*y2*y3^2*y4^2+2*y1*y3*y4^3+2*y2*y3*y4^3-y1^4-3*y1^3*y2"
      "-3*y1^2*y2^2-y1*y2^3+y1^2*y3^2+2*y1*y2*y3^2+y2^2*y3^2-y2*y3^2-2*y2*y3*y4-y2*y4^2",
  };
}

inline std::vector<Polynomial> reference_system(const ContextPtr& y) {
  std::vector<Polynomial> out;
  for (const auto& s : reference_system_text()) out.push_back(parse_polynomial(s, y));
  return out;
}

/// Coefficient vectors (y1..y5) of the three linear solution components
///   V(y5, y3+y4, y1+y2), V(y5+1, y3+y4-1, y1+y2-1), V(y5+1, y3+y4+1, y1+y2-1),
/// parametrized by (mu1, mu2) = (y1, y3).
inline std::vector<Rational> family_coefficients(int family, const Rational& mu1, const Rational& mu2) {
  switch (family) {
    case 1: return {mu1, -mu1, mu2, -mu2, 0};
    case 2: return {mu1, 1 - mu1, mu2, 1 - mu2, -1};
    case 3: return {mu1, 1 - mu1, mu2, -1 - mu2, -1};
  }
  return {};
}

}  // namespace loopsynth::testing
