#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loopsynth/solve.hpp"
#include "loopsynth/synthesis.hpp"

namespace loopsynth {

struct ProblemSettings {
  /// Solver argv template; unset means "use the environment".
  std::optional<std::vector<std::string>> solver;
  Domain domain = Domain::Integers;
  NonzeroPolicy policy;
  double synth_budget = 300.0;
  double solve_budget = 60.0;

  bool operator==(const ProblemSettings& o) const;
};

/// One problem file. Line-oriented, `#` starts a comment:
///
///   name: cubic
///   vars: x1, x2, x3
///   init: 1, 1, -1
///   guard: x1 - 7            (repeatable; the guards are multiplied)
///   invariant: x2^2 - x1     (repeatable)
///   update x1: x1^3, x2^2    (generator list, one line per variable)
///   map x1: -3*x1^3 + 3*x2^2 (concrete update, for `check`)
///   coeffs: -3, 3, 1, -1, 0  (instantiates the template, for `check`)
///   solver: z3 -smt2 {script}
///   domain: integers | rationals
///   policy: vector | none | coordinate <k>
///   synth-budget: 300
///   solve-budget: 60
struct Problem {
  std::string name;
  ContextPtr ctx;
  std::vector<Rational> initial;
  std::vector<Polynomial> guards;
  std::vector<Polynomial> invariants;
  /// Empty when the file has no `update` lines.
  std::vector<std::vector<Polynomial>> generators;
  /// Empty when the file has no `map` lines.
  std::vector<Polynomial> map;
  std::optional<std::vector<Rational>> coeffs;
  ProblemSettings settings;

  bool has_template() const noexcept { return !generators.empty(); }
  /// Requires `update` lines.
  LoopTemplate loop_template() const;
  /// Same template with the given generator lists.
  LoopTemplate loop_template(std::vector<std::vector<Polynomial>> gens) const;
  InvariantSpec invariant_spec() const { return InvariantSpec{invariants}; }
  Polynomial guard() const { return combine_guards(guards, ctx); }
  /// From `map` lines, or from `update` + `coeffs`.
  ConcreteLoop concrete_loop() const;
  /// Max total degree over the invariants.
  int invariant_degree() const;

  bool operator==(const Problem& o) const;
};

/// Throws ParseError (with line and column) on malformed input, undeclared
/// variables, or arity mismatches.
Problem parse_problem(std::string_view text);
Problem load_problem(const std::string& path);
std::string print_problem(const Problem& p);

/// Parses `vector`, `none`, or `coordinate <k>` (1-based).
NonzeroPolicy parse_policy(std::string_view text);
Domain parse_domain(std::string_view text);

}  // namespace loopsynth
