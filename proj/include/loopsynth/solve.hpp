#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "loopsynth/groebner.hpp"
#include "loopsynth/synthesis.hpp"

namespace loopsynth {

/// A bare system over `ctx`, for solving polynomials that did not come out
/// of generate_loops.
SynthesisSystem make_system(ContextPtr ctx, std::vector<Polynomial> polys);

enum class Domain { Integers, Rationals };

struct NonzeroPolicy {
  enum class Kind { Vector, Coordinate, None };
  Kind kind = Kind::Vector;
  std::size_t coordinate = 0;  ///< used by Kind::Coordinate

  static NonzeroPolicy vector() { return {}; }
  static NonzeroPolicy none() { return {Kind::None, 0}; }
  static NonzeroPolicy at(std::size_t k) { return {Kind::Coordinate, k}; }
  bool holds(std::span<const Rational> values) const;
};

struct SolveRequest {
  SynthesisSystem system;
  Domain domain = Domain::Integers;
  NonzeroPolicy policy;
  double budget_seconds = 60.0;

  void validate() const;
};

enum class SolveStatus { Sat, Unsat, Unknown, SolverUnavailable };

struct SolveOutcome {
  SolveStatus status = SolveStatus::Unknown;
  /// Values in the order of the system's variables; set only when Sat.
  std::vector<Rational> values;
  /// Solver stdout followed by stderr, or the reason no solver ran.
  std::string diagnostics;
  double seconds = 0;

  Bindings assignment(const VarContext& ctx) const;
};

const char* to_string(SolveStatus s);
const char* to_string(Domain d);
std::string to_string(const NonzeroPolicy& p);

/// SMT-LIB2 script asking for a point of V(P_1..P_s) under the policy.
/// Coefficients are cleared to integers. Throws Error on an empty system.
std::string emit_smtlib(const SolveRequest& req);

struct SolverConfig {
  /// argv template; the token "{script}" is replaced by the script path,
  /// which is appended when the token is absent.
  std::vector<std::string> argv;

  /// LOOPSYNTH_SOLVER (split on whitespace) when set, else `z3` when it is
  /// found on PATH, else an empty argv.
  static SolverConfig from_environment();
  /// Resolves argv[0] against PATH; nullopt when missing or not executable.
  std::optional<std::string> resolved_binary() const;
};

/// Runs the solver on `script` and re-verifies any model against
/// req.system and req.policy. Timeouts map to Unknown. A model that is
/// malformed or fails verification throws SolverProtocolError.
SolveOutcome run_external_solver(const SolveRequest& req, const std::string& script,
                                 const SolverConfig& config);

/// emit_smtlib + run_external_solver.
SolveOutcome solve(const SolveRequest& req, const SolverConfig& config);

/// Parses solver stdout (status line plus optional model) into an outcome
/// without verifying it.
SolveOutcome parse_solver_output(const std::string& out, const VarContext& vars);

struct LinearSolution {
  enum class Kind { Solved, Inconsistent, NotLinear };
  Kind kind = Kind::NotLinear;
  std::vector<Rational> particular;
  /// Basis of the homogeneous solution space, one vector per free variable.
  std::vector<std::vector<Rational>> kernel;
  std::vector<std::size_t> free_variables;

  /// particular + sum_k params[k] * kernel[k].
  std::vector<Rational> at(std::span<const Rational> params) const;
};

LinearSolution solve_linear(const SynthesisSystem& system);

/// All rational roots in ascending order. `p` may live in any context but
/// must involve at most one variable. Throws Error for the zero polynomial.
std::vector<Rational> rational_roots(const Polynomial& p);

/// All positive divisors of |n| (n != 0), ascending.
std::vector<Integer> divisors(const Integer& n);

struct BoxOptions {
  std::size_t cap = 20'000'000;  ///< bound on l * (2B+1)^l
};

/// Integer points of [-B,B]^l on V(P_1..P_s), in lexicographic order.
std::vector<std::vector<Integer>> brute_force_box(const SynthesisSystem& system, unsigned bound,
                                                  const BoxOptions& options = {});

enum class Finiteness { Finite, Infinite, Unknown };
const char* to_string(Finiteness f);

Finiteness classify_finiteness(const SynthesisSystem& system,
                               const GroebnerBudget& budget = GroebnerBudget::unlimited());

}  // namespace loopsynth
