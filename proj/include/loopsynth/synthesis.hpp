#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loopsynth/groebner.hpp"
#include "loopsynth/polynomial.hpp"

namespace loopsynth {

struct SynthesisOptions {
  /// Maximum number of batches the invariant-set iteration may accumulate.
  std::size_t max_rounds = 32;
  GroebnerBudget budget;
};

/// Loop shape to synthesize: x := a; while h(x) != 0: x_i := sum_j b_ij f_ij(x).
struct LoopTemplate {
  ContextPtr ctx;  ///< program variables only
  std::vector<Rational> initial;
  Polynomial guard;
  std::vector<std::vector<Polynomial>> generators;  ///< generators[i] spans update i

  std::size_t coefficient_count() const;
  /// Throws ArityMismatch / ContextMismatch when the shape is inconsistent.
  void validate() const;
};

/// Product of the guard polynomials; an empty list means the guard 1.
Polynomial combine_guards(std::span<const Polynomial> guards, const ContextPtr& ctx);

struct InvariantSpec {
  std::vector<Polynomial> polys;
  void validate(const ContextPtr& ctx) const;
};

/// x := a; while h(x) != 0: x := F(x).
struct ConcreteLoop {
  ContextPtr ctx;
  std::vector<Rational> initial;
  Polynomial guard;
  std::vector<Polynomial> update;

  void validate() const;
};

struct InvariantSetResult {
  /// All accumulated batches, in order: g, g o F, g o F o F, ...
  std::vector<Polynomial> polys;
  /// Number of accumulated batches.
  std::size_t rounds = 0;
  /// The composed batch that was found to lie in the radical.
  std::vector<Polynomial> final_batch;
};

/// Polynomials whose common zeros are the points of V(g) whose whole forward
/// orbit under F stays in V(g). Throws BudgetExceeded past max_rounds.
InvariantSetResult invariant_set(std::span<const Polynomial> g, std::span<const Polynomial> F,
                                 const SynthesisOptions& options = {});

struct AugmentedMap {
  ContextPtr ctx;  ///< x-block, y-block, z
  std::vector<Polynomial> components;
};

/// (sum_j y_1j f_1j, ..., sum_j y_nj f_nj, y, z*h) over (x, y, z).
AugmentedMap build_augmented_map(const LoopTemplate& t);

/// Polynomials in the template coefficients whose common zeros are exactly
/// the coefficient vectors making every invariant hold.
struct SynthesisSystem {
  ContextPtr ctx;  ///< coefficient variables only
  std::vector<Polynomial> polys;
  /// Invariant-set output before substitution, over (x, y, z).
  std::vector<Polynomial> pre_substitution;
  /// For each entry of polys, its index in pre_substitution.
  std::vector<std::size_t> source_index;
  std::size_t rounds = 0;

  std::size_t q_count() const noexcept { return pre_substitution.size(); }
};

SynthesisSystem generate_loops(const LoopTemplate& t, const InvariantSpec& inv,
                               const SynthesisOptions& options = {});

/// The loop obtained by fixing the template coefficients to `b`
/// (ordered y_11, ..., y_1l1, ..., y_nln).
ConcreteLoop instantiate(const LoopTemplate& t, std::span<const Rational> b);

/// Exact test that every invariant holds on every visited state.
bool check_invariants(const ConcreteLoop& loop, const InvariantSpec& inv,
                      const SynthesisOptions& options = {});

/// Runs at most `max_steps` iterations and checks the invariants on each
/// visited state, including the first one where the guard vanishes.
/// A true result is evidence only.
bool simulate(const ConcreteLoop& loop, const InvariantSpec& inv, std::size_t max_steps);

}  // namespace loopsynth
