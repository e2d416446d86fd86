#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "loopsynth/polynomial.hpp"

namespace loopsynth {

/// Limits for a Groebner computation. Exhaustion throws BudgetExceeded.
struct GroebnerBudget {
  /// Maximum number of elementary reduction steps; 0 means unlimited.
  std::size_t max_steps = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  static GroebnerBudget unlimited() { return {}; }
  static GroebnerBudget for_seconds(double seconds);
};

/// Reduced Groebner basis: monic, interreduced generators sorted by
/// increasing leading monomial.
class GroebnerBasis {
 public:
  GroebnerBasis(ContextPtr ctx, MonomialOrder order, std::vector<Polynomial> generators);

  const ContextPtr& context() const noexcept { return ctx_; }
  const MonomialOrder& order() const noexcept { return order_; }
  const std::vector<Polynomial>& generators() const noexcept { return generators_; }
  /// Leading monomials under order(), parallel to generators().
  const std::vector<Monomial>& leading_monomials() const noexcept { return leads_; }
  /// The basis of the unit ideal, {1}.
  bool is_unit() const noexcept;
  /// Basis of the zero ideal (no generators).
  bool is_zero() const noexcept { return generators_.empty(); }

  bool operator==(const GroebnerBasis& other) const {
    return order_ == other.order_ && generators_ == other.generators_;
  }

 private:
  ContextPtr ctx_;
  MonomialOrder order_;
  std::vector<Polynomial> generators_;
  std::vector<Monomial> leads_;
};

/// Leading term of p under `order`. Requires a nonzero p.
const Term& leading_term(const Polynomial& p, const MonomialOrder& order);

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, const MonomialOrder& order);

/// Full multivariate division remainder: no term of the result is divisible
/// by a leading monomial of G, and f minus the result lies in <G>.
Polynomial normal_form(const Polynomial& f, std::span<const Polynomial> G,
                       const MonomialOrder& order = MonomialOrder::degrevlex());
Polynomial normal_form(const Polynomial& f, const GroebnerBasis& B);

struct Division {
  std::vector<Polynomial> quotients;
  Polynomial remainder;
};

/// Division with witnesses: f == sum quotients[i] * G[i] + remainder.
Division divide(const Polynomial& f, std::span<const Polynomial> G,
                const MonomialOrder& order = MonomialOrder::degrevlex());

/// Buchberger's algorithm with Gebauer-Moeller pair elimination and the
/// normal selection strategy. Deterministic for fixed input and order.
GroebnerBasis buchberger(std::span<const Polynomial> gens,
                         const MonomialOrder& order = MonomialOrder::degrevlex(),
                         const GroebnerBudget& budget = {});

bool in_ideal(const Polynomial& f, const GroebnerBasis& B);

/// f in sqrt(<S>), decided by 1 in <S, 1 - t*f> with a fresh variable t.
bool in_radical(const Polynomial& f, std::span<const Polynomial> S,
                const GroebnerBudget& budget = {});

/// Every f in fs lies in sqrt(<S>). The basis of <S> is computed once.
bool all_in_radical(std::span<const Polynomial> fs, std::span<const Polynomial> S,
                    const GroebnerBudget& budget = {});

/// <a> == <b>, by mutual membership against reduced bases.
bool same_ideal(std::span<const Polynomial> a, std::span<const Polynomial> b,
                const GroebnerBudget& budget = {});

/// Every variable in `vars` has a pure power among the leading monomials.
bool is_zero_dimensional(const GroebnerBasis& B, std::span<const std::size_t> vars);

/// Incrementally maintained basis of <S> used for repeated radical-membership
/// queries. Adding generators resumes Buchberger from the previous state
/// instead of starting over.
class RadicalMembership {
 public:
  explicit RadicalMembership(ContextPtr ctx, GroebnerBudget budget = {});
  ~RadicalMembership();
  RadicalMembership(RadicalMembership&&) noexcept;
  RadicalMembership& operator=(RadicalMembership&&) noexcept;

  /// S <- S u gens.
  void add(std::span<const Polynomial> gens);

  /// f in sqrt(<S>).
  bool contains(const Polynomial& f) const;
  bool contains_all(std::span<const Polynomial> fs) const;
  /// f in <S>.
  bool contains_in_ideal(const Polynomial& f) const;

  /// Reduced basis of <S> over the original context.
  GroebnerBasis basis() const;

  /// Elementary reduction steps spent so far (all queries included).
  std::size_t steps() const noexcept;

 private:
  struct State;
  ContextPtr ctx_;
  ContextPtr ctx_t_;
  std::unique_ptr<State> state_;
};

}  // namespace loopsynth
