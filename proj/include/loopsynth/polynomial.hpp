#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loopsynth/monomial.hpp"
#include "loopsynth/rational.hpp"
#include "loopsynth/var_context.hpp"

namespace loopsynth {

struct Term {
  Monomial monomial;
  Rational coeff;
  bool operator==(const Term& other) const {
    return monomial == other.monomial && coeff == other.coeff;
  }
};

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are kept sorted by decreasing degrevlex order with no zero
/// coefficients, so two polynomials over the same context are equal exactly
/// when their term vectors are equal.
class Polynomial {
 public:
  explicit Polynomial(ContextPtr ctx);

  /// Builds from arbitrary terms; like monomials are merged and zeros dropped.
  Polynomial(ContextPtr ctx, std::vector<Term> terms);

  static Polynomial constant(ContextPtr ctx, const Rational& c);
  static Polynomial variable(ContextPtr ctx, std::size_t index);
  static Polynomial variable(ContextPtr ctx, std::string_view name);

  const ContextPtr& context() const noexcept { return ctx_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  /// Constant term (zero if absent).
  Rational constant_term() const;
  /// -1 for the zero polynomial.
  int total_degree() const noexcept;
  unsigned degree_in(std::size_t var) const noexcept;
  /// True when some term has a positive exponent at `var`.
  bool involves(std::size_t var) const noexcept;
  /// Variables with positive exponent in some term, ascending.
  std::vector<std::size_t> support() const;

  /// Leading term under degrevlex (the storage order). Requires !is_zero().
  const Term& leading_term() const { return terms_.front(); }

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }

  /// Multiplies by c * m.
  Polynomial mul_term(const Monomial& m, const Rational& c) const;
  Polynomial pow(unsigned k) const;

  bool operator==(const Polynomial& other) const;
  bool operator!=(const Polynomial& other) const { return !(*this == other); }

 private:
  void require_same(const Polynomial& other) const;

  ContextPtr ctx_;
  std::vector<Term> terms_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);

/// g(F_1, ..., F_k) where k is the size of g's context. The result lives in
/// the context shared by the F_i.
Polynomial compose(const Polynomial& g, std::span<const Polynomial> map);
std::vector<Polynomial> compose_all(std::span<const Polynomial> gs,
                                    std::span<const Polynomial> map);

using Bindings = std::map<std::string, Rational, std::less<>>;

/// Replaces bound variables by values; the result keeps the original context.
Polynomial substitute(const Polynomial& p, const Bindings& bindings);

/// Exact value with every context variable bound by name.
Rational evaluate(const Polynomial& p, const Bindings& point);
/// Exact value at a point given in context order.
Rational evaluate(const Polynomial& p, std::span<const Rational> point);

/// Re-indexes p into a context that contains its own as an ordered subset.
Polynomial extend_context(const Polynomial& p, const ContextPtr& target);

/// Re-indexes p into a smaller context; every variable p actually uses must
/// exist in `target`.
Polynomial restrict_context(const Polynomial& p, const ContextPtr& target);

/// Integer-coefficient associate: denominators cleared, integer content
/// removed, leading coefficient positive. Zero stays zero.
Polynomial primitive_part(const Polynomial& p);

/// Scales p so the leading coefficient is 1.
Polynomial monic(const Polynomial& p);

/// True when p = c * q for some nonzero rational c.
bool associates(const Polynomial& p, const Polynomial& q);

/// Human-readable canonical rendering, e.g. `x1^2 + x1*x2 - 3/2*x2`.
std::string to_string(const Polynomial& p);

/// Parses an expression over the context's variables. Supports + - * / ^,
/// parentheses and rational literals; `/` only by nonzero constants.
Polynomial parse_polynomial(std::string_view text, const ContextPtr& ctx);

}  // namespace loopsynth
