#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace loopsynth {

/// Largest context a Monomial can index. Synthesis contexts stay well below
/// this (program vars + coefficients + z + t).
inline constexpr std::size_t kMaxVars = 48;

/// Dense exponent vector with cached total degree.
class Monomial {
 public:
  using Exponent = std::uint16_t;

  Monomial() = default;
  explicit Monomial(std::size_t nvars);
  Monomial(std::size_t nvars, std::span<const unsigned> exponents);

  static Monomial variable(std::size_t nvars, std::size_t index, unsigned power = 1);

  std::size_t size() const noexcept { return nvars_; }
  unsigned degree() const noexcept { return degree_; }
  unsigned operator[](std::size_t i) const noexcept { return exp_[i]; }
  void set(std::size_t i, unsigned e);
  bool is_one() const noexcept { return degree_ == 0; }

  /// Index of the only variable with a positive exponent, or -1.
  int pure_power_of() const noexcept;

  bool divides(const Monomial& other) const noexcept;
  bool coprime(const Monomial& other) const noexcept;
  Monomial operator*(const Monomial& other) const;
  /// Exact quotient; requires divisor.divides(*this).
  Monomial operator/(const Monomial& divisor) const;
  Monomial lcm(const Monomial& other) const;

  bool operator==(const Monomial& other) const noexcept;

  std::size_t hash() const noexcept;

 private:
  std::array<Exponent, kMaxVars> exp_{};
  std::uint32_t degree_ = 0;
  std::uint8_t nvars_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

enum class OrderKind : std::uint8_t {
  DegRevLex,
  Lex,
  /// The last context variable dominates (compared first by its exponent);
  /// ties broken by degrevlex on the others.
  EliminateLast,
};

/// Total, multiplicative monomial order with 1 as the minimum. Earlier
/// context variables are larger.
struct MonomialOrder {
  OrderKind kind = OrderKind::DegRevLex;

  static constexpr MonomialOrder degrevlex() { return {OrderKind::DegRevLex}; }
  static constexpr MonomialOrder lex() { return {OrderKind::Lex}; }
  static constexpr MonomialOrder eliminate_last() { return {OrderKind::EliminateLast}; }

  /// Negative, zero or positive as a <, ==, > b.
  int compare(const Monomial& a, const Monomial& b) const noexcept;

  bool operator==(const MonomialOrder&) const = default;
};

const char* to_string(OrderKind kind);

}  // namespace loopsynth
