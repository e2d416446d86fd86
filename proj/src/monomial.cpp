#include "loopsynth/monomial.hpp"

#include <algorithm>
#include <limits>

#include "loopsynth/errors.hpp"

namespace loopsynth {

namespace {

Monomial::Exponent checked_exponent(unsigned long e) {
  if (e > std::numeric_limits<Monomial::Exponent>::max())
    throw Error("exponent overflow (" + std::to_string(e) + ")");
  return static_cast<Monomial::Exponent>(e);
}

}  // namespace

Monomial::Monomial(std::size_t nvars) : nvars_(static_cast<std::uint8_t>(nvars)) {
  if (nvars > kMaxVars) throw Error("too many variables for a monomial");
}

Monomial::Monomial(std::size_t nvars, std::span<const unsigned> exponents) : Monomial(nvars) {
  if (exponents.size() != nvars) throw ArityMismatch("exponent vector length mismatch");
  for (std::size_t i = 0; i < nvars; ++i) set(i, exponents[i]);
}

Monomial Monomial::variable(std::size_t nvars, std::size_t index, unsigned power) {
  Monomial m(nvars);
  m.set(index, power);
  return m;
}

void Monomial::set(std::size_t i, unsigned e) {
  degree_ -= exp_[i];
  exp_[i] = checked_exponent(e);
  degree_ += e;
}

int Monomial::pure_power_of() const noexcept {
  int found = -1;
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (exp_[i] != 0) {
      if (found >= 0) return -1;
      found = static_cast<int>(i);
    }
  }
  return found;
}

bool Monomial::divides(const Monomial& other) const noexcept {
  if (degree_ > other.degree_) return false;
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (exp_[i] > other.exp_[i]) return false;
  }
  return true;
}

bool Monomial::coprime(const Monomial& other) const noexcept {
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (exp_[i] != 0 && other.exp_[i] != 0) return false;
  }
  return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i)
    r.exp_[i] = checked_exponent(static_cast<unsigned long>(exp_[i]) + other.exp_[i]);
  r.degree_ = degree_ + other.degree_;
  return r;
}

Monomial Monomial::operator/(const Monomial& divisor) const {
  Monomial r(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i)
    r.exp_[i] = static_cast<Exponent>(exp_[i] - divisor.exp_[i]);
  r.degree_ = degree_ - divisor.degree_;
  return r;
}

Monomial Monomial::lcm(const Monomial& other) const {
  Monomial r(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    r.exp_[i] = std::max(exp_[i], other.exp_[i]);
    r.degree_ += r.exp_[i];
  }
  return r;
}

bool Monomial::operator==(const Monomial& other) const noexcept {
  if (degree_ != other.degree_ || nvars_ != other.nvars_) return false;
  return std::equal(exp_.begin(), exp_.begin() + nvars_, other.exp_.begin());
}

std::size_t Monomial::hash() const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < nvars_; ++i) {
    h ^= exp_[i];
    h *= 1099511628211ull;
  }
  return h;
}

int MonomialOrder::compare(const Monomial& a, const Monomial& b) const noexcept {
  const std::size_t n = a.size();
  switch (kind) {
    case OrderKind::Lex:
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
      }
      return 0;
    case OrderKind::DegRevLex:
      if (a.degree() != b.degree()) return a.degree() > b.degree() ? 1 : -1;
      for (std::size_t i = n; i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
      }
      return 0;
    case OrderKind::EliminateLast: {
      if (n == 0) return 0;
      const std::size_t last = n - 1;
      if (a[last] != b[last]) return a[last] > b[last] ? 1 : -1;
      const unsigned da = a.degree() - a[last];
      const unsigned db = b.degree() - b[last];
      if (da != db) return da > db ? 1 : -1;
      for (std::size_t i = last; i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
      }
      return 0;
    }
  }
  return 0;
}

const char* to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::DegRevLex: return "degrevlex";
    case OrderKind::Lex: return "lex";
    case OrderKind::EliminateLast: return "eliminate-last";
  }
  return "?";
}

}  // namespace loopsynth
