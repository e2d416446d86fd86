#include "loopsynth/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "loopsynth/errors.hpp"

namespace loopsynth {

namespace {

constexpr MonomialOrder kStorageOrder = MonomialOrder::degrevlex();

bool term_greater(const Term& a, const Term& b) {
  return kStorageOrder.compare(a.monomial, b.monomial) > 0;
}

using Accumulator = std::unordered_map<Monomial, Rational, MonomialHash>;

std::vector<Term> drain(Accumulator& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (c != 0) out.push_back({m, std::move(c)});
  }
  std::sort(out.begin(), out.end(), term_greater);
  return out;
}

// Merge of two sorted term lists with b scaled by `sign`.
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int c = kStorageOrder.compare(a[i].monomial, b[j].monomial);
    if (c > 0) {
      out.push_back(a[i++]);
    } else if (c < 0) {
      out.push_back({b[j].monomial, sign > 0 ? b[j].coeff : Rational(-b[j].coeff)});
      ++j;
    } else {
      Rational s = sign > 0 ? Rational(a[i].coeff + b[j].coeff) : Rational(a[i].coeff - b[j].coeff);
      if (s != 0) out.push_back({a[i].monomial, std::move(s)});
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j)
    out.push_back({b[j].monomial, sign > 0 ? b[j].coeff : Rational(-b[j].coeff)});
  return out;
}

Polynomial product(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial(a.context());
  if (a.size() == 1) return b.mul_term(a.terms()[0].monomial, a.terms()[0].coeff);
  if (b.size() == 1) return a.mul_term(b.terms()[0].monomial, b.terms()[0].coeff);
  Accumulator acc;
  acc.reserve(a.size() * b.size());
  Rational tmp;
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) {
      tmp = s.coeff * t.coeff;
      acc[s.monomial * t.monomial] += tmp;
    }
  }
  return Polynomial(a.context(), drain(acc));
}

}  // namespace

Polynomial::Polynomial(ContextPtr ctx) : ctx_(std::move(ctx)) {
  if (!ctx_) throw Error("polynomial requires a context");
}

Polynomial::Polynomial(ContextPtr ctx, std::vector<Term> terms) : Polynomial(std::move(ctx)) {
  const bool sorted_unique =
      std::adjacent_find(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        return !term_greater(a, b);
      }) == terms.end();
  for (const auto& t : terms) {
    if (t.monomial.size() != ctx_->size())
      throw ArityMismatch("monomial length does not match context size");
  }
  if (sorted_unique) {
    terms_.reserve(terms.size());
    for (auto& t : terms) {
      if (t.coeff != 0) terms_.push_back(std::move(t));
    }
    return;
  }
  Accumulator acc;
  for (auto& t : terms) acc[t.monomial] += t.coeff;
  terms_ = drain(acc);
}

Polynomial Polynomial::constant(ContextPtr ctx, const Rational& c) {
  Polynomial p(std::move(ctx));
  if (c != 0) p.terms_.push_back({Monomial(p.ctx_->size()), c});
  return p;
}

Polynomial Polynomial::variable(ContextPtr ctx, std::size_t index) {
  Polynomial p(std::move(ctx));
  if (index >= p.ctx_->size()) throw ArityMismatch("variable index out of range");
  p.terms_.push_back({Monomial::variable(p.ctx_->size(), index), Rational(1)});
  return p;
}

Polynomial Polynomial::variable(ContextPtr ctx, std::string_view name) {
  const auto i = ctx->require_index(name);
  return variable(std::move(ctx), i);
}

bool Polynomial::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one());
}

Rational Polynomial::constant_term() const {
  if (!terms_.empty() && terms_.back().monomial.is_one()) return terms_.back().coeff;
  return 0;
}

int Polynomial::total_degree() const noexcept {
  // Storage order is degree-compatible, so the first term has maximal degree.
  return terms_.empty() ? -1 : static_cast<int>(terms_.front().monomial.degree());
}

unsigned Polynomial::degree_in(std::size_t var) const noexcept {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.monomial[var]);
  return d;
}

bool Polynomial::involves(std::size_t var) const noexcept {
  return std::any_of(terms_.begin(), terms_.end(),
                     [var](const Term& t) { return t.monomial[var] != 0; });
}

std::vector<std::size_t> Polynomial::support() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < ctx_->size(); ++v) {
    if (involves(v)) out.push_back(v);
  }
  return out;
}

void Polynomial::require_same(const Polynomial& other) const {
  if (!same_context(ctx_, other.ctx_)) throw ContextMismatch();
}

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same(other);
  terms_ = merge(terms_, other.terms_, +1);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same(other);
  terms_ = merge(terms_, other.terms_, -1);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  require_same(other);
  *this = product(*this, other);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.coeff *= c;
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.require_same(b);
  return product(a, b);
}

Polynomial Polynomial::mul_term(const Monomial& m, const Rational& c) const {
  Polynomial r(ctx_);
  if (c == 0) return r;
  r.terms_.reserve(terms_.size());
  // Multiplying by a monomial preserves any multiplicative order.
  for (const auto& t : terms_) r.terms_.push_back({t.monomial * m, t.coeff * c});
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(ctx_, 1);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1u) result = product(result, base);
    k >>= 1u;
    if (k > 0) base = product(base, base);
  }
  return result;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return same_context(ctx_, other.ctx_) && terms_ == other.terms_;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

namespace {

// Powers of one map component, built on demand.
class PowerCache {
 public:
  explicit PowerCache(const Polynomial& base) : powers_{Polynomial::constant(base.context(), 1), base} {}
  const Polynomial& get(unsigned k) {
    while (powers_.size() <= k) powers_.push_back(powers_.back() * powers_[1]);
    return powers_[k];
  }

 private:
  std::vector<Polynomial> powers_;
};

// Sum over `terms` (all agreeing on exponents of variables < var) of
// coeff * prod_{i >= var} F_i^{e_i}, grouping by the exponent of `var`.
Polynomial compose_group(std::vector<const Term*>& terms, std::size_t var,
                         std::vector<PowerCache>& powers, const ContextPtr& target) {
  const std::size_t n = powers.size();
  if (var == n) {
    Rational c = 0;
    for (const Term* t : terms) c += t->coeff;
    return Polynomial::constant(target, c);
  }
  std::stable_sort(terms.begin(), terms.end(), [var](const Term* a, const Term* b) {
    return a->monomial[var] < b->monomial[var];
  });
  Polynomial sum(target);
  std::size_t i = 0;
  while (i < terms.size()) {
    const unsigned e = terms[i]->monomial[var];
    std::size_t j = i;
    while (j < terms.size() && terms[j]->monomial[var] == e) ++j;
    std::vector<const Term*> group(terms.begin() + static_cast<std::ptrdiff_t>(i),
                                   terms.begin() + static_cast<std::ptrdiff_t>(j));
    Polynomial inner = compose_group(group, var + 1, powers, target);
    if (!inner.is_zero()) sum += e == 0 ? inner : inner * powers[var].get(e);
    i = j;
  }
  return sum;
}

}  // namespace

Polynomial compose(const Polynomial& g, std::span<const Polynomial> map) {
  if (map.size() != g.context()->size())
    throw ArityMismatch("compose: map has " + std::to_string(map.size()) +
                        " components but the polynomial has " +
                        std::to_string(g.context()->size()) + " variables");
  if (map.empty()) return g;
  const ContextPtr& target = map.front().context();
  for (const auto& f : map) {
    if (!same_context(f.context(), target)) throw ContextMismatch();
  }
  std::vector<PowerCache> powers;
  powers.reserve(map.size());
  for (const auto& f : map) powers.emplace_back(f);
  std::vector<const Term*> all;
  all.reserve(g.size());
  for (const auto& t : g.terms()) all.push_back(&t);
  return compose_group(all, 0, powers, target);
}

std::vector<Polynomial> compose_all(std::span<const Polynomial> gs,
                                    std::span<const Polynomial> map) {
  std::vector<Polynomial> out;
  out.reserve(gs.size());
  for (const auto& g : gs) out.push_back(compose(g, map));
  return out;
}

Polynomial substitute(const Polynomial& p, const Bindings& bindings) {
  const auto& ctx = p.context();
  std::vector<std::pair<std::size_t, const Rational*>> bound;
  for (const auto& [name, value] : bindings) bound.emplace_back(ctx->require_index(name), &value);
  if (bound.empty()) return p;
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Rational c = t.coeff;
    Monomial m = t.monomial;
    for (const auto& [i, v] : bound) {
      const unsigned e = m[i];
      if (e == 0) continue;
      Rational f;
      mpz_pow_ui(f.get_num_mpz_t(), v->get_num_mpz_t(), e);
      mpz_pow_ui(f.get_den_mpz_t(), v->get_den_mpz_t(), e);
      c *= f;
      m.set(i, 0);
    }
    if (c != 0) out.push_back({m, std::move(c)});
  }
  return Polynomial(ctx, std::move(out));
}

Rational evaluate(const Polynomial& p, std::span<const Rational> point) {
  const std::size_t n = p.context()->size();
  if (point.size() != n) throw ArityMismatch("evaluate: point dimension mismatch");
  Rational sum = 0;
  Rational f;
  for (const auto& t : p.terms()) {
    Rational v = t.coeff;
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned e = t.monomial[i];
      if (e == 0) continue;
      mpz_pow_ui(f.get_num_mpz_t(), point[i].get_num_mpz_t(), e);
      mpz_pow_ui(f.get_den_mpz_t(), point[i].get_den_mpz_t(), e);
      v *= f;
    }
    sum += v;
  }
  return sum;
}

Rational evaluate(const Polynomial& p, const Bindings& point) {
  const auto& ctx = p.context();
  for (const auto& [name, value] : point) ctx->require_index(name);
  std::vector<Rational> values(ctx->size());
  for (std::size_t i = 0; i < ctx->size(); ++i) {
    auto it = point.find(ctx->name(i));
    if (it == point.end()) throw MissingBinding(ctx->name(i));
    values[i] = it->second;
  }
  return evaluate(p, values);
}

namespace {

Polynomial reindex(const Polynomial& p, const ContextPtr& target,
                   const std::vector<std::ptrdiff_t>& where) {
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Monomial m(target->size());
    for (std::size_t i = 0; i < where.size(); ++i) {
      if (t.monomial[i] == 0) continue;
      if (where[i] < 0)
        throw ContextMismatch("variable '" + p.context()->name(i) +
                              "' does not exist in the target context");
      m.set(static_cast<std::size_t>(where[i]), t.monomial[i]);
    }
    out.push_back({m, t.coeff});
  }
  return Polynomial(target, std::move(out));
}

}  // namespace

Polynomial extend_context(const Polynomial& p, const ContextPtr& target) {
  if (same_context(p.context(), target)) return Polynomial(target, p.terms());
  if (!p.context()->embeds_into(*target))
    throw ContextMismatch("context does not embed into the target context");
  std::vector<std::ptrdiff_t> where;
  for (const auto& v : p.context()->variables())
    where.push_back(static_cast<std::ptrdiff_t>(*target->index_of(v.name)));
  return reindex(p, target, where);
}

Polynomial restrict_context(const Polynomial& p, const ContextPtr& target) {
  std::vector<std::ptrdiff_t> where;
  for (const auto& v : p.context()->variables()) {
    auto j = target->index_of(v.name);
    where.push_back(j ? static_cast<std::ptrdiff_t>(*j) : -1);
  }
  return reindex(p, target, where);
}

Polynomial primitive_part(const Polynomial& p) {
  if (p.is_zero()) return p;
  Integer den_lcm = 1;
  for (const auto& t : p.terms()) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coeff.get_den_mpz_t());
  Integer content = 0;
  for (const auto& t : p.terms()) {
    Integer num = t.coeff.get_num() * (den_lcm / t.coeff.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), num.get_mpz_t());
  }
  Rational scale(den_lcm, content);
  scale.canonicalize();
  if (p.leading_term().coeff < 0) scale = -scale;
  return p * scale;
}

Polynomial monic(const Polynomial& p) {
  if (p.is_zero()) return p;
  return p * Rational(1 / p.leading_term().coeff);
}

bool associates(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
  return monic(p) == monic(q);
}

}  // namespace loopsynth
