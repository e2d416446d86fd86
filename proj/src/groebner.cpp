#include "loopsynth/groebner.hpp"

#include <algorithm>
#include <atomic>
#include <map>

#include "loopsynth/errors.hpp"

namespace loopsynth {

GroebnerBudget GroebnerBudget::for_seconds(double seconds) {
  GroebnerBudget b;
  b.deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(seconds));
  return b;
}

namespace {

// Bitmask of variables with positive exponent; a fast necessary condition
// for divisibility.
std::uint64_t support_mask(const Monomial& m) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] != 0) mask |= std::uint64_t{1} << (i % 64);
  }
  return mask;
}

struct OrderGreater {
  MonomialOrder order;
  bool operator()(const Monomial& a, const Monomial& b) const { return order.compare(a, b) > 0; }
};

// Polynomial with terms sorted decreasingly under the engine's order.
struct OPoly {
  std::vector<Term> terms;
  std::uint64_t lead_mask = 0;

  bool is_zero() const { return terms.empty(); }
  const Monomial& lm() const { return terms.front().monomial; }
  const Rational& lc() const { return terms.front().coeff; }
  bool is_constant() const { return !terms.empty() && terms.front().monomial.is_one(); }
  void refresh() { lead_mask = terms.empty() ? 0 : support_mask(lm()); }
  void make_monic() {
    if (terms.empty() || terms.front().coeff == 1) return;
    const Rational inv = 1 / terms.front().coeff;
    for (auto& t : terms) t.coeff *= inv;
  }
};

OPoly to_opoly(const Polynomial& p, const MonomialOrder& order) {
  OPoly o;
  o.terms = p.terms();
  if (order.kind != OrderKind::DegRevLex) {
    std::sort(o.terms.begin(), o.terms.end(), [&](const Term& a, const Term& b) {
      return order.compare(a.monomial, b.monomial) > 0;
    });
  }
  o.refresh();
  return o;
}

Polynomial to_polynomial(const OPoly& o, const ContextPtr& ctx) {
  return Polynomial(ctx, o.terms);
}

class StepCounter {
 public:
  explicit StepCounter(const GroebnerBudget& budget) : budget_(budget) {}
  void tick() {
    ++steps_;
    if (budget_.max_steps != 0 && steps_ > budget_.max_steps)
      throw BudgetExceeded("Groebner step budget exhausted");
    if (budget_.deadline && (steps_ & 0xFFu) == 0 &&
        std::chrono::steady_clock::now() > *budget_.deadline)
      throw BudgetExceeded("Groebner time budget exhausted");
  }
  void check_clock() const {
    if (budget_.deadline && std::chrono::steady_clock::now() > *budget_.deadline)
      throw BudgetExceeded("Groebner time budget exhausted");
  }
  std::size_t steps() const { return steps_; }
  void set_budget(const GroebnerBudget& budget) { budget_ = budget; }

 private:
  GroebnerBudget budget_;
  std::size_t steps_ = 0;
};

// Reduces `f` completely by `reducers` (all monic). Returns the remainder,
// sorted under the order.
template <typename Reducers>
OPoly full_reduce(const OPoly& f, const Reducers& reducers, const MonomialOrder& order,
                  StepCounter& counter) {
  using Work = std::map<Monomial, Rational, OrderGreater>;
  Work work(OrderGreater{order});
  for (const auto& t : f.terms) work.emplace_hint(work.end(), t.monomial, t.coeff);
  OPoly rem;
  Rational scaled;
  while (!work.empty()) {
    auto it = work.begin();
    const Monomial m = it->first;
    const std::uint64_t mask = support_mask(m);
    const OPoly* red = nullptr;
    for (const OPoly* g : reducers) {
      if ((g->lead_mask & ~mask) == 0 && g->lm().divides(m)) {
        red = g;
        break;
      }
    }
    if (red == nullptr) {
      rem.terms.push_back({m, std::move(it->second)});
      work.erase(it);
      continue;
    }
    const Rational c = std::move(it->second);
    work.erase(it);
    const Monomial q = m / red->lm();
    for (std::size_t k = 1; k < red->terms.size(); ++k) {
      const Term& t = red->terms[k];
      scaled = c * t.coeff;
      auto [pos, inserted] = work.try_emplace(t.monomial * q);
      pos->second -= scaled;
      if (pos->second == 0) work.erase(pos);
    }
    counter.tick();
  }
  rem.refresh();
  return rem;
}

struct Pair {
  std::size_t i;
  std::size_t j;
  Monomial lcm;
};

// Buchberger state: basis elements, which of them are still minimal, and the
// pending critical pairs.
class Engine {
 public:
  Engine(MonomialOrder order, GroebnerBudget budget) : order_(order), counter_(budget) {}

  bool unit() const { return unit_; }
  std::size_t steps() const { return counter_.steps(); }
  void set_budget(const GroebnerBudget& b) { counter_.set_budget(b); }
  const MonomialOrder& order() const { return order_; }

  std::vector<const OPoly*> reducers() const {
    std::vector<const OPoly*> out;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (active_[i]) out.push_back(&basis_[i]);
    }
    return out;
  }

  OPoly reduce(const OPoly& f) {
    if (unit_) return OPoly{};
    return full_reduce(f, reducers(), order_, counter_);
  }

  // Adds a generator; call run() afterwards to restore the basis property.
  void add(const OPoly& f) {
    if (unit_) return;
    OPoly h = reduce(f);
    if (h.is_zero()) return;
    insert(std::move(h));
  }

  void run() {
    while (!unit_ && !pairs_.empty()) {
      counter_.check_clock();
      auto best = pairs_.begin();
      for (auto it = pairs_.begin(); it != pairs_.end(); ++it) {
        if (it->lcm.degree() < best->lcm.degree() ||
            (it->lcm.degree() == best->lcm.degree() && order_.compare(it->lcm, best->lcm) < 0))
          best = it;
      }
      const Pair p = *best;
      pairs_.erase(best);
      OPoly s = spoly(basis_[p.i], basis_[p.j], p.lcm);
      OPoly h = full_reduce(s, reducers(), order_, counter_);
      if (!h.is_zero()) insert(std::move(h));
    }
  }

  // Interreduced, monic, sorted by increasing leading monomial.
  std::vector<OPoly> reduced_basis() {
    if (unit_) {
      OPoly one;
      one.terms.push_back({Monomial(nvars_), Rational(1)});
      one.refresh();
      return {one};
    }
    std::vector<const OPoly*> minimal = reducers();
    std::sort(minimal.begin(), minimal.end(), [&](const OPoly* a, const OPoly* b) {
      return order_.compare(a->lm(), b->lm()) < 0;
    });
    std::vector<OPoly> out;
    out.reserve(minimal.size());
    for (std::size_t k = 0; k < minimal.size(); ++k) {
      std::vector<const OPoly*> others;
      for (std::size_t j = 0; j < minimal.size(); ++j) {
        if (j != k) others.push_back(minimal[j]);
      }
      // The leading term is irreducible by the others (minimal basis), so
      // only tails change.
      OPoly tail;
      tail.terms.assign(minimal[k]->terms.begin() + 1, minimal[k]->terms.end());
      OPoly r = full_reduce(tail, others, order_, counter_);
      OPoly g;
      g.terms.reserve(r.terms.size() + 1);
      g.terms.push_back(minimal[k]->terms.front());
      for (auto& t : r.terms) g.terms.push_back(std::move(t));
      g.make_monic();
      g.refresh();
      out.push_back(std::move(g));
    }
    return out;
  }

  void set_nvars(std::size_t n) { nvars_ = n; }

 private:
  OPoly spoly(const OPoly& f, const OPoly& g, const Monomial& lcm) {
    using Work = std::map<Monomial, Rational, OrderGreater>;
    Work work(OrderGreater{order_});
    const Monomial uf = lcm / f.lm();
    const Monomial ug = lcm / g.lm();
    for (std::size_t k = 1; k < f.terms.size(); ++k)
      work.emplace(f.terms[k].monomial * uf, f.terms[k].coeff);
    for (std::size_t k = 1; k < g.terms.size(); ++k) {
      auto [pos, inserted] = work.try_emplace(g.terms[k].monomial * ug);
      pos->second -= g.terms[k].coeff;
      if (pos->second == 0) work.erase(pos);
    }
    OPoly s;
    s.terms.reserve(work.size());
    for (auto& [m, c] : work) s.terms.push_back({m, std::move(c)});
    s.refresh();
    return s;
  }

  // Gebauer-Moeller update with the new element h.
  void insert(OPoly h) {
    h.make_monic();
    h.refresh();
    if (h.is_constant()) {
      unit_ = true;
      pairs_.clear();
      return;
    }
    nvars_ = h.lm().size();
    const std::size_t hi = basis_.size();
    basis_.push_back(std::move(h));
    active_.push_back(true);
    const Monomial& hl = basis_[hi].lm();

    struct Cand {
      std::size_t g;
      Monomial lcm;
      bool coprime;
    };
    std::vector<Cand> cands;
    for (std::size_t g = 0; g < hi; ++g) {
      if (!active_[g]) continue;
      cands.push_back({g, hl.lcm(basis_[g].lm()), hl.coprime(basis_[g].lm())});
    }
    // Chain criterion among the new pairs (h,g): keep a pair only if it is
    // coprime or no other remaining/kept pair has an lcm dividing its lcm.
    std::vector<Cand> kept;
    for (std::size_t a = 0; a < cands.size(); ++a) {
      bool keep = cands[a].coprime;
      if (!keep) {
        keep = true;
        for (std::size_t b = a + 1; b < cands.size() && keep; ++b) {
          if (cands[b].lcm.divides(cands[a].lcm)) keep = false;
        }
        for (std::size_t k = 0; k < kept.size() && keep; ++k) {
          if (kept[k].lcm.divides(cands[a].lcm)) keep = false;
        }
      }
      if (keep) kept.push_back(cands[a]);
    }
    // Old pairs (g1,g2) become redundant when lm(h) divides their lcm strictly.
    std::vector<Pair> next;
    next.reserve(pairs_.size() + kept.size());
    for (auto& p : pairs_) {
      const bool redundant = hl.divides(p.lcm) && !(hl.lcm(basis_[p.i].lm()) == p.lcm) &&
                             !(hl.lcm(basis_[p.j].lm()) == p.lcm);
      if (!redundant) next.push_back(std::move(p));
    }
    for (auto& c : kept) {
      if (!c.coprime) next.push_back({c.g, hi, c.lcm});
    }
    pairs_ = std::move(next);
    for (std::size_t g = 0; g < hi; ++g) {
      if (active_[g] && hl.divides(basis_[g].lm())) active_[g] = false;
    }
  }

  MonomialOrder order_;
  StepCounter counter_;
  std::vector<OPoly> basis_;
  std::vector<bool> active_;
  std::vector<Pair> pairs_;
  bool unit_ = false;
  std::size_t nvars_ = 0;
};

ContextPtr with_rabinowitsch(const ContextPtr& ctx) {
  return ctx->with({{ctx->fresh_name("t"), VarBlock::Auxiliary}});
}

void require_context(std::span<const Polynomial> ps, const ContextPtr& ctx) {
  for (const auto& p : ps) {
    if (!same_context(p.context(), ctx)) throw ContextMismatch();
  }
}

}  // namespace

GroebnerBasis::GroebnerBasis(ContextPtr ctx, MonomialOrder order, std::vector<Polynomial> generators)
    : ctx_(std::move(ctx)), order_(order), generators_(std::move(generators)) {
  leads_.reserve(generators_.size());
  for (const auto& g : generators_) leads_.push_back(leading_term(g, order_).monomial);
}

bool GroebnerBasis::is_unit() const noexcept {
  return generators_.size() == 1 && generators_[0].is_constant() && !generators_[0].is_zero();
}

const Term& leading_term(const Polynomial& p, const MonomialOrder& order) {
  if (p.is_zero()) throw Error("leading term of the zero polynomial");
  if (order.kind == OrderKind::DegRevLex) return p.terms().front();
  const Term* best = &p.terms().front();
  for (const auto& t : p.terms()) {
    if (order.compare(t.monomial, best->monomial) > 0) best = &t;
  }
  return *best;
}

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, const MonomialOrder& order) {
  const Term& lf = leading_term(f, order);
  const Term& lg = leading_term(g, order);
  const Monomial l = lf.monomial.lcm(lg.monomial);
  return f.mul_term(l / lf.monomial, Rational(1 / lf.coeff)) -
         g.mul_term(l / lg.monomial, Rational(1 / lg.coeff));
}

Polynomial normal_form(const Polynomial& f, std::span<const Polynomial> G, const MonomialOrder& order) {
  require_context(G, f.context());
  std::vector<OPoly> reds;
  for (const auto& g : G) {
    if (g.is_zero()) continue;
    OPoly o = to_opoly(g, order);
    o.make_monic();
    reds.push_back(std::move(o));
  }
  std::vector<const OPoly*> ptrs;
  for (const auto& r : reds) ptrs.push_back(&r);
  StepCounter counter{GroebnerBudget{}};
  return to_polynomial(full_reduce(to_opoly(f, order), ptrs, order, counter), f.context());
}

Polynomial normal_form(const Polynomial& f, const GroebnerBasis& B) {
  return normal_form(f, B.generators(), B.order());
}

Division divide(const Polynomial& f, std::span<const Polynomial> G, const MonomialOrder& order) {
  require_context(G, f.context());
  const auto& ctx = f.context();
  Division d{std::vector<Polynomial>(G.size(), Polynomial(ctx)), Polynomial(ctx)};
  Polynomial rest = f;
  while (!rest.is_zero()) {
    const Term lt = leading_term(rest, order);
    bool divided = false;
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (G[i].is_zero()) continue;
      const Term& gl = leading_term(G[i], order);
      if (!gl.monomial.divides(lt.monomial)) continue;
      const Monomial q = lt.monomial / gl.monomial;
      const Rational c = lt.coeff / gl.coeff;
      d.quotients[i] += Polynomial(ctx, {{q, c}});
      rest -= G[i].mul_term(q, c);
      divided = true;
      break;
    }
    if (!divided) {
      const Polynomial lead(ctx, {lt});
      d.remainder += lead;
      rest -= lead;
    }
  }
  return d;
}

GroebnerBasis buchberger(std::span<const Polynomial> gens, const MonomialOrder& order,
                         const GroebnerBudget& budget) {
  if (gens.empty()) throw Error("buchberger: empty generator list");
  const ContextPtr& ctx = gens.front().context();
  require_context(gens, ctx);
  Engine engine(order, budget);
  engine.set_nvars(ctx->size());
  for (const auto& g : gens) {
    if (!g.is_zero()) engine.add(to_opoly(g, order));
  }
  engine.run();
  std::vector<Polynomial> out;
  for (const auto& o : engine.reduced_basis()) out.push_back(to_polynomial(o, ctx));
  return GroebnerBasis(ctx, order, std::move(out));
}

bool in_ideal(const Polynomial& f, const GroebnerBasis& B) {
  if (!same_context(f.context(), B.context())) throw ContextMismatch();
  return normal_form(f, B).is_zero();
}

bool in_radical(const Polynomial& f, std::span<const Polynomial> S, const GroebnerBudget& budget) {
  RadicalMembership rm(f.context(), budget);
  rm.add(S);
  return rm.contains(f);
}

bool all_in_radical(std::span<const Polynomial> fs, std::span<const Polynomial> S,
                    const GroebnerBudget& budget) {
  if (fs.empty()) return true;
  RadicalMembership rm(fs.front().context(), budget);
  rm.add(S);
  return rm.contains_all(fs);
}

bool same_ideal(std::span<const Polynomial> a, std::span<const Polynomial> b,
                const GroebnerBudget& budget) {
  auto nonzero = [](std::span<const Polynomial> ps) {
    return std::any_of(ps.begin(), ps.end(), [](const Polynomial& p) { return !p.is_zero(); });
  };
  if (!nonzero(a) || !nonzero(b)) return !nonzero(a) && !nonzero(b);
  const auto ga = buchberger(a, MonomialOrder::degrevlex(), budget);
  const auto gb = buchberger(b, MonomialOrder::degrevlex(), budget);
  return ga == gb;
}

bool is_zero_dimensional(const GroebnerBasis& B, std::span<const std::size_t> vars) {
  if (B.is_unit()) return true;
  for (std::size_t v : vars) {
    const bool has_pure_power =
        std::any_of(B.leading_monomials().begin(), B.leading_monomials().end(),
                    [v](const Monomial& m) { return m.pure_power_of() == static_cast<int>(v); });
    if (!has_pure_power) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

struct RadicalMembership::State {
  explicit State(const GroebnerBudget& b) : budget(b), engine(MonomialOrder::degrevlex(), b) {}
  GroebnerBudget budget;
  Engine engine;
  mutable std::atomic<std::size_t> query_steps{0};
};

RadicalMembership::RadicalMembership(ContextPtr ctx, GroebnerBudget budget)
    : ctx_(std::move(ctx)), ctx_t_(with_rabinowitsch(ctx_)), state_(std::make_unique<State>(budget)) {
  state_->engine.set_nvars(ctx_t_->size());
}

RadicalMembership::~RadicalMembership() = default;
RadicalMembership::RadicalMembership(RadicalMembership&&) noexcept = default;
RadicalMembership& RadicalMembership::operator=(RadicalMembership&&) noexcept = default;

void RadicalMembership::add(std::span<const Polynomial> gens) {
  require_context(gens, ctx_);
  const auto order = state_->engine.order();
  for (const auto& g : gens) {
    if (!g.is_zero()) state_->engine.add(to_opoly(extend_context(g, ctx_t_), order));
  }
  state_->engine.run();
}

bool RadicalMembership::contains_in_ideal(const Polynomial& f) const {
  if (!same_context(f.context(), ctx_)) throw ContextMismatch();
  Engine probe = state_->engine;
  const auto before = probe.steps();
  const bool zero = probe.reduce(to_opoly(extend_context(f, ctx_t_), probe.order())).is_zero();
  state_->query_steps += probe.steps() - before;
  return zero;
}

bool RadicalMembership::contains(const Polynomial& f) const {
  if (!same_context(f.context(), ctx_)) throw ContextMismatch();
  if (state_->engine.unit()) return true;
  Engine probe = state_->engine;
  const auto before = probe.steps();
  const auto& order = probe.order();
  const OPoly nf = probe.reduce(to_opoly(extend_context(f, ctx_t_), order));
  if (nf.is_zero()) {
    state_->query_steps += probe.steps() - before;
    return true;
  }
  // f is in the radical iff its normal form is; test 1 in <S, 1 - t*nf>.
  const std::size_t t = ctx_t_->size() - 1;
  const Polynomial nfp = to_polynomial(nf, ctx_t_);
  const Polynomial rab =
      Polynomial::constant(ctx_t_, 1) - nfp * Polynomial::variable(ctx_t_, t);
  probe.add(to_opoly(rab, order));
  probe.run();
  state_->query_steps += probe.steps() - before;
  return probe.unit();
}

bool RadicalMembership::contains_all(std::span<const Polynomial> fs) const {
  return std::all_of(fs.begin(), fs.end(), [this](const Polynomial& f) { return contains(f); });
}

GroebnerBasis RadicalMembership::basis() const {
  Engine copy = state_->engine;
  std::vector<Polynomial> out;
  for (const auto& o : copy.reduced_basis()) out.push_back(restrict_context(to_polynomial(o, ctx_t_), ctx_));
  return GroebnerBasis(ctx_, copy.order(), std::move(out));
}

std::size_t RadicalMembership::steps() const noexcept {
  return state_->engine.steps() + state_->query_steps.load();
}

}  // namespace loopsynth
