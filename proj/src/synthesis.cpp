#include "loopsynth/synthesis.hpp"

#include <algorithm>
#include <chrono>

#include "loopsynth/errors.hpp"

namespace loopsynth {

namespace {

void require_in(const Polynomial& p, const ContextPtr& ctx, const char* what) {
  if (!same_context(p.context(), ctx))
    throw ContextMismatch(std::string(what) + " must be a polynomial in the program variables");
}

void check_deadline(const GroebnerBudget& budget) {
  if (budget.deadline && std::chrono::steady_clock::now() > *budget.deadline)
    throw BudgetExceeded("synthesis time budget exhausted");
}

}  // namespace

std::size_t LoopTemplate::coefficient_count() const {
  std::size_t l = 0;
  for (const auto& gi : generators) l += gi.size();
  return l;
}

void LoopTemplate::validate() const {
  if (!ctx) throw Error("template has no context");
  const std::size_t n = ctx->size();
  if (initial.size() != n)
    throw ArityMismatch("template has " + std::to_string(n) + " variables but " +
                        std::to_string(initial.size()) + " initial values");
  if (generators.size() != n)
    throw ArityMismatch("template needs one generator list per variable");
  require_in(guard, ctx, "guard");
  for (std::size_t i = 0; i < n; ++i) {
    if (generators[i].empty())
      throw ArityMismatch("generator list for '" + ctx->name(i) + "' is empty");
    for (const auto& f : generators[i]) require_in(f, ctx, "generator");
  }
}

Polynomial combine_guards(std::span<const Polynomial> guards, const ContextPtr& ctx) {
  Polynomial h = Polynomial::constant(ctx, 1);
  for (const auto& g : guards) h *= g;
  return h;
}

void InvariantSpec::validate(const ContextPtr& ctx) const {
  if (polys.empty()) throw Error("at least one invariant is required");
  for (const auto& g : polys) require_in(g, ctx, "invariant");
}

void ConcreteLoop::validate() const {
  if (!ctx) throw Error("loop has no context");
  if (initial.size() != ctx->size() || update.size() != ctx->size())
    throw ArityMismatch("loop needs one initial value and one update per variable");
  require_in(guard, ctx, "guard");
  for (const auto& f : update) require_in(f, ctx, "update");
}

InvariantSetResult invariant_set(std::span<const Polynomial> g, std::span<const Polynomial> F,
                                 const SynthesisOptions& options) {
  if (g.empty()) throw Error("invariant_set: no polynomials given");
  const ContextPtr& ctx = g.front().context();
  if (F.size() != ctx->size()) throw ArityMismatch("invariant_set: map arity differs from context size");

  InvariantSetResult result;
  RadicalMembership membership(ctx, options.budget);
  result.polys.assign(g.begin(), g.end());
  membership.add(g);
  result.rounds = 1;
  std::vector<Polynomial> batch = compose_all(g, F);
  while (!membership.contains_all(batch)) {
    if (result.rounds >= options.max_rounds)
      throw BudgetExceeded("invariant set did not stabilize within " +
                           std::to_string(options.max_rounds) + " rounds");
    check_deadline(options.budget);
    result.polys.insert(result.polys.end(), batch.begin(), batch.end());
    membership.add(batch);
    ++result.rounds;
    batch = compose_all(batch, F);
    check_deadline(options.budget);
  }
  result.final_batch = std::move(batch);
  return result;
}

AugmentedMap build_augmented_map(const LoopTemplate& t) {
  t.validate();
  const auto& x = *t.ctx;
  std::vector<VarContext::Variable> extra;
  auto taken = [&](const std::string& name) {
    return x.index_of(name) || std::any_of(extra.begin(), extra.end(),
                                           [&](const auto& v) { return v.name == name; });
  };
  auto fresh = [&](std::string name) {
    while (taken(name)) name += '_';
    return name;
  };
  const std::size_t l = t.coefficient_count();
  for (std::size_t k = 1; k <= l; ++k) extra.push_back({fresh("y" + std::to_string(k)), VarBlock::Coefficient});
  extra.push_back({fresh("z"), VarBlock::Guard});
  AugmentedMap out;
  out.ctx = t.ctx->with(std::move(extra));
  const std::size_t n = x.size();

  std::size_t y = n;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial sum(out.ctx);
    for (const auto& f : t.generators[i]) {
      sum += Polynomial::variable(out.ctx, y) * extend_context(f, out.ctx);
      ++y;
    }
    out.components.push_back(std::move(sum));
  }
  for (std::size_t k = 0; k < l; ++k) out.components.push_back(Polynomial::variable(out.ctx, n + k));
  const std::size_t z = n + l;
  out.components.push_back(Polynomial::variable(out.ctx, z) * extend_context(t.guard, out.ctx));
  return out;
}

SynthesisSystem generate_loops(const LoopTemplate& t, const InvariantSpec& inv,
                               const SynthesisOptions& options) {
  t.validate();
  inv.validate(t.ctx);
  const AugmentedMap G = build_augmented_map(t);
  const std::size_t n = t.ctx->size();
  const std::size_t l = t.coefficient_count();
  const Polynomial z = Polynomial::variable(G.ctx, n + l);

  std::vector<Polynomial> zg;
  for (const auto& g : inv.polys) zg.push_back(z * extend_context(g, G.ctx));
  InvariantSetResult S = invariant_set(zg, G.components, options);

  std::vector<VarContext::Variable> yvars;
  for (std::size_t k = 0; k < l; ++k) yvars.push_back(G.ctx->variables()[n + k]);

  SynthesisSystem sys;
  sys.ctx = VarContext::make(std::move(yvars));
  sys.rounds = S.rounds;
  Bindings at_start;
  for (std::size_t i = 0; i < n; ++i) at_start[G.ctx->name(i)] = t.initial[i];
  at_start[G.ctx->name(n + l)] = 1;
  for (std::size_t q = 0; q < S.polys.size(); ++q) {
    Polynomial p = substitute(S.polys[q], at_start);
    if (p.is_zero()) continue;
    sys.polys.push_back(restrict_context(p, sys.ctx));
    sys.source_index.push_back(q);
  }
  sys.pre_substitution = std::move(S.polys);
  return sys;
}

ConcreteLoop instantiate(const LoopTemplate& t, std::span<const Rational> b) {
  t.validate();
  if (b.size() != t.coefficient_count())
    throw ArityMismatch("expected " + std::to_string(t.coefficient_count()) + " coefficients, got " +
                        std::to_string(b.size()));
  ConcreteLoop loop{t.ctx, t.initial, t.guard, {}};
  std::size_t k = 0;
  for (const auto& gi : t.generators) {
    Polynomial sum(t.ctx);
    for (const auto& f : gi) sum += f * b[k++];
    loop.update.push_back(std::move(sum));
  }
  return loop;
}

bool check_invariants(const ConcreteLoop& loop, const InvariantSpec& inv, const SynthesisOptions& options) {
  loop.validate();
  inv.validate(loop.ctx);
  const auto ctx = loop.ctx->with({{loop.ctx->fresh_name("z"), VarBlock::Guard}});
  const std::size_t n = loop.ctx->size();
  const Polynomial z = Polynomial::variable(ctx, n);

  std::vector<Polynomial> G;
  for (const auto& f : loop.update) G.push_back(extend_context(f, ctx));
  G.push_back(z * extend_context(loop.guard, ctx));
  std::vector<Polynomial> zg;
  for (const auto& g : inv.polys) zg.push_back(z * extend_context(g, ctx));

  const InvariantSetResult S = invariant_set(zg, G, options);
  std::vector<Rational> start = loop.initial;
  start.push_back(1);
  return std::all_of(S.polys.begin(), S.polys.end(),
                     [&](const Polynomial& q) { return evaluate(q, start) == 0; });
}

bool simulate(const ConcreteLoop& loop, const InvariantSpec& inv, std::size_t max_steps) {
  loop.validate();
  inv.validate(loop.ctx);
  if (max_steps == 0) throw Error("simulate: step bound must be positive");
  std::vector<Rational> state = loop.initial;
  for (std::size_t step = 0;; ++step) {
    for (const auto& g : inv.polys) {
      if (evaluate(g, state) != 0) return false;
    }
    if (evaluate(loop.guard, state) == 0 || step == max_steps) return true;
    std::vector<Rational> next;
    next.reserve(state.size());
    for (const auto& f : loop.update) next.push_back(evaluate(f, state));
    state = std::move(next);
  }
}

}  // namespace loopsynth
