#include "loopsynth/var_context.hpp"

#include <algorithm>
#include <unordered_set>

#include "loopsynth/errors.hpp"
#include "loopsynth/monomial.hpp"

namespace loopsynth {

ContextPtr VarContext::make(std::vector<Variable> vars) {
  if (vars.size() > kMaxVars)
    throw Error("context has " + std::to_string(vars.size()) + " variables; at most " +
                std::to_string(kMaxVars) + " are supported");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name.empty()) throw Error("empty variable name");
    if (!seen.insert(vars[i].name).second)
      throw Error("duplicate variable name '" + vars[i].name + "'");
    if (i > 0 && vars[i].block < vars[i - 1].block)
      throw Error("variable '" + vars[i].name + "' is out of block order");
  }
  return ContextPtr(new VarContext(std::move(vars)));
}

ContextPtr VarContext::of_program(const std::vector<std::string>& names) {
  std::vector<Variable> vars;
  vars.reserve(names.size());
  for (const auto& n : names) vars.push_back({n, VarBlock::Program});
  return make(std::move(vars));
}

std::optional<std::size_t> VarContext::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t VarContext::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw UnknownVariable(std::string(name));
}

std::vector<std::size_t> VarContext::indices(VarBlock block) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].block == block) out.push_back(i);
  }
  return out;
}

ContextPtr VarContext::with(std::vector<Variable> extra) const {
  auto all = vars_;
  all.insert(all.end(), std::make_move_iterator(extra.begin()),
             std::make_move_iterator(extra.end()));
  return make(std::move(all));
}

bool VarContext::embeds_into(const VarContext& other) const {
  std::size_t last = 0;
  bool first = true;
  for (const auto& v : vars_) {
    auto j = other.index_of(v.name);
    if (!j) return false;
    if (!first && *j <= last) return false;
    last = *j;
    first = false;
  }
  return true;
}

std::string VarContext::fresh_name(std::string_view base) const {
  std::string name(base);
  while (index_of(name)) name += '_';
  return name;
}

}  // namespace loopsynth
