#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loopsynth {

/// Role of a variable inside a context. Contexts list blocks in this order:
/// program variables, template coefficients, the guard flag, auxiliaries.
enum class VarBlock : std::uint8_t { Program, Coefficient, Guard, Auxiliary };

class VarContext;
using ContextPtr = std::shared_ptr<const VarContext>;

/// Immutable, ordered list of variable names. The position of a name is its
/// index in every exponent vector built over this context.
class VarContext {
 public:
  struct Variable {
    std::string name;
    VarBlock block = VarBlock::Program;
    bool operator==(const Variable&) const = default;
  };

  static ContextPtr make(std::vector<Variable> vars);
  static ContextPtr of_program(const std::vector<std::string>& names);

  std::size_t size() const noexcept { return vars_.size(); }
  const std::string& name(std::size_t i) const { return vars_.at(i).name; }
  VarBlock block(std::size_t i) const { return vars_.at(i).block; }
  const std::vector<Variable>& variables() const noexcept { return vars_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Like index_of but throws UnknownVariable.
  std::size_t require_index(std::string_view name) const;
  std::vector<std::size_t> indices(VarBlock block) const;

  /// A new context with `extra` appended after the existing variables.
  ContextPtr with(std::vector<Variable> extra) const;

  /// True when every variable here also occurs in `other`, in the same
  /// relative order.
  bool embeds_into(const VarContext& other) const;

  /// `base` if unused, otherwise `base` followed by underscores until unique.
  std::string fresh_name(std::string_view base) const;

  bool operator==(const VarContext& other) const { return vars_ == other.vars_; }

 private:
  explicit VarContext(std::vector<Variable> vars) : vars_(std::move(vars)) {}
  std::vector<Variable> vars_;
};

inline bool same_context(const ContextPtr& a, const ContextPtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace loopsynth
