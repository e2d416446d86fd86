#include "loopsynth/problem.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "loopsynth/errors.hpp"

namespace loopsynth {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// A piece of a line together with its 1-based starting column.
struct Span {
  std::string_view text;
  std::size_t column;
};

Span trim(Span s) {
  while (!s.text.empty() && is_space(s.text.front())) {
    s.text.remove_prefix(1);
    ++s.column;
  }
  while (!s.text.empty() && is_space(s.text.back())) s.text.remove_suffix(1);
  return s;
}

std::vector<Span> split_commas(Span s) {
  std::vector<Span> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.text.size(); ++i) {
    if (i == s.text.size() || s.text[i] == ',') {
      out.push_back(trim({s.text.substr(start, i - start), s.column + start}));
      start = i + 1;
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class ProblemParser {
 public:
  explicit ProblemParser(std::string_view text) : text_(text) {}

  Problem run() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const auto nl = text_.find('\n', pos);
      std::string_view line = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no_;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      handle(line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish();
    return std::move(p_);
  }

 private:
  std::string_view text_;
  std::size_t line_no_ = 0;
  Problem p_;
  std::set<std::string> seen_;
  std::map<std::size_t, std::size_t> update_lines_, map_lines_;
  std::size_t vars_line_ = 0, init_line_ = 0, coeffs_line_ = 0;
  std::optional<std::vector<Rational>> init_;

  [[noreturn]] void fail(const std::string& msg, std::size_t column, std::size_t line = 0) const {
    throw ParseError(msg, line ? line : line_no_, column);
  }

  void once(const std::string& key, std::size_t column) {
    if (!seen_.insert(key).second) fail("duplicate '" + key + "' line", column);
  }

  void need_vars(std::size_t column) const {
    if (!p_.ctx) fail("'vars' must come before polynomials", column);
  }

  Polynomial poly(Span s) const {
    need_vars(s.column);
    if (s.text.empty()) fail("expected a polynomial", s.column);
    try {
      return parse_polynomial(s.text, p_.ctx);
    } catch (const ParseError& e) {
      const std::string what = e.what();
      const auto colon = what.find(": ");
      fail(colon == std::string::npos ? what : what.substr(colon + 2), s.column + e.column() - 1);
    }
  }

  std::vector<Polynomial> poly_list(Span s) const {
    std::vector<Polynomial> out;
    for (const auto& piece : split_commas(s)) out.push_back(poly(piece));
    return out;
  }

  std::vector<Rational> rational_list(Span s) const {
    std::vector<Rational> out;
    for (const auto& piece : split_commas(s)) {
      try {
        out.push_back(parse_rational(piece.text));
      } catch (const Error& e) {
        fail(e.what(), piece.column);
      }
    }
    return out;
  }

  double positive_number(Span s) const {
    double v = 0;
    const auto r = std::from_chars(s.text.data(), s.text.data() + s.text.size(), v);
    if (r.ec != std::errc() || r.ptr != s.text.data() + s.text.size() || !(v > 0))
      fail("expected a positive number of seconds", s.column);
    return v;
  }

  std::size_t variable_index(Span s) const {
    need_vars(s.column);
    const auto i = p_.ctx->index_of(s.text);
    if (!i) fail("undeclared variable '" + std::string(s.text) + "'", s.column);
    return *i;
  }

  void handle(std::string_view line) {
    const Span whole = trim({line, 1});
    if (whole.text.empty()) return;
    const auto colon = whole.text.find(':');
    if (colon == std::string_view::npos) fail("expected 'key: value'", whole.column);
    const Span key = trim({whole.text.substr(0, colon), whole.column});
    const Span value = trim({whole.text.substr(colon + 1), whole.column + colon + 1});

    // `update <var>` and `map <var>` carry the variable in the key.
    std::string_view word = key.text;
    Span arg{{}, key.column};
    if (const auto sp = key.text.find_first_of(" \t"); sp != std::string_view::npos) {
      word = key.text.substr(0, sp);
      arg = trim({key.text.substr(sp), key.column + sp});
    }
    if (word == "update" || word == "map") {
      if (arg.text.empty()) fail("'" + std::string(word) + "' needs a variable name", key.column);
      const std::size_t i = variable_index(arg);
      auto& lines = word == "update" ? update_lines_ : map_lines_;
      if (lines.count(i)) fail("duplicate '" + std::string(word) + " " + std::string(arg.text) + "' line", key.column);
      lines[i] = line_no_;
      const std::size_t n = p_.ctx->size();
      if (word == "update") {
        if (p_.generators.empty()) p_.generators.resize(n);
        p_.generators[i] = poly_list(value);
      } else {
        if (p_.map.empty()) p_.map.assign(n, Polynomial(p_.ctx));
        p_.map[i] = poly(value);
      }
      return;
    }
    if (!arg.text.empty()) fail("unexpected text after '" + std::string(word) + "'", arg.column);

    const std::string k(word);
    if (k == "name") {
      once(k, key.column);
      p_.name = std::string(value.text);
    } else if (k == "vars") {
      once(k, key.column);
      std::vector<std::string> names;
      for (const auto& piece : split_commas(value)) {
        const bool ok = !piece.text.empty() && (std::isalpha(static_cast<unsigned char>(piece.text[0])) || piece.text[0] == '_') &&
                        std::all_of(piece.text.begin(), piece.text.end(), [](char c) {
                          return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                        });
        if (!ok) fail("invalid variable name '" + std::string(piece.text) + "'", piece.column);
        names.emplace_back(piece.text);
      }
      try {
        p_.ctx = VarContext::of_program(names);
      } catch (const Error& e) {
        fail(e.what(), value.column);
      }
      vars_line_ = line_no_;
    } else if (k == "init") {
      once(k, key.column);
      init_ = rational_list(value);
      init_line_ = line_no_;
    } else if (k == "guard") {
      p_.guards.push_back(poly(value));
    } else if (k == "invariant") {
      p_.invariants.push_back(poly(value));
    } else if (k == "coeffs") {
      once(k, key.column);
      p_.coeffs = rational_list(value);
      coeffs_line_ = line_no_;
    } else if (k == "solver") {
      once(k, key.column);
      std::vector<std::string> argv;
      std::istringstream in{std::string(value.text)};
      for (std::string w; in >> w;) argv.push_back(w);
      if (argv.empty()) fail("empty solver command", value.column);
      p_.settings.solver = std::move(argv);
    } else if (k == "domain") {
      once(k, key.column);
      try {
        p_.settings.domain = parse_domain(value.text);
      } catch (const Error& e) {
        fail(e.what(), value.column);
      }
    } else if (k == "policy") {
      once(k, key.column);
      try {
        p_.settings.policy = parse_policy(value.text);
      } catch (const Error& e) {
        fail(e.what(), value.column);
      }
    } else if (k == "synth-budget") {
      once(k, key.column);
      p_.settings.synth_budget = positive_number(value);
    } else if (k == "solve-budget") {
      once(k, key.column);
      p_.settings.solve_budget = positive_number(value);
    } else {
      fail("unknown key '" + k + "'", key.column);
    }
  }

  void finish() {
    const std::size_t end = line_no_;
    if (!p_.ctx) fail("missing 'vars' line", 1, end);
    const std::size_t n = p_.ctx->size();
    if (!init_) fail("missing 'init' line", 1, end);
    if (init_->size() != n)
      fail("expected " + std::to_string(n) + " initial values, got " + std::to_string(init_->size()), 1, init_line_);
    p_.initial = std::move(*init_);
    if (p_.invariants.empty()) fail("at least one 'invariant' line is required", 1, end);
    if (!p_.generators.empty() && update_lines_.size() != n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!update_lines_.count(i)) fail("missing 'update " + p_.ctx->name(i) + "' line", 1, vars_line_);
      }
    }
    if (!p_.map.empty() && map_lines_.size() != n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!map_lines_.count(i)) fail("missing 'map " + p_.ctx->name(i) + "' line", 1, vars_line_);
      }
    }
    if (p_.coeffs) {
      if (p_.generators.empty()) fail("'coeffs' needs 'update' lines", 1, coeffs_line_);
      std::size_t l = 0;
      for (const auto& g : p_.generators) l += g.size();
      if (p_.coeffs->size() != l)
        fail("expected " + std::to_string(l) + " coefficients, got " + std::to_string(p_.coeffs->size()), 1,
             coeffs_line_);
    }
    if (p_.settings.policy.kind == NonzeroPolicy::Kind::Coordinate && !p_.generators.empty()) {
      std::size_t l = 0;
      for (const auto& g : p_.generators) l += g.size();
      if (p_.settings.policy.coordinate >= l) fail("policy coordinate out of range", 1, end);
    }
  }
};

}  // namespace

bool ProblemSettings::operator==(const ProblemSettings& o) const {
  return solver == o.solver && domain == o.domain && policy.kind == o.policy.kind &&
         (policy.kind != NonzeroPolicy::Kind::Coordinate || policy.coordinate == o.policy.coordinate) &&
         synth_budget == o.synth_budget && solve_budget == o.solve_budget;
}

LoopTemplate Problem::loop_template() const {
  if (generators.empty()) throw Error("problem '" + name + "' has no 'update' lines");
  return loop_template(generators);
}

LoopTemplate Problem::loop_template(std::vector<std::vector<Polynomial>> gens) const {
  LoopTemplate t{ctx, initial, guard(), std::move(gens)};
  t.validate();
  return t;
}

ConcreteLoop Problem::concrete_loop() const {
  if (!map.empty()) {
    ConcreteLoop loop{ctx, initial, guard(), map};
    loop.validate();
    return loop;
  }
  if (coeffs && has_template()) return instantiate(loop_template(), *coeffs);
  throw Error("problem '" + name + "' has neither 'map' lines nor 'update' lines with 'coeffs'");
}

int Problem::invariant_degree() const {
  int d = 0;
  for (const auto& g : invariants) d = std::max(d, g.total_degree());
  return d;
}

bool Problem::operator==(const Problem& o) const {
  if (name != o.name || !same_context(ctx, o.ctx)) return false;
  return initial == o.initial && guards == o.guards && invariants == o.invariants && generators == o.generators &&
         map == o.map && coeffs == o.coeffs && settings == o.settings;
}

Problem parse_problem(std::string_view text) { return ProblemParser(text).run(); }

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string print_problem(const Problem& p) {
  auto join = [](const auto& items, auto render) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += render(items[i]);
    }
    return out;
  };
  auto rat = [](const Rational& r) { return to_string(r); };
  auto poly = [](const Polynomial& q) { return to_string(q); };
  const auto& ctx = *p.ctx;

  std::ostringstream os;
  if (!p.name.empty()) os << "name: " << p.name << '\n';
  os << "vars: " << join(ctx.variables(), [](const VarContext::Variable& v) { return v.name; }) << '\n';
  os << "init: " << join(p.initial, rat) << '\n';
  for (const auto& g : p.guards) os << "guard: " << to_string(g) << '\n';
  for (const auto& g : p.invariants) os << "invariant: " << to_string(g) << '\n';
  for (std::size_t i = 0; i < p.generators.size(); ++i)
    os << "update " << ctx.name(i) << ": " << join(p.generators[i], poly) << '\n';
  for (std::size_t i = 0; i < p.map.size(); ++i) os << "map " << ctx.name(i) << ": " << to_string(p.map[i]) << '\n';
  if (p.coeffs) os << "coeffs: " << join(*p.coeffs, rat) << '\n';
  if (p.settings.solver) {
    std::string cmd;
    for (const auto& w : *p.settings.solver) cmd += (cmd.empty() ? "" : " ") + w;
    os << "solver: " << cmd << '\n';
  }
  os << "domain: " << to_string(p.settings.domain) << '\n';
  os << "policy: " << to_string(p.settings.policy) << '\n';
  os << "synth-budget: " << format_double(p.settings.synth_budget) << '\n';
  os << "solve-budget: " << format_double(p.settings.solve_budget) << '\n';
  return os.str();
}

NonzeroPolicy parse_policy(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  in >> word;
  if (word == "vector") return NonzeroPolicy::vector();
  if (word == "none") return NonzeroPolicy::none();
  if (word == "coordinate") {
    long k = 0;
    std::string rest;
    if (in >> k && k >= 1 && !(in >> rest)) return NonzeroPolicy::at(static_cast<std::size_t>(k - 1));
    throw Error("expected 'coordinate <k>' with k >= 1");
  }
  throw Error("unknown policy '" + std::string(text) + "' (expected vector, none or coordinate <k>)");
}

Domain parse_domain(std::string_view text) {
  if (text == "integers") return Domain::Integers;
  if (text == "rationals") return Domain::Rationals;
  throw Error("unknown domain '" + std::string(text) + "' (expected integers or rationals)");
}

}  // namespace loopsynth
