#include "loopsynth/solve.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "loopsynth/errors.hpp"
#include "loopsynth/sexpr.hpp"

namespace loopsynth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool simple_symbol(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string symbol(const std::string& name) { return simple_symbol(name) ? name : "|" + name + "|"; }

std::string literal(const Integer& n) {
  if (sgn(n) < 0) return "(- " + Integer(-n).get_str() + ")";
  return n.get_str();
}

std::string smt_term(const Term& t, const VarContext& ctx) {
  std::vector<std::string> factors;
  const Integer c = t.coeff.get_num();
  if (c != 1 || t.monomial.is_one()) factors.push_back(literal(c));
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    for (unsigned e = 0; e < t.monomial[i]; ++e) factors.push_back(symbol(ctx.name(i)));
  }
  if (factors.size() == 1) return factors.front();
  std::string out = "(*";
  for (const auto& f : factors) out += " " + f;
  return out + ")";
}

std::string smt_poly(const Polynomial& p) {
  if (p.is_zero()) return "0";
  const Polynomial q = primitive_part(p);
  const auto& ctx = *q.context();
  if (q.size() == 1) return smt_term(q.terms().front(), ctx);
  std::string out = "(+";
  for (const auto& t : q.terms()) out += " " + smt_term(t, ctx);
  return out + ")";
}

Rational decimal_value(const std::string& s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos) return parse_rational(s);
  const std::string whole = s.substr(0, dot);
  const std::string frac = s.substr(dot + 1);
  if (whole.empty() || frac.empty() ||
      !std::all_of(frac.begin(), frac.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw Error("bad decimal");
  Integer den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  Rational r(Integer(whole + frac, 10), den);
  r.canonicalize();
  return r;
}

Rational model_value(const SExpr& e) {
  if (e.is_atom()) {
    try {
      return decimal_value(e.atom);
    } catch (const Error&) {
      throw SolverProtocolError("unexpected model value '" + e.atom + "'");
    }
  }
  if (e.items.empty() || !e.items[0].is_atom()) throw SolverProtocolError("unexpected model value " + e.to_string());
  const std::string& op = e.items[0].atom;
  if (op == "-" && e.items.size() == 2) return -model_value(e.items[1]);
  if (op == "-" && e.items.size() == 3) return model_value(e.items[1]) - model_value(e.items[2]);
  if (op == "/" && e.items.size() == 3) {
    const Rational d = model_value(e.items[2]);
    if (d == 0) throw SolverProtocolError("division by zero in model value");
    return model_value(e.items[1]) / d;
  }
  throw SolverProtocolError("unsupported model value " + e.to_string());
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::optional<std::string> find_executable(const std::string& name) {
  auto ok = [](const std::filesystem::path& p) {
    struct stat st {};
    return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
  };
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) return ok(name) ? std::optional<std::string>(name) : std::nullopt;
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string dirs = path;
  std::size_t start = 0;
  for (;;) {
    const auto end = dirs.find(':', start);
    std::string dir = dirs.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (dir.empty()) dir = ".";
    const auto candidate = std::filesystem::path(dir) / name;
    if (ok(candidate)) return candidate.string();
    if (end == std::string::npos) return std::nullopt;
    start = end + 1;
  }
}

struct ProcessResult {
  bool timed_out = false;
  bool exec_failed = false;
  std::string out;
  std::string err;
};

ProcessResult run_process(const std::string& binary, const std::vector<std::string>& args, double budget) {
  int out_pipe[2], err_pipe[2];
  if (::pipe(out_pipe) != 0) throw Error("pipe failed");
  if (::pipe(err_pipe) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    throw Error("pipe failed");
  }
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, 0);
    ::dup2(out_pipe[1], 1);
    ::dup2(err_pipe[1], 2);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    ::execv(binary.c_str(), argv.data());
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  ProcessResult r;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget));
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&r.out, &r.err};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      r.timed_out = true;
      break;
    }
    const int n = ::poll(fds, 2, static_cast<int>(std::min<long long>(left, 1000)));
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t got = ::read(fds[i].fd, buf, sizeof buf);
      if (got > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(got));
      } else {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) ::close(f.fd);
  }
  if (r.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!r.timed_out && WIFEXITED(status) && WEXITSTATUS(status) == 127 && r.out.empty()) r.exec_failed = true;
  return r;
}

class TempScript {
 public:
  explicit TempScript(const std::string& text) {
    std::string pattern = (std::filesystem::temp_directory_path() / "loopsynth-XXXXXX.smt2").string();
    const int fd = ::mkstemps(pattern.data(), 5);
    if (fd < 0) throw Error("cannot create temporary script file");
    path_ = pattern;
    std::size_t done = 0;
    while (done < text.size()) {
      const ssize_t n = ::write(fd, text.data() + done, text.size() - done);
      if (n <= 0) {
        ::close(fd);
        throw Error("cannot write temporary script file");
      }
      done += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempScript() { ::unlink(path_.c_str()); }
  TempScript(const TempScript&) = delete;
  TempScript& operator=(const TempScript&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

SynthesisSystem make_system(ContextPtr ctx, std::vector<Polynomial> polys) {
  for (const auto& p : polys) {
    if (!same_context(p.context(), ctx)) throw ContextMismatch();
  }
  SynthesisSystem sys;
  sys.ctx = std::move(ctx);
  for (std::size_t i = 0; i < polys.size(); ++i) sys.source_index.push_back(i);
  sys.pre_substitution = polys;
  sys.polys = std::move(polys);
  return sys;
}

bool NonzeroPolicy::holds(std::span<const Rational> values) const {
  switch (kind) {
    case Kind::None:
      return true;
    case Kind::Coordinate:
      return coordinate < values.size() && values[coordinate] != 0;
    case Kind::Vector:
      break;
  }
  return std::any_of(values.begin(), values.end(), [](const Rational& v) { return v != 0; });
}

void SolveRequest::validate() const {
  if (!system.ctx) throw Error("solve request has no variables");
  if (!(budget_seconds > 0)) throw Error("solver budget must be positive");
  if (policy.kind == NonzeroPolicy::Kind::Coordinate && policy.coordinate >= system.ctx->size())
    throw Error("nonzero coordinate " + std::to_string(policy.coordinate + 1) + " is out of range");
}

Bindings SolveOutcome::assignment(const VarContext& ctx) const {
  Bindings b;
  for (std::size_t i = 0; i < values.size() && i < ctx.size(); ++i) b[ctx.name(i)] = values[i];
  return b;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat:
      return "sat";
    case SolveStatus::Unsat:
      return "unsat";
    case SolveStatus::Unknown:
      return "unknown";
    case SolveStatus::SolverUnavailable:
      return "solver-unavailable";
  }
  return "?";
}

const char* to_string(Domain d) { return d == Domain::Integers ? "integers" : "rationals"; }

std::string to_string(const NonzeroPolicy& p) {
  switch (p.kind) {
    case NonzeroPolicy::Kind::Vector:
      return "vector";
    case NonzeroPolicy::Kind::None:
      return "none";
    case NonzeroPolicy::Kind::Coordinate:
      return "coordinate " + std::to_string(p.coordinate + 1);
  }
  return "?";
}

std::string emit_smtlib(const SolveRequest& req) {
  req.validate();
  if (req.system.polys.empty()) throw Error("cannot emit an SMT-LIB2 script for an empty system");
  const auto& ctx = *req.system.ctx;
  const char* sort = req.domain == Domain::Integers ? "Int" : "Real";
  std::string out;
  out += "(set-option :produce-models true)\n";
  out += req.domain == Domain::Integers ? "(set-logic QF_NIA)\n" : "(set-logic QF_NRA)\n";
  for (std::size_t i = 0; i < ctx.size(); ++i) out += "(declare-const " + symbol(ctx.name(i)) + " " + sort + ")\n";
  for (const auto& p : req.system.polys) out += "(assert (= " + smt_poly(p) + " 0))\n";
  switch (req.policy.kind) {
    case NonzeroPolicy::Kind::None:
      break;
    case NonzeroPolicy::Kind::Coordinate:
      out += "(assert (distinct " + symbol(ctx.name(req.policy.coordinate)) + " 0))\n";
      break;
    case NonzeroPolicy::Kind::Vector:
      if (ctx.size() == 0) {
        out += "(assert false)\n";
      } else if (ctx.size() == 1) {
        out += "(assert (distinct " + symbol(ctx.name(0)) + " 0))\n";
      } else {
        out += "(assert (or";
        for (std::size_t i = 0; i < ctx.size(); ++i) out += " (distinct " + symbol(ctx.name(i)) + " 0)";
        out += "))\n";
      }
      break;
  }
  out += "(check-sat)\n(get-model)\n";
  return out;
}

SolverConfig SolverConfig::from_environment() {
  if (const char* env = std::getenv("LOOPSYNTH_SOLVER"); env && *env) return {split_words(env)};
  if (find_executable("z3")) return {{"z3", "-smt2", "{script}"}};
  return {};
}

std::optional<std::string> SolverConfig::resolved_binary() const {
  if (argv.empty()) return std::nullopt;
  return find_executable(argv.front());
}

SolveOutcome parse_solver_output(const std::string& out, const VarContext& vars) {
  std::vector<SExpr> exprs;
  try {
    exprs = parse_sexprs(out);
  } catch (const ParseError& e) {
    throw SolverProtocolError(std::string("unreadable solver output: ") + e.what());
  }
  if (exprs.empty()) throw SolverProtocolError("solver produced no output");
  SolveOutcome r;
  const SExpr& head = exprs.front();
  if (head.is_atom("unsat")) {
    r.status = SolveStatus::Unsat;
    return r;
  }
  if (head.is_atom("unknown") || head.is_atom("timeout")) {
    r.status = SolveStatus::Unknown;
    return r;
  }
  if (!head.is_atom("sat")) throw SolverProtocolError("unexpected solver answer " + head.to_string());
  if (exprs.size() < 2 || !exprs[1].is_list) throw SolverProtocolError("sat answer without a model");

  std::vector<std::optional<Rational>> values(vars.size());
  const auto& model = exprs[1].items;
  const std::size_t first = !model.empty() && model.front().is_atom("model") ? 1 : 0;
  for (std::size_t k = first; k < model.size(); ++k) {
    const SExpr& d = model[k];
    if (!d.is_list || d.items.size() != 5 || !d.items[0].is_atom("define-fun") || !d.items[1].is_atom())
      throw SolverProtocolError("malformed model entry " + d.to_string());
    if (!d.items[2].is_list || !d.items[2].items.empty()) continue;  // function symbols
    const auto idx = vars.index_of(d.items[1].atom);
    if (!idx) continue;
    values[*idx] = model_value(d.items[4]);
  }
  r.status = SolveStatus::Sat;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!values[i]) throw SolverProtocolError("model has no value for '" + vars.name(i) + "'");
    r.values.push_back(*values[i]);
  }
  return r;
}

SolveOutcome run_external_solver(const SolveRequest& req, const std::string& script, const SolverConfig& config) {
  req.validate();
  const auto start = Clock::now();
  SolveOutcome r;
  const auto binary = config.resolved_binary();
  if (!binary) {
    r.status = SolveStatus::SolverUnavailable;
    r.diagnostics = config.argv.empty() ? "no solver configured"
                                        : "solver '" + config.argv.front() + "' not found or not executable";
    return r;
  }
  TempScript file(script);
  std::vector<std::string> args = config.argv;
  bool placed = false;
  for (auto& a : args) {
    if (a == "{script}") {
      a = file.path();
      placed = true;
    }
  }
  if (!placed) args.push_back(file.path());

  const ProcessResult p = run_process(*binary, args, req.budget_seconds);
  if (p.exec_failed) {
    r.status = SolveStatus::SolverUnavailable;
    r.diagnostics = "could not execute '" + *binary + "'";
    return r;
  }
  if (p.timed_out) {
    r.status = SolveStatus::Unknown;
    r.diagnostics = "solver timed out after " + std::to_string(req.budget_seconds) + " s\n" + p.out + p.err;
    r.seconds = seconds_since(start);
    return r;
  }
  const auto& vars = *req.system.ctx;
  r = parse_solver_output(p.out, vars);
  r.diagnostics = p.out + p.err;
  r.seconds = seconds_since(start);
  if (r.status != SolveStatus::Sat) return r;

  if (req.domain == Domain::Integers) {
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (!is_integer(r.values[i]))
        throw SolverProtocolError("model value for '" + vars.name(i) + "' is not an integer");
    }
  }
  for (const auto& P : req.system.polys) {
    if (evaluate(P, r.values) != 0)
      throw SolverProtocolError("model does not satisfy " + to_string(P));
  }
  if (!req.policy.holds(r.values)) throw SolverProtocolError("model violates the nonzero policy");
  return r;
}

SolveOutcome solve(const SolveRequest& req, const SolverConfig& config) {
  return run_external_solver(req, emit_smtlib(req), config);
}

std::vector<Rational> LinearSolution::at(std::span<const Rational> params) const {
  if (params.size() != kernel.size()) throw ArityMismatch("expected one parameter per kernel vector");
  std::vector<Rational> v = particular;
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += params[k] * kernel[k][i];
  }
  return v;
}

LinearSolution solve_linear(const SynthesisSystem& system) {
  LinearSolution sol;
  const std::size_t n = system.ctx->size();
  for (const auto& p : system.polys) {
    if (p.total_degree() > 1) return sol;
  }
  // Augmented rows [a_1 .. a_n | rhs] for a.y = rhs.
  std::vector<std::vector<Rational>> rows;
  for (const auto& p : system.polys) {
    std::vector<Rational> row(n + 1);
    for (const auto& t : p.terms()) {
      if (t.monomial.is_one()) {
        row[n] = -t.coeff;
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (t.monomial[i]) row[i] = t.coeff;
      }
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t k = r;
    while (k < rows.size() && rows[k][c] == 0) ++k;
    if (k == rows.size()) continue;
    std::swap(rows[r], rows[k]);
    const Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j == r || rows[j][c] == 0) continue;
      const Rational f = rows[j][c];
      for (std::size_t m = c; m <= n; ++m) rows[j][m] -= f * rows[r][m];
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t j = r; j < rows.size(); ++j) {
    if (rows[j][n] != 0) {
      sol.kind = LinearSolution::Kind::Inconsistent;
      return sol;
    }
  }
  sol.kind = LinearSolution::Kind::Solved;
  sol.particular.assign(n, Rational(0));
  for (std::size_t k = 0; k < pivots.size(); ++k) sol.particular[pivots[k]] = rows[k][n];
  for (std::size_t c = 0; c < n; ++c) {
    if (std::find(pivots.begin(), pivots.end(), c) != pivots.end()) continue;
    std::vector<Rational> v(n);
    v[c] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -rows[k][c];
    sol.free_variables.push_back(c);
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

std::vector<Integer> divisors(const Integer& n) {
  if (n == 0) throw Error("divisors of zero");
  const Integer m = abs(n);
  std::vector<Integer> small, large;
  for (Integer d = 1; d * d <= m; ++d) {
    if (m % d != 0) continue;
    small.push_back(d);
    if (d * d != m) large.push_back(m / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

std::vector<Rational> rational_roots(const Polynomial& p) {
  if (p.is_zero()) throw Error("rational_roots: zero polynomial");
  const auto vars = p.support();
  if (vars.size() > 1) throw Error("rational_roots: polynomial is not univariate");
  if (vars.empty()) return {};
  const std::size_t x = vars.front();

  // Dense integer coefficients, lowest degree first.
  const Polynomial q = primitive_part(p);
  std::vector<Integer> c(q.degree_in(x) + 1);
  for (const auto& t : q.terms()) c[t.monomial[x]] = t.coeff.get_num();
  std::size_t low = 0;
  while (c[low] == 0) ++low;

  std::vector<Rational> roots;
  if (low > 0) roots.push_back(0);
  if (low + 1 < c.size()) {
    auto value = [&](const Rational& r) {
      Rational acc = 0;
      for (std::size_t k = c.size(); k-- > low;) acc = acc * r + c[k];
      return acc;
    };
    const auto num = divisors(c[low]);
    const auto den = divisors(c.back());
    for (const auto& a : num) {
      for (const auto& b : den) {
        for (int sign : {1, -1}) {
          Rational r(Integer(sign * a), b);
          r.canonicalize();
          if (value(r) == 0) roots.push_back(r);
        }
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

std::vector<std::vector<Integer>> brute_force_box(const SynthesisSystem& system, unsigned bound,
                                                  const BoxOptions& options) {
  const std::size_t l = system.ctx->size();
  const Integer side = 2 * Integer(bound) + 1;
  Integer work = l == 0 ? Integer(1) : Integer(l);
  for (std::size_t i = 0; i < l; ++i) work *= side;
  if (work > Integer(static_cast<unsigned long>(options.cap)))
    throw EnumerationCapExceeded("box search over " + work.get_str() + " evaluations exceeds the cap of " +
                                 std::to_string(options.cap));

  std::vector<std::vector<Integer>> out;
  std::vector<Rational> pt(l, Rational(-static_cast<long>(bound)));
  for (;;) {
    const bool hit = std::all_of(system.polys.begin(), system.polys.end(),
                                 [&](const Polynomial& P) { return evaluate(P, pt) == 0; });
    if (hit) {
      std::vector<Integer> v;
      for (const auto& r : pt) v.push_back(r.get_num());
      out.push_back(std::move(v));
    }
    std::size_t i = l;
    while (i > 0) {
      --i;
      if (pt[i] < bound) {
        pt[i] += 1;
        break;
      }
      pt[i] = -static_cast<long>(bound);
      if (i == 0) return out;
    }
    if (l == 0) return out;
  }
}

const char* to_string(Finiteness f) {
  switch (f) {
    case Finiteness::Finite:
      return "finite";
    case Finiteness::Infinite:
      return "infinite";
    case Finiteness::Unknown:
      return "unknown";
  }
  return "?";
}

Finiteness classify_finiteness(const SynthesisSystem& system, const GroebnerBudget& budget) {
  const std::size_t l = system.ctx->size();
  if (system.polys.empty()) return l == 0 ? Finiteness::Finite : Finiteness::Infinite;
  try {
    const GroebnerBasis B = buchberger(system.polys, MonomialOrder::degrevlex(), budget);
    if (B.is_unit()) return Finiteness::Finite;
    std::vector<std::size_t> all(l);
    for (std::size_t i = 0; i < l; ++i) all[i] = i;
    return is_zero_dimensional(B, all) ? Finiteness::Finite : Finiteness::Infinite;
  } catch (const BudgetExceeded&) {
    return Finiteness::Unknown;
  }
}

}  // namespace loopsynth
