#include "loopsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "loopsynth/errors.hpp"

namespace loopsynth {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, s < 10 ? "%.3f" : "%.1f", s);
  return buf;
}

unsigned max_degree(const std::vector<std::vector<Polynomial>>& gens) {
  int D = 0;
  for (const auto& gi : gens) {
    for (const auto& f : gi) D = std::max(D, f.total_degree());
  }
  return static_cast<unsigned>(D);
}

void verify(RunReport& r, const LoopTemplate& t, const InvariantSpec& inv, const SynthesisOptions& so,
            const PipelineOptions& options) {
  const ConcreteLoop loop = instantiate(t, r.outcome->values);
  for (const auto& f : loop.update) r.loop.push_back(to_string(f));
  const bool sim = simulate(loop, inv, options.simulate_steps);
  bool exact = false;
  try {
    exact = check_invariants(loop, inv, so);
  } catch (const BudgetExceeded& e) {
    r.message = std::string("verification: ") + e.what();
    return;
  }
  r.verified = sim && exact;
  if (!r.verified) {
    r.status = RunStatus::Error;
    r.message = "found loop failed verification";
  }
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok:
      return "ok";
    case RunStatus::TimeLimit:
      return "TL";
    case RunStatus::Error:
      return "error";
  }
  return "?";
}

RunReport run_pipeline(const Problem& problem, const PipelineOptions& options) {
  if (!problem.has_template()) {
    RunReport r;
    r.name = problem.name;
    r.status = RunStatus::Error;
    r.message = "problem has no 'update' lines";
    return r;
  }
  return run_pipeline(problem, problem.generators, options);
}

RunReport run_pipeline(const Problem& problem, std::vector<std::vector<Polynomial>> generators,
                       const PipelineOptions& options) {
  RunReport r;
  r.name = problem.name;
  r.n = problem.ctx ? problem.ctx->size() : 0;
  r.m = problem.invariants.size();
  r.d = problem.invariant_degree();
  r.D = max_degree(generators);
  try {
    const LoopTemplate t = problem.loop_template(std::move(generators));
    r.l = t.coefficient_count();
    const InvariantSpec inv = problem.invariant_spec();
    SynthesisOptions so;
    so.budget = GroebnerBudget::for_seconds(problem.settings.synth_budget);

    const auto t0 = Clock::now();
    try {
      r.system = generate_loops(t, inv, so);
    } catch (const BudgetExceeded& e) {
      r.synth_seconds = since(t0);
      r.status = RunStatus::TimeLimit;
      r.message = e.what();
      return r;
    }
    r.synth_seconds = since(t0);
    r.s = r.system.polys.size();
    r.rounds = r.system.rounds;

    const auto t1 = Clock::now();
    r.finiteness = classify_finiteness(r.system, so.budget);
    r.finiteness_seconds = since(t1);

    SolveRequest req;
    req.system = r.system;
    req.domain = problem.settings.domain;
    req.policy = problem.settings.policy;
    req.budget_seconds = problem.settings.solve_budget;
    req.validate();
    if (r.s == 0) {
      SolveOutcome o;
      o.status = SolveStatus::Sat;
      o.values.assign(r.l, Rational(1));
      o.diagnostics = "empty system: every coefficient vector is a solution";
      r.outcome = std::move(o);
    } else {
      r.smt_script = emit_smtlib(req);
      SolveOutcome o;
      if (!options.run_solver) {
        o.status = SolveStatus::SolverUnavailable;
        o.diagnostics = "solver disabled";
      } else {
        const SolverConfig config = options.solver                ? *options.solver
                                    : problem.settings.solver ? SolverConfig{*problem.settings.solver}
                                                              : SolverConfig::from_environment();
        try {
          o = run_external_solver(req, r.smt_script, config);
        } catch (const SolverProtocolError& e) {
          o.status = SolveStatus::Unknown;
          o.diagnostics = e.what();
          r.message = std::string("solver protocol error: ") + e.what();
        }
      }
      r.solve_seconds = o.seconds;
      r.outcome = std::move(o);
    }
    if (r.outcome->status == SolveStatus::Sat) {
      so.budget = GroebnerBudget::for_seconds(problem.settings.synth_budget);
      verify(r, t, inv, so, options);
    }
  } catch (const BudgetExceeded& e) {
    r.status = RunStatus::TimeLimit;
    r.message = e.what();
  } catch (const Error& e) {
    r.status = RunStatus::Error;
    r.message = e.what();
  }
  return r;
}

std::string outcome_label(const RunReport& r) { return r.outcome ? to_string(r.outcome->status) : "NI"; }

std::string report_json(const RunReport& r, bool timings) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["name"] = r.name;
  j["status"] = to_string(r.status);
  if (!r.message.empty()) j["message"] = r.message;
  j["n"] = r.n;
  j["m"] = r.m;
  j["d"] = r.d;
  j["D"] = r.D;
  j["l"] = r.l;
  ordered_json names = ordered_json::array();
  if (r.system.ctx) {
    for (const auto& v : r.system.ctx->variables()) names.push_back(v.name);
  }
  j["coefficients"] = names;
  ordered_json sys = ordered_json::array();
  for (const auto& p : r.system.polys) sys.push_back(to_string(primitive_part(p)));
  j["system"] = sys;
  j["s"] = r.s;
  j["q"] = r.system.q_count();
  j["rounds"] = r.rounds;
  j["finiteness"] = to_string(r.finiteness);
  j["outcome"] = outcome_label(r);
  if (r.outcome && r.outcome->status == SolveStatus::Sat && r.system.ctx) {
    ordered_json a;
    for (std::size_t i = 0; i < r.outcome->values.size(); ++i)
      a[r.system.ctx->name(i)] = to_string(r.outcome->values[i]);
    j["assignment"] = a;
  }
  j["verified"] = r.verified;
  if (!r.loop.empty()) j["loop"] = r.loop;
  if (timings) {
    j["timings"] = {{"synthesis", r.synth_seconds},
                    {"finiteness", r.finiteness_seconds},
                    {"solve", r.solve_seconds}};
  }
  return j.dump(2);
}

std::string report_text(const RunReport& r) {
  std::ostringstream os;
  os << "problem: " << (r.name.empty() ? "(unnamed)" : r.name) << '\n';
  os << "status: " << to_string(r.status);
  if (!r.message.empty()) os << " (" << r.message << ")";
  os << '\n';
  if (r.system.ctx) {
    os << "coefficients:";
    for (const auto& v : r.system.ctx->variables()) os << ' ' << v.name;
    os << '\n';
    os << "system: s = " << r.s << ", rounds = " << r.rounds << ", q = " << r.system.q_count() << '\n';
    for (std::size_t i = 0; i < r.system.polys.size(); ++i)
      os << "  P" << i + 1 << " = " << to_string(primitive_part(r.system.polys[i])) << '\n';
    os << "finiteness: " << to_string(r.finiteness) << '\n';
    os << "synthesis: " << seconds_text(r.synth_seconds) << " s\n";
  }
  os << "solver: " << outcome_label(r);
  if (r.outcome && r.outcome->status != SolveStatus::SolverUnavailable && r.s > 0)
    os << " (" << seconds_text(r.solve_seconds) << " s)";
  os << '\n';
  if (r.outcome && r.outcome->status == SolveStatus::Sat && r.system.ctx) {
    for (std::size_t i = 0; i < r.outcome->values.size(); ++i)
      os << "  " << r.system.ctx->name(i) << " = " << to_string(r.outcome->values[i]) << '\n';
  }
  if (!r.loop.empty()) {
    os << "loop:\n";
    for (std::size_t i = 0; i < r.loop.size(); ++i) os << "  F" << i + 1 << " = " << r.loop[i] << '\n';
    os << "verified: " << (r.verified ? "yes" : "no") << '\n';
  }
  return os.str();
}

std::string Structure::label() const { return "D=" + std::to_string(D) + ",l=" + std::to_string(l); }

std::vector<Structure> default_grid() { return {{1, 3}, {1, 4}, {1, 5}, {2, 2}, {2, 3}}; }

std::vector<Structure> parse_grid(std::string_view text) {
  std::vector<Structure> out;
  std::string s(text);
  std::istringstream in(s);
  for (std::string cell; std::getline(in, cell, ',');) {
    unsigned D = 0;
    std::size_t l = 0;
    char colon = 0;
    std::istringstream c(cell);
    std::string rest;
    if (!(c >> D >> colon >> l) || colon != ':' || (c >> rest) || D == 0 || l == 0)
      throw Error("bad grid cell '" + cell + "' (expected D:l with D, l >= 1)");
    out.push_back({D, l});
  }
  if (out.empty()) throw Error("empty grid");
  return out;
}

std::vector<std::vector<Polynomial>> grid_generators(const ContextPtr& ctx, const Structure& s) {
  const std::size_t n = ctx->size();
  if (s.l < n)
    throw Error("structure " + s.label() + " needs at least one generator per variable (n = " + std::to_string(n) +
                ")");
  // Monomials of each degree, largest first under degrevlex.
  std::vector<std::vector<Monomial>> by_degree(s.D + 1);
  for (unsigned k = 0; k <= s.D; ++k) {
    std::vector<unsigned> e(n, 0);
    auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
      if (i + 1 == n || n == 0) {
        if (n) e[i] = left;
        by_degree[k].emplace_back(n, e);
        return;
      }
      for (unsigned a = left + 1; a-- > 0;) {
        e[i] = a;
        self(self, i + 1, left - a);
      }
    };
    rec(rec, 0, k);
    const auto order = MonomialOrder::degrevlex();
    std::sort(by_degree[k].begin(), by_degree[k].end(),
              [&](const Monomial& a, const Monomial& b) { return order.compare(a, b) > 0; });
  }
  std::vector<std::vector<Polynomial>> gens(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t li = s.l / n + (i < s.l % n ? 1 : 0);
    std::vector<Monomial> pool;
    for (unsigned k = s.D + 1; k-- > 0;) {
      const Monomial own = Monomial::variable(n, i, k);
      if (k > 0) pool.push_back(own);
      for (const auto& m : by_degree[k]) {
        if (k == 0 || !(m == own)) pool.push_back(m);
      }
    }
    if (li > pool.size())
      throw Error("structure " + s.label() + " asks for more generators than there are monomials");
    for (std::size_t j = 0; j < li; ++j) gens[i].push_back(Polynomial(ctx, {Term{pool[j], Rational(1)}}));
  }
  return gens;
}

namespace {

struct Task {
  std::string file;
  std::optional<Problem> problem;
  std::string parse_error;
  std::optional<Structure> structure;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_table(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string rule = "+";
  for (auto w : width) rule += std::string(w + 2, '-') + "+";
  std::string out = rule + "\n";
  for (std::size_t r = 0; r < cells.size(); ++r) {
    out += "|";
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& v = c < cells[r].size() ? cells[r][c] : "";
      out += " " + v + std::string(width[c] - v.size(), ' ') + " |";
    }
    out += "\n";
    if (r == 0) out += rule + "\n";
  }
  return out + rule;
}

bool synthesized(const BenchRow& row) { return row.report.system.ctx != nullptr; }

std::string failure_cell(const BenchRow& row) {
  if (!row.applicable) return "n/a";
  return row.report.status == RunStatus::TimeLimit ? "TL" : "ERR";
}

std::string alg_cell(const BenchRow& row) {
  return synthesized(row) ? seconds_text(row.report.synth_seconds) : failure_cell(row);
}

std::string solver_cell(const BenchRow& row) {
  if (!row.applicable) return "n/a";
  const auto& r = row.report;
  if (!r.outcome) return "NI";
  switch (r.outcome->status) {
    case SolveStatus::Sat:
      return r.s == 0 ? "-" : seconds_text(r.solve_seconds);
    case SolveStatus::Unsat:
      return "unsat";
    case SolveStatus::Unknown:
      return "F";
    case SolveStatus::SolverUnavailable:
      return "-";
  }
  return "?";
}

std::string finite_cell(const BenchRow& row) {
  if (!synthesized(row)) return failure_cell(row);
  switch (row.report.finiteness) {
    case Finiteness::Finite:
      return "<inf";
    case Finiteness::Infinite:
      return "inf";
    case Finiteness::Unknown:
      return "?";
  }
  return "?";
}

std::string s_cell(const BenchRow& row) {
  return synthesized(row) ? std::to_string(row.report.s) : failure_cell(row);
}

}  // namespace

std::string BenchTable::to_csv() const {
  std::string out =
      "file,benchmark,structure,n,m,d,D,l,status,synth_seconds,finiteness_seconds,solve_seconds,s,rounds,finiteness,"
      "outcome,verified,message\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    std::vector<std::string> f = {row.file,
                                  row.benchmark,
                                  row.structure ? row.structure->label() : "given",
                                  std::to_string(r.n),
                                  std::to_string(r.m),
                                  std::to_string(r.d),
                                  std::to_string(row.structure ? row.structure->D : r.D),
                                  std::to_string(row.structure ? row.structure->l : r.l),
                                  row.applicable ? to_string(r.status) : "n/a",
                                  seconds_text(r.synth_seconds),
                                  seconds_text(r.finiteness_seconds),
                                  seconds_text(r.solve_seconds),
                                  std::to_string(r.s),
                                  std::to_string(r.rounds),
                                  to_string(r.finiteness),
                                  outcome_label(r),
                                  r.verified ? "true" : "false",
                                  r.message};
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_field(f[i]);
    out += "\n";
  }
  return out;
}

std::string BenchTable::to_text() const {
  // Column set: the grid, plus "given" when some problem brought its own template.
  std::vector<std::string> columns;
  for (const auto& g : grid) columns.push_back(g.label());
  if (std::any_of(rows.begin(), rows.end(), [](const BenchRow& r) { return !r.structure; }))
    columns.push_back("given");
  std::vector<std::string> names;
  for (const auto& row : rows) {
    if (std::find(names.begin(), names.end(), row.benchmark) == names.end()) names.push_back(row.benchmark);
  }
  auto find = [&](const std::string& name, const std::string& col) -> const BenchRow* {
    for (const auto& row : rows) {
      const std::string label = row.structure ? row.structure->label() : "given";
      if (row.benchmark == name && label == col) return &row;
    }
    return nullptr;
  };
  auto build = [&](auto cell) {
    std::vector<std::vector<std::string>> t;
    std::vector<std::string> head = {"benchmark", "n", "m", "d"};
    for (const auto& c : columns) head.push_back(c);
    t.push_back(head);
    for (const auto& name : names) {
      std::vector<std::string> line = {name, "", "", ""};
      for (const auto& c : columns) {
        const BenchRow* row = find(name, c);
        if (row && line[1].empty() && row->report.n) {
          line[1] = std::to_string(row->report.n);
          line[2] = std::to_string(row->report.m);
          line[3] = std::to_string(row->report.d);
        }
        line.push_back(row ? cell(*row) : "");
      }
      t.push_back(line);
    }
    return render_table(t);
  };
  std::string out = "Timings in seconds (synthesis / solver); TL = time limit, F = solver failed, NI = no solver input\n";
  out += build([](const BenchRow& r) { return alg_cell(r) + " / " + solver_cell(r); });
  out += "\n\nOutput systems (s / number of solutions)\n";
  out += build([](const BenchRow& r) { return s_cell(r) + " / " + finite_cell(r); });
  return out + "\n";
}

BenchTable run_benchmarks(const std::filesystem::path& dir, const BenchOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".loop") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Task> tasks;
  for (const auto& f : files) {
    Task base;
    base.file = f.filename().string();
    try {
      base.problem = load_problem(f.string());
      if (base.problem->name.empty()) base.problem->name = f.stem().string();
      if (options.synth_budget) base.problem->settings.synth_budget = *options.synth_budget;
      if (options.solve_budget) base.problem->settings.solve_budget = *options.solve_budget;
    } catch (const Error& e) {
      base.parse_error = e.what();
    }
    if (!base.problem || base.problem->has_template()) {
      tasks.push_back(std::move(base));
      continue;
    }
    for (const auto& s : options.grid) {
      Task t = base;
      t.structure = s;
      tasks.push_back(std::move(t));
    }
  }

  BenchTable table;
  table.grid = options.grid;
  table.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      const Task& t = tasks[i];
      BenchRow& row = table.rows[i];
      row.file = t.file;
      row.structure = t.structure;
      if (!t.problem) {
        row.benchmark = fs::path(t.file).stem().string();
        row.report.name = row.benchmark;
        row.report.status = RunStatus::Error;
        row.report.message = t.parse_error;
        continue;
      }
      row.benchmark = t.problem->name;
      if (!t.structure) {
        row.report = run_pipeline(*t.problem, options.pipeline);
        continue;
      }
      std::vector<std::vector<Polynomial>> gens;
      try {
        gens = grid_generators(t.problem->ctx, *t.structure);
      } catch (const Error& e) {
        row.applicable = false;
        row.report.name = row.benchmark;
        row.report.n = t.problem->ctx->size();
        row.report.m = t.problem->invariants.size();
        row.report.d = t.problem->invariant_degree();
        row.report.status = RunStatus::Error;
        row.report.message = e.what();
        continue;
      }
      row.report = run_pipeline(*t.problem, std::move(gens), options.pipeline);
    }
  };
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return table;
}

}  // namespace loopsynth
