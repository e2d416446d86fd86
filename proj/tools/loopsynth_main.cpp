// Command-line front end: synth, check, bench.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "loopsynth/errors.hpp"
#include "loopsynth/pipeline.hpp"
#include "loopsynth/problem.hpp"

using namespace loopsynth;

namespace {

enum Exit { kOk = 0, kUsage = 1, kBudget = 2, kInternal = 3 };

struct Common {
  std::string solver;
  bool no_solver = false;
  std::string domain;
  std::string policy;
  double synth_budget = 0;
  double solve_budget = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--solver", c.solver, "Solver command; {script} stands for the script path");
  cmd->add_flag("--no-solver", c.no_solver, "Skip the external solver");
  cmd->add_option("--domain", c.domain, "integers or rationals")->check(CLI::IsMember({"integers", "rationals"}));
  cmd->add_option("--policy", c.policy, "vector, none, or 'coordinate <k>'");
  cmd->add_option("--synth-budget", c.synth_budget, "Synthesis time limit in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--solve-budget", c.solve_budget, "Solver time limit in seconds")->check(CLI::PositiveNumber);
}

void apply(const Common& c, ProblemSettings& s) {
  if (!c.domain.empty()) s.domain = parse_domain(c.domain);
  if (!c.policy.empty()) s.policy = parse_policy(c.policy);
  if (c.synth_budget > 0) s.synth_budget = c.synth_budget;
  if (c.solve_budget > 0) s.solve_budget = c.solve_budget;
}

PipelineOptions pipeline_options(const Common& c) {
  PipelineOptions o;
  o.run_solver = !c.no_solver;
  if (!c.solver.empty()) {
    SolverConfig cfg;
    std::istringstream in(c.solver);
    for (std::string w; in >> w;) cfg.argv.push_back(w);
    o.solver = cfg;
  }
  return o;
}

int exit_code(const RunReport& r) {
  switch (r.status) {
    case RunStatus::Ok:
      return kOk;
    case RunStatus::TimeLimit:
      return kBudget;
    case RunStatus::Error:
      return kInternal;
  }
  return kInternal;
}

int run_synth(const std::string& file, const Common& c, const std::string& emit_smt, bool json) {
  Problem p = load_problem(file);
  apply(c, p.settings);
  const RunReport r = run_pipeline(p, pipeline_options(c));
  if (!emit_smt.empty()) {
    if (r.smt_script.empty()) {
      std::cerr << "no SMT-LIB2 script to write (" << (r.system.ctx ? "empty system" : "synthesis did not finish")
                << ")\n";
    } else {
      std::ofstream out(emit_smt);
      out << r.smt_script;
      if (!out) throw Error("cannot write '" + emit_smt + "'");
    }
  }
  std::cout << (json ? report_json(r) + "\n" : report_text(r));
  return exit_code(r);
}

int run_check(const std::string& file, const Common& c, std::size_t steps, bool json) {
  Problem p = load_problem(file);
  apply(c, p.settings);
  const ConcreteLoop loop = p.concrete_loop();
  const InvariantSpec inv = p.invariant_spec();
  SynthesisOptions so;
  so.budget = GroebnerBudget::for_seconds(p.settings.synth_budget);
  const bool sim = simulate(loop, inv, steps);
  const bool exact = check_invariants(loop, inv, so);
  if (json) {
    nlohmann::ordered_json j;
    j["name"] = p.name;
    std::vector<std::string> update;
    for (const auto& f : loop.update) update.push_back(to_string(f));
    j["loop"] = update;
    j["simulate"] = sim;
    j["simulate_steps"] = steps;
    j["check_invariants"] = exact;
    j["holds"] = exact;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "problem: " << (p.name.empty() ? "(unnamed)" : p.name) << "\n";
    for (std::size_t i = 0; i < loop.update.size(); ++i)
      std::cout << "  " << p.ctx->name(i) << " := " << to_string(loop.update[i]) << "\n";
    std::cout << "simulate (" << steps << " steps): " << (sim ? "pass" : "fail") << "\n";
    std::cout << "invariants: " << (exact ? "hold" : "violated") << "\n";
  }
  // A simulation failure that the exact test accepts would be a bug.
  return sim || !exact ? kOk : kInternal;
}

int run_bench(const std::string& dir, const Common& c, const std::string& grid, unsigned jobs,
              const std::string& csv) {
  BenchOptions o;
  if (!grid.empty()) o.grid = parse_grid(grid);
  o.jobs = jobs;
  o.pipeline = pipeline_options(c);
  if (c.synth_budget > 0) o.synth_budget = c.synth_budget;
  if (c.solve_budget > 0) o.solve_budget = c.solve_budget;
  const BenchTable t = run_benchmarks(dir, o);
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << t.to_csv();
    if (!out) throw Error("cannot write '" + csv + "'");
  }
  std::cout << t.to_text();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial loop synthesis from invariants"};
  app.require_subcommand(1);

  Common synth_opts, check_opts, bench_opts;
  std::string synth_file, emit_smt;
  bool synth_json = false;
  auto* synth = app.add_subcommand("synth", "Generate the coefficient system, solve it and verify the loop");
  synth->add_option("file", synth_file, "Problem file")->required()->check(CLI::ExistingFile);
  synth->add_option("--emit-smt", emit_smt, "Write the SMT-LIB2 script to this path");
  synth->add_flag("--json", synth_json, "Print the report as JSON");
  add_common(synth, synth_opts);

  std::string check_file;
  std::size_t steps = 10;
  bool check_json = false;
  auto* check = app.add_subcommand("check", "Verify a fully instantiated loop against its invariants");
  check->add_option("file", check_file, "Problem file with map lines, or update lines plus coeffs")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--steps", steps, "Simulation horizon")->check(CLI::PositiveNumber);
  check->add_flag("--json", check_json, "Print the result as JSON");
  add_common(check, check_opts);

  std::string bench_dir, grid, csv;
  unsigned jobs = 1;
  auto* bench = app.add_subcommand("bench", "Run every .loop file in a directory over a structure grid");
  bench->add_option("dir", bench_dir, "Benchmark directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--grid", grid, "Structures as D:l pairs, e.g. 1:3,1:4,2:2");
  bench->add_option("--jobs", jobs, "Parallel workers")->check(CLI::Range(1u, 256u));
  bench->add_option("--csv", csv, "Also write the rows as CSV to this path");
  add_common(bench, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return run_synth(synth_file, synth_opts, emit_smt, synth_json);
    if (*check) return run_check(check_file, check_opts, steps, check_json);
    if (*bench) return run_bench(bench_dir, bench_opts, grid, jobs, csv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
