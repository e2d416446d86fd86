#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loopsynth/problem.hpp"
#include "loopsynth/solve.hpp"

namespace loopsynth {

struct PipelineOptions {
  /// Overrides the problem's solver line and the environment.
  std::optional<SolverConfig> solver;
  bool run_solver = true;
  /// Horizon for the simulation half of verification.
  std::size_t simulate_steps = 10;
};

enum class RunStatus { Ok, TimeLimit, Error };
const char* to_string(RunStatus s);

struct RunReport {
  std::string name;
  RunStatus status = RunStatus::Ok;
  std::string message;

  std::size_t n = 0;  ///< program variables
  std::size_t m = 0;  ///< invariants
  int d = 0;          ///< max invariant degree
  unsigned D = 0;     ///< max generator degree
  std::size_t l = 0;  ///< coefficient count

  SynthesisSystem system;
  std::size_t s = 0;
  std::size_t rounds = 0;
  Finiteness finiteness = Finiteness::Unknown;
  double synth_seconds = 0;
  double finiteness_seconds = 0;

  std::string smt_script;
  /// Unset when the solver received no input.
  std::optional<SolveOutcome> outcome;
  double solve_seconds = 0;

  bool verified = false;
  /// Update map of the found loop, rendered as text.
  std::vector<std::string> loop;
};

/// generate_loops, classify_finiteness, solve, verify. Budget exhaustion is
/// recorded as TimeLimit; other library errors as Error. Never throws for
/// problems that parsed.
RunReport run_pipeline(const Problem& problem, const PipelineOptions& options = {});
/// Same, with explicit generator lists instead of the problem's own.
RunReport run_pipeline(const Problem& problem, std::vector<std::vector<Polynomial>> generators,
                       const PipelineOptions& options = {});

/// JSON document for a report. Wall-clock fields are omitted when
/// `timings` is false, which makes reports of repeated runs identical.
std::string report_json(const RunReport& r, bool timings = true);

/// Human-readable summary of a report.
std::string report_text(const RunReport& r);

/// Solver status text, or "NI" when the solver got no input.
std::string outcome_label(const RunReport& r);

/// Benchmark grid cell: maximal generator degree D and total generator count l.
struct Structure {
  unsigned D = 1;
  std::size_t l = 3;
  std::string label() const;
  bool operator==(const Structure&) const = default;
};

std::vector<Structure> default_grid();
/// Parses "1:3,1:4,2:2" style lists.
std::vector<Structure> parse_grid(std::string_view text);

/// Generator lists for a grid cell: l is split as evenly as possible over
/// the variables (earlier variables get the extra ones) and variable i draws
/// from x_i^D, then the other monomials of degree D, then degree D-1, ...,
/// then the constant 1.
/// Throws Error when l < n or there are not enough monomials.
std::vector<std::vector<Polynomial>> grid_generators(const ContextPtr& ctx, const Structure& s);

struct BenchOptions {
  std::vector<Structure> grid = default_grid();
  PipelineOptions pipeline;
  unsigned jobs = 1;
  /// Overrides each problem's synthesis budget when set.
  std::optional<double> synth_budget;
  std::optional<double> solve_budget;
};

struct BenchRow {
  std::string file;
  std::string benchmark;
  /// Unset for problems with their own `update` lines.
  std::optional<Structure> structure;
  /// False when the grid cell does not fit the problem (l < n).
  bool applicable = true;
  RunReport report;
};

struct BenchTable {
  std::vector<BenchRow> rows;
  std::vector<Structure> grid;

  std::string to_csv() const;
  /// Two tables: timings with TL/F/NI markers, then s and finiteness.
  std::string to_text() const;
};

/// Runs every `*.loop` file in `dir` (sorted by name). Problems with
/// `update` lines run once; the rest run once per grid cell. A file that
/// fails to parse becomes a single Error row.
BenchTable run_benchmarks(const std::filesystem::path& dir, const BenchOptions& options = {});

}  // namespace loopsynth
