#include <doctest.h>

#include <sys/stat.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "example_data.hpp"
#include "loopsynth/errors.hpp"
#include "loopsynth/sexpr.hpp"
#include "loopsynth/solve.hpp"
#include "test_support.hpp"

using namespace loopsynth;
using loopsynth::testing::P;
using loopsynth::testing::ctx_of;

namespace {

const SynthesisSystem& cubic_system() {
  static const SynthesisSystem sys = generate_loops(loopsynth::testing::cubic_template(),
                                                    loopsynth::testing::cubic_invariants(
                                                        loopsynth::testing::cubic_template().ctx));
  return sys;
}

SolveRequest request(SynthesisSystem sys, NonzeroPolicy policy = NonzeroPolicy::vector()) {
  SolveRequest req;
  req.system = std::move(sys);
  req.policy = policy;
  req.budget_seconds = 20;
  return req;
}

// A stand-in solver: a shell script that prints `output` whatever it is given.
class FakeSolver {
 public:
  explicit FakeSolver(const std::string& body) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("loopsynth-fake-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".sh");
    std::ofstream(path_) << "#!/bin/sh\n" << body << "\n";
    ::chmod(path_.c_str(), 0755);
  }
  ~FakeSolver() { std::filesystem::remove(path_); }
  SolverConfig config() const { return {{path_.string(), "{script}"}}; }

 private:
  std::filesystem::path path_;
};

std::vector<Rational> ints(std::initializer_list<long> v) {
  std::vector<Rational> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("s-expression reader") {
  const auto e = parse_sexprs("sat\n(model ; comment\n (define-fun |odd name| () Int (- 3)) \"a \"\"q\"\"\")");
  REQUIRE(e.size() == 2);
  CHECK(e[0].is_atom("sat"));
  REQUIRE(e[1].items.size() == 3);
  CHECK(e[1].items[1].items[1].is_atom("odd name"));
  CHECK(e[1].items[1].items[4].to_string() == "(- 3)");
  CHECK(e[1].items[2].atom == "\"a \"\"q\"\"\"");
  CHECK(parse_sexprs("  ; only a comment\n").empty());
  CHECK_THROWS_AS(parse_sexprs("(a (b)"), ParseError);
  CHECK_THROWS_AS(parse_sexprs("a)"), ParseError);
  CHECK_THROWS_AS(parse_sexprs("\"open"), ParseError);
}

TEST_CASE("emit_smtlib") {
  auto y = ctx_of({"y1", "y2"});
  const auto req = request(make_system(y, {P("1/2*y1^2 - 3*y1*y2 + 2", y), P("y2", y)}));
  const std::string script = emit_smtlib(req);
  CHECK(script ==
        "(set-option :produce-models true)\n"
        "(set-logic QF_NIA)\n"
        "(declare-const y1 Int)\n"
        "(declare-const y2 Int)\n"
        "(assert (= (+ (* y1 y1) (* (- 6) y1 y2) 4) 0))\n"
        "(assert (= y2 0))\n"
        "(assert (or (distinct y1 0) (distinct y2 0)))\n"
        "(check-sat)\n"
        "(get-model)\n");

  auto rational = req;
  rational.domain = Domain::Rationals;
  rational.policy = NonzeroPolicy::at(1);
  const std::string r = emit_smtlib(rational);
  CHECK(r.find("(set-logic QF_NRA)") != std::string::npos);
  CHECK(r.find("(declare-const y2 Real)") != std::string::npos);
  CHECK(r.find("(assert (distinct y2 0))") != std::string::npos);
  CHECK(r.find("(or") == std::string::npos);

  auto none = request(make_system(y, {P("y1", y)}), NonzeroPolicy::none());
  CHECK(emit_smtlib(none).find("distinct") == std::string::npos);

  CHECK_THROWS_AS(emit_smtlib(request(make_system(y, {}))), Error);
  auto bad_budget = req;
  bad_budget.budget_seconds = 0;
  CHECK_THROWS_AS(emit_smtlib(bad_budget), Error);
  CHECK_THROWS_AS(emit_smtlib(request(make_system(y, {P("y1", y)}), NonzeroPolicy::at(2))), Error);
}

TEST_CASE("emitted scripts parse as SMT-LIB2 commands") {
  auto check = [](const SolveRequest& req) {
    const auto cmds = parse_sexprs(emit_smtlib(req));
    const auto& vars = *req.system.ctx;
    std::size_t declared = 0, asserted = 0;
    for (const auto& c : cmds) {
      REQUIRE(c.is_list);
      REQUIRE(!c.items.empty());
      const std::string& head = c.items[0].atom;
      if (head == "declare-const") {
        REQUIRE(c.items.size() == 3);
        CHECK(c.items[1].atom == vars.name(declared));
        ++declared;
      } else if (head == "assert") {
        REQUIRE(c.items.size() == 2);
        ++asserted;
      } else {
        CHECK((head == "set-option" || head == "set-logic" || head == "check-sat" || head == "get-model"));
      }
    }
    CHECK(declared == vars.size());
    CHECK(asserted == req.system.polys.size() + 1);
    CHECK(cmds[cmds.size() - 2].to_string() == "(check-sat)");
    CHECK(cmds.back().to_string() == "(get-model)");
  };
  check(request(cubic_system()));
  auto y = ctx_of({"y1"});
  check(request(make_system(y, {Polynomial::constant(y, 1)})));

  // The asserted polynomials read back as the system, up to scaling.
  const auto cmds = parse_sexprs(emit_smtlib(request(cubic_system())));
  std::function<Polynomial(const SExpr&)> back = [&](const SExpr& e) -> Polynomial {
    const auto& ctx = cubic_system().ctx;
    if (e.is_atom()) {
      if (auto i = ctx->index_of(e.atom)) return Polynomial::variable(ctx, *i);
      return Polynomial::constant(ctx, parse_rational(e.atom));
    }
    const std::string& op = e.items[0].atom;
    Polynomial acc = back(e.items[1]);
    if (op == "-" && e.items.size() == 2) return -acc;
    for (std::size_t k = 2; k < e.items.size(); ++k) {
      if (op == "+") acc += back(e.items[k]);
      else if (op == "*") acc *= back(e.items[k]);
      else FAIL("unexpected operator " << op);
    }
    return acc;
  };
  std::size_t k = 0;
  for (const auto& c : cmds) {
    if (c.items[0].atom != "assert" || c.items[1].items[0].atom != "=") continue;
    CHECK(associates(back(c.items[1].items[1]), cubic_system().polys[k]));
    ++k;
  }
  CHECK(k == cubic_system().polys.size());
}

TEST_CASE("parse_solver_output") {
  auto y = ctx_of({"y1", "y2"});
  const auto sat = parse_solver_output("sat\n(\n  (define-fun y2 () Int\n    (- 4))\n  (define-fun y1 () Int 7)\n)\n", *y);
  CHECK(sat.status == SolveStatus::Sat);
  CHECK(sat.values == ints({7, -4}));
  const auto old = parse_solver_output("sat (model (define-fun y1 () Real (/ 1.0 2.0)) (define-fun y2 () Real (- 0.25)))",
                                       *y);
  CHECK(old.values == std::vector<Rational>{Rational(1, 2), Rational(-1, 4)});
  CHECK(parse_solver_output("unsat\n(error \"model is not available\")", *y).status == SolveStatus::Unsat);
  CHECK(parse_solver_output("unknown\n", *y).status == SolveStatus::Unknown);
  CHECK_THROWS_AS(parse_solver_output("", *y), SolverProtocolError);
  CHECK_THROWS_AS(parse_solver_output("(error \"boom\")", *y), SolverProtocolError);
  CHECK_THROWS_AS(parse_solver_output("sat\n", *y), SolverProtocolError);
  CHECK_THROWS_AS(parse_solver_output("sat ((define-fun y1 () Int 1))", *y), SolverProtocolError);
  CHECK_THROWS_AS(parse_solver_output("sat ((define-fun y1 () Int 1) (define-fun y2 () Int (root-obj x 1)))", *y),
                  SolverProtocolError);
  CHECK_THROWS_AS(parse_solver_output("sat ((define-fun y1 () Int 1) (define-fun y2 () Int", *y), SolverProtocolError);
}

TEST_CASE("run_external_solver with stand-in solvers") {
  auto y = ctx_of({"y1", "y2"});
  const auto req = request(make_system(y, {P("y1 + y2", y)}));
  const std::string script = emit_smtlib(req);

  SolverConfig missing{{"/nonexistent/solver"}};
  CHECK(run_external_solver(req, script, missing).status == SolveStatus::SolverUnavailable);
  CHECK(run_external_solver(req, script, SolverConfig{}).status == SolveStatus::SolverUnavailable);

  FakeSolver good("echo sat; echo '((define-fun y1 () Int 2) (define-fun y2 () Int (- 2)))'");
  const auto ok = run_external_solver(req, script, good.config());
  CHECK(ok.status == SolveStatus::Sat);
  CHECK(ok.values == ints({2, -2}));
  CHECK(ok.assignment(*y).at("y2") == -2);

  // The script path reaches the solver.
  FakeSolver echo_script("grep -q 'declare-const y2' \"$1\" && echo unsat || echo unknown");
  CHECK(run_external_solver(req, script, echo_script.config()).status == SolveStatus::Unsat);

  FakeSolver wrong("echo sat; echo '((define-fun y1 () Int 2) (define-fun y2 () Int 2))'");
  CHECK_THROWS_AS(run_external_solver(req, script, wrong.config()), SolverProtocolError);
  FakeSolver zero("echo sat; echo '((define-fun y1 () Int 0) (define-fun y2 () Int 0))'");
  CHECK_THROWS_AS(run_external_solver(req, script, zero.config()), SolverProtocolError);
  FakeSolver fractional("echo sat; echo '((define-fun y1 () Int (/ 1 2)) (define-fun y2 () Int (- (/ 1 2))))'");
  CHECK_THROWS_AS(run_external_solver(req, script, fractional.config()), SolverProtocolError);
  auto rational = req;
  rational.domain = Domain::Rationals;
  CHECK(run_external_solver(rational, script, fractional.config()).values ==
        std::vector<Rational>{Rational(1, 2), Rational(-1, 2)});

  FakeSolver garbage("echo hello world");
  CHECK_THROWS_AS(run_external_solver(req, script, garbage.config()), SolverProtocolError);

  FakeSolver slow("sleep 5; echo sat");
  auto quick = req;
  quick.budget_seconds = 0.2;
  const auto timed_out = run_external_solver(quick, script, slow.config());
  CHECK(timed_out.status == SolveStatus::Unknown);
  CHECK(timed_out.seconds < 2.0);
}

TEST_CASE("solving with an installed solver") {
  const auto config = SolverConfig::from_environment();
  if (!config.resolved_binary()) {
    MESSAGE("no SMT solver found; skipping");
    return;
  }
  const auto out = solve(request(cubic_system()), config);
  REQUIRE(out.status == SolveStatus::Sat);
  for (const auto& p : cubic_system().polys) CHECK(evaluate(p, out.values) == 0);

  auto y = ctx_of({"y1"});
  CHECK(solve(request(make_system(y, {Polynomial::constant(y, 1)})), config).status == SolveStatus::Unsat);
  const auto zero = solve(request(make_system(y, {P("y1", y)}), NonzeroPolicy::none()), config);
  REQUIRE(zero.status == SolveStatus::Sat);
  CHECK(zero.values == ints({0}));
  CHECK(solve(request(make_system(y, {P("y1", y)})), config).status == SolveStatus::Unsat);

  // y^2 = 2 has real but no integer points.
  auto two = request(make_system(y, {P("y1^2 - 2", y)}));
  CHECK(solve(two, config).status == SolveStatus::Unsat);
}

TEST_CASE("solve_linear") {
  auto y = ctx_of({"y1", "y2", "y3", "y4", "y5"});
  const auto fam = solve_linear(make_system(y, {P("y5", y), P("y3 + y4", y), P("y1 + y2", y)}));
  REQUIRE(fam.kind == LinearSolution::Kind::Solved);
  CHECK(fam.particular == ints({0, 0, 0, 0, 0}));
  REQUIRE(fam.kernel.size() == 2);
  // Same span as (mu1, -mu1, mu2, -mu2, 0).
  for (int m1 = -2; m1 <= 2; ++m1) {
    for (int m2 = -2; m2 <= 2; ++m2) {
      const auto v = fam.at(ints({-m1, -m2}));
      CHECK(v == loopsynth::testing::family_coefficients(1, m1, m2));
    }
  }

  const auto shifted = solve_linear(make_system(y, {P("y5 + 1", y), P("y3 + y4 + 1", y), P("y1 + y2 - 1", y)}));
  REQUIRE(shifted.kind == LinearSolution::Kind::Solved);
  CHECK(shifted.at(ints({-2, 1})) == loopsynth::testing::family_coefficients(3, 3, -2));

  auto one = ctx_of({"y1"});
  CHECK(solve_linear(make_system(one, {P("y1 - 1", one), P("y1 + 1", one)})).kind ==
        LinearSolution::Kind::Inconsistent);
  const auto all = solve_linear(make_system(y, {}));
  CHECK(all.kind == LinearSolution::Kind::Solved);
  CHECK(all.kernel.size() == 5);
  CHECK(solve_linear(make_system(one, {P("y1^2", one)})).kind == LinearSolution::Kind::NotLinear);
  CHECK(solve_linear(cubic_system()).kind == LinearSolution::Kind::NotLinear);
  CHECK(solve_linear(make_system(one, {Polynomial::constant(one, 3)})).kind == LinearSolution::Kind::Inconsistent);
}

TEST_CASE("solve_linear agrees with the box search") {
  auto y = ctx_of({"a", "b", "c"});
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int k = 0; k < 40; ++k) {
    std::vector<Polynomial> sys;
    const int rows = 1 + k % 3;
    for (int r = 0; r < rows; ++r) {
      Polynomial p(y);
      for (std::size_t i = 0; i < 3; ++i) p += Polynomial::variable(y, i) * Rational(coef(rng));
      p += Polynomial::constant(y, coef(rng));
      sys.push_back(p);
    }
    const auto S = make_system(y, sys);
    const auto lin = solve_linear(S);
    const auto box = brute_force_box(S, 3);
    if (lin.kind == LinearSolution::Kind::Inconsistent) {
      CHECK(box.empty());
      continue;
    }
    REQUIRE(lin.kind == LinearSolution::Kind::Solved);
    // Every box point is particular + kernel combination: check by solving
    // for the free coordinates, which are the parameters themselves.
    for (const auto& pt : box) {
      std::vector<Rational> params;
      for (auto f : lin.free_variables) params.emplace_back(pt[f]);
      std::vector<Rational> expect(pt.begin(), pt.end());
      CHECK(lin.at(params) == expect);
    }
    // Conversely every integer point of the family inside the box is found.
    std::set<std::vector<Integer>> found(box.begin(), box.end());
    std::size_t inside = 0;
    std::vector<long> params(lin.kernel.size(), -3);
    for (;;) {
      std::vector<Rational> rp(params.begin(), params.end());
      const auto v = lin.at(rp);
      bool ok = true;
      std::vector<Integer> iv;
      for (const auto& x : v) {
        if (!is_integer(x) || abs(x) > 3) ok = false;
        iv.push_back(x.get_num());
      }
      if (ok) {
        ++inside;
        CHECK(found.count(iv) == 1);
      }
      std::size_t i = 0;
      while (i < params.size() && params[i] == 3) params[i++] = -3;
      if (i == params.size()) break;
      ++params[i];
    }
    CHECK(inside == box.size());
  }
}

TEST_CASE("rational_roots") {
  auto y = ctx_of({"y"});
  CHECK(rational_roots(P("y^2 - y + 1", y)).empty());
  CHECK(rational_roots(P("y^3", y)) == ints({0}));
  CHECK(rational_roots(P("2*y - 3", y)) == std::vector<Rational>{Rational(3, 2)});
  CHECK(rational_roots(P("(y - 2)*(3*y + 1)*y^2*(y^2 + 1)", y)) ==
        std::vector<Rational>{Rational(-1, 3), Rational(0), Rational(2)});
  CHECK(rational_roots(P("1/2*y^2 - 1/8", y)) == std::vector<Rational>{Rational(-1, 2), Rational(1, 2)});
  CHECK(rational_roots(P("7", y)).empty());
  CHECK_THROWS_AS(rational_roots(Polynomial(y)), Error);
  auto yz = ctx_of({"y", "z"});
  CHECK(rational_roots(P("z^2 - 4", yz)) == ints({-2, 2}));
  CHECK_THROWS_AS(rational_roots(P("y*z", yz)), Error);
  CHECK(divisors(-12) == std::vector<Integer>{1, 2, 3, 4, 6, 12});
  CHECK(divisors(1) == std::vector<Integer>{1});
}

TEST_CASE("rational_roots against brute-force candidates") {
  auto y = ctx_of({"y"});
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-50, 50), deg(1, 6), pick(0, 1);
  std::uniform_int_distribution<int> small(-7, 7), lead(1, 7);
  int with_roots = 0;
  for (int k = 0; k < 200; ++k) {
    Polynomial p(y);
    std::set<Rational> expect;
    if (pick(rng) == 0) {
      // Random coefficients: every rational root a/b in lowest terms has
      // |a| <= |c_low| and b <= |c_lead|, so a full grid scan finds all.
      for (int d = deg(rng); d >= 0; --d) p += Polynomial::constant(y, coef(rng)) * P("y", y).pow(d);
      if (p.is_zero()) continue;
      if (p.is_constant()) {
        CHECK(rational_roots(p).empty());
        continue;
      }
      const auto& terms = p.terms();
      const long lead_c = std::abs(terms.front().coeff.get_num().get_si());
      const long low_c = std::abs(terms.back().coeff.get_num().get_si());
      if (terms.back().monomial.degree() > 0) expect.insert(0);
      for (long b = 1; b <= lead_c; ++b) {
        for (long a = -low_c; a <= low_c; ++a) {
          Rational r(a, b);
          r.canonicalize();
          if (evaluate(p, std::vector<Rational>{r}) == 0) expect.insert(r);
        }
      }
    } else {
      // Planted linear factors, times an irreducible quadratic sometimes.
      p = pick(rng) ? P("y^2 + 3", y) : Polynomial::constant(y, 1);
      const int factors = deg(rng);
      for (int f = 0; f < factors; ++f) {
        const int a = small(rng), b = lead(rng);
        p *= P("y", y) * Rational(b) - Polynomial::constant(y, a);
        Rational r(a, b);
        r.canonicalize();
        expect.insert(r);
      }
    }
    const auto roots = rational_roots(p);
    if (!roots.empty()) ++with_roots;
    REQUIRE(std::is_sorted(roots.begin(), roots.end()));
    for (const auto& r : roots) REQUIRE(evaluate(p, std::vector<Rational>{r}) == 0);
    REQUIRE(std::vector<Rational>(expect.begin(), expect.end()) == roots);
  }
  CHECK(with_roots > 50);
}

TEST_CASE("brute_force_box") {
  const auto& sys = cubic_system();
  const auto pts = brute_force_box(sys, 1);
  std::set<std::vector<Integer>> got(pts.begin(), pts.end());
  // Points of the three linear components with coordinates in {-1, 0, 1};
  // the other two components have no real points.
  std::set<std::vector<Integer>> expect;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int fam = 1; fam <= 3; ++fam) {
        const auto v = loopsynth::testing::family_coefficients(fam, a, b);
        if (std::all_of(v.begin(), v.end(), [](const Rational& x) { return abs(x) <= 1; })) {
          std::vector<Integer> iv;
          for (const auto& x : v) iv.push_back(x.get_num());
          expect.insert(iv);
        }
      }
    }
  }
  CHECK(expect.size() == 17);
  CHECK(got == expect);
  CHECK(got.count({0, 0, 0, 0, 0}) == 1);
  CHECK(got.count({0, 0, 1, -1, 0}) == 1);
  CHECK(got.count({1, 0, 1, 0, -1}) == 1);
  for (const auto& pt : pts) {
    std::vector<Rational> r(pt.begin(), pt.end());
    CHECK(evaluate(sys.polys[0], r) == 0);
  }

  auto y = ctx_of({"y1", "y2"});
  CHECK(brute_force_box(make_system(y, {Polynomial::constant(y, 1)}), 3).empty());
  CHECK(brute_force_box(make_system(y, {}), 0) == std::vector<std::vector<Integer>>{{0, 0}});
  CHECK(brute_force_box(make_system(y, {}), 1).size() == 9);
  BoxOptions tiny;
  tiny.cap = 10;
  CHECK_THROWS_AS(brute_force_box(make_system(y, {}), 1, tiny), EnumerationCapExceeded);
}

TEST_CASE("classify_finiteness") {
  CHECK(classify_finiteness(cubic_system()) == Finiteness::Infinite);
  auto y = ctx_of({"y1", "y2"});
  CHECK(classify_finiteness(make_system(y, {P("y1 - 1", y), P("y2 + 2", y)})) == Finiteness::Finite);
  CHECK(classify_finiteness(make_system(y, {P("y1*y2", y)})) == Finiteness::Infinite);
  CHECK(classify_finiteness(make_system(y, {Polynomial::constant(y, 1)})) == Finiteness::Finite);
  CHECK(classify_finiteness(make_system(y, {})) == Finiteness::Infinite);
  CHECK(classify_finiteness(make_system(y, {P("y1^2 + y2^2 + 1", y), P("y1 - y2", y)})) == Finiteness::Finite);

  auto c4 = ctx_of({"a", "b", "c", "d"});
  GroebnerBudget tiny;
  tiny.max_steps = 3;
  const auto cyclic = make_system(c4, {P("a + b + c + d", c4), P("a*b + b*c + c*d + d*a", c4),
                                       P("a*b*c + b*c*d + c*d*a + d*a*b", c4), P("a*b*c*d - 1", c4)});
  CHECK(classify_finiteness(cyclic, tiny) == Finiteness::Unknown);
}
