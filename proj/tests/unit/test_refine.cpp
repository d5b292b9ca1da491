#include "hvcg/refine.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

using namespace hvcg;

namespace {

const Scope kScope{{"x", "t", "T", "theta"}, {"a"}};

Pred pr(const char* s) { return parse_pred(s, kScope); }
Program prog(const char* s) { return parse_program(s, kScope); }

RefinementStep step(const char* law, std::vector<std::size_t> path, const char* witness = "") {
  return RefinementStep{law, std::move(path), witness, 1};
}

StepResult apply(const Program& term, const RefinementStep& st) { return apply_step(term, st, kScope); }

std::string error_of(const Program& term, const RefinementStep& st) {
  try {
    apply(term, st);
  } catch (const RefinementError& e) {
    return e.what();
  }
  return "";
}

void all_proved(const Model& m, const std::vector<VC>& vcs) {
  ProverConfig cfg = corpus::prover_config(m);
  for (const auto& vc : vcs) {
    ProofResult r = corpus::settle(vc, cfg);
    INFO(vc.origin << ": " << to_string(vc.goal) << " -> " << r.detail);
    CHECK(r.status == ProofStatus::Proved);
  }
}

} // namespace

TEST_SUITE("refine") {

TEST_CASE("script parsing") {
  RefinementScript s = parse_script(R"(
    // a comment
    let I = (x >= 0)
    step r-loop at root
    step r-seq at 0 with I & x <= 1   // trailing comment
    step r-assgn at 0.1.2 with x := 1
  )");
  REQUIRE(s.steps.size() == 3);
  CHECK(s.steps[0].law == "r-loop");
  CHECK(s.steps[0].path.empty());
  CHECK(s.steps[1].witness == "(x >= 0) & x <= 1");
  CHECK(s.steps[2].path == std::vector<std::size_t>{0, 1, 2});
  CHECK(s.steps[2].line == 6);
  CHECK(format_path({0, 1, 2}) == "0.1.2");
  CHECK(format_path({}) == "root");
  // macros replace whole words only
  RefinementScript w = parse_script("let T = x\nstep r-seq at root with T0 = T");
  CHECK(w.steps[0].witness == "T0 = x");
}

TEST_CASE("script errors") {
  CHECK_THROWS_AS(parse_script("step r-nope at root"), RefinementError);
  CHECK_THROWS_AS(parse_script("step r-seq with x = 0"), RefinementError);
  CHECK_THROWS_AS(parse_script("step r-seq at 0..1 with x = 0"), RefinementError);
  CHECK_THROWS_AS(parse_script("apply r-seq at root"), RefinementError);
  CHECK_THROWS_AS(parse_script("let = 3"), RefinementError);
  try {
    parse_script("step r-loop at root\n\nstep r-bad at root");
    FAIL("expected an error");
  } catch (const RefinementError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("skip refines an identity specification") {
  StepResult r = apply(Program::spec(pr("x >= 0"), pr("0 <= x")), step("r-skip", {}));
  CHECK(r.term == Program::skip());
  CHECK(r.vcs.empty());
  CHECK_FALSE(error_of(Program::spec(pr("x >= 0"), pr("x > 0")), step("r-skip", {})).empty());
}

TEST_CASE("assignment law") {
  // [I, I & t = 0] >= t := 0
  StepResult r = apply(Program::spec(pr("T >= 0"), pr("T >= 0 & t = 0")), step("r-assgn", {}, "t := 0"));
  CHECK(r.term == prog("t := 0"));
  REQUIRE(r.vcs.size() == 1);
  CHECK(r.vcs[0].goal == pr("T >= 0 & 0 = 0"));
}

TEST_CASE("structural laws") {
  Program s = Program::spec(pr("x >= 0"), pr("x >= 1"));
  StepResult seq = apply(s, step("r-seq", {}, "x >= 2"));
  CHECK(seq.term == Program::seq({Program::spec(pr("x >= 0"), pr("x >= 2")), Program::spec(pr("x >= 2"), pr("x >= 1"))}));
  CHECK(seq.vcs.empty());

  StepResult cond = apply(s, step("r-cond", {}, "x = 0"));
  REQUIRE(cond.term.kind() == Program::Kind::If);
  CHECK(cond.term.children()[0] == Program::spec(pr("x = 0 & x >= 0"), pr("x >= 1")));

  StepResult cons = apply(s, step("r-cons", {}, "[x >= 1, x >= 2]"));
  CHECK(cons.term == Program::spec(pr("x >= 1"), pr("x >= 2")));
  CHECK(cons.vcs.size() == 2);

  StepResult inv = apply(s, step("r-inv", {}, "x >= 0"));
  CHECK(inv.term == Program::spec(pr("x >= 0"), pr("x >= 0")));
  REQUIRE(inv.vcs.size() == 1);
  CHECK(inv.vcs[0].goal == pr("x >= 1"));

  Program ii = Program::spec(pr("x >= 0"), pr("x >= 0"));
  StepResult loop = apply(ii, step("r-loop", {}));
  CHECK(loop.term == Program::loop(ii, pr("x >= 0")));

  StepResult wh = apply(Program::spec(pr("x >= 0"), pr("!(x < 3) & x >= 0")), step("r-while", {}, "x < 3"));
  REQUIRE(wh.term.kind() == Program::Kind::While);
  CHECK(*wh.term.inv() == pr("x >= 0"));

  StepResult l = apply(s, step("r-assgnl", {}, "x := x + 1 to x >= 2"));
  CHECK(l.term == Program::seq({prog("x := x + 1"), Program::spec(pr("x >= 2"), pr("x >= 1"))}));
  REQUIRE(l.vcs.size() == 1);
  CHECK(l.vcs[0].goal == pr("x + 1 >= 2"));
  // an obligation equal to its premise up to normalization is dropped
  CHECK(apply(s, step("r-assgnl", {}, "x := x + 1 to x >= 1")).vcs.empty());

  StepResult f = apply(s, step("r-assgnf", {}, "x := x + 1"));
  CHECK(f.term == Program::seq({Program::spec(pr("x >= 0"), pr("x + 1 >= 1")), prog("x := x + 1")}));
  CHECK(f.vcs.empty());
}

TEST_CASE("evolution laws") {
  const char* ev = "evol {x := x + a*time} & true on [0, 1]";
  Program target = Program::spec(pr("after({x := x + a*time} & true on [0, 1], x >= 0)"), pr("x >= 0"));
  StepResult r = apply(target, step("r-evlf", {}, ev));
  CHECK(r.term == prog(ev));

  StepResult right = apply(Program::spec(pr("x >= 1"), pr("x >= 0")), step("r-evlfr", {}, ev));
  REQUIRE(right.term.kind() == Program::Kind::Seq);
  CHECK(right.term.children()[1] == prog(ev));

  std::string with_ode = "{x' = a & true on [0, 1]} solution {x := x + a*time}";
  StepResult ode = apply(Program::spec(pr("after({x := x + a*time} & true on [0, 1], x >= 0)"), pr("x >= 0")),
                         step("r-evl", {}, with_ode.c_str()));
  REQUIRE(ode.vcs.size() == 1);
  CHECK(ode.vcs[0].is_certificate);
  CHECK(ode.vcs[0].certificate_ok);

  // an evol command does not go through r-evl, nor an ODE through r-evlf
  CHECK(error_of(target, step("r-evl", {}, ev)).find("r-evlf") != std::string::npos);
  CHECK(error_of(target, step("r-evlf", {}, with_ode.c_str())).find("r-evl laws") != std::string::npos);
}

TEST_CASE("law-shape mismatch messages") {
  Program s = Program::spec(pr("x >= 0"), pr("x >= 1"));
  CHECK(error_of(s, step("r-loop", {})).find("[I, I]") != std::string::npos);
  CHECK(error_of(s, step("r-seq", {})).find("needs a witness") != std::string::npos);
  CHECK(error_of(s, step("r-skip", {}, "x = 0")).find("takes no witness") != std::string::npos);
  CHECK(error_of(s, step("r-seq", {0})).find("no subterm at position 0") != std::string::npos);
  CHECK(error_of(prog("skip"), step("r-skip", {})).find("specification statement") != std::string::npos);
  CHECK(error_of(s, step("r-seq", {}, "x >=")).find("malformed witness") != std::string::npos);
  CHECK(error_of(s, step("r-evlf", {}, "evol {x := x + time} & true on [0, 1]")).find("r-cons") != std::string::npos);
  std::string w = error_of(Program::spec(pr("x >= 0"), pr("x > 0 | x < 0")), step("r-while", {}, "x < 3"));
  CHECK(w.find("does not match") != std::string::npos);
  CHECK(w.rfind("line 1: r-while at root", 0) == 0);
}

TEST_CASE("replay end conditions") {
  RefinementScript none;
  CHECK_THROWS_WITH_AS(replay(pr("x >= 0"), pr("x >= 0"), prog("skip"), none, kScope), doctest::Contains("residual Spec"),
                       RefinementError);
  RefinementScript s = parse_script("step r-assgn at root with x := x + 1");
  CHECK_THROWS_WITH_AS(replay(pr("x >= 0"), pr("x >= 0"), prog("x := x + 2"), s, kScope),
                       doctest::Contains("target mismatch"), RefinementError);
  ReplayResult ok = replay(pr("x >= 0"), pr("x >= 0"), prog("x := x + 1"), s, kScope);
  CHECK(ok.final_term == prog("x := x + 1"));
  REQUIRE(ok.vcs.size() == 1);
  CHECK(ok.vcs[0].id == "vc1");
  CHECK(ok.trace.size() == 1);
}

TEST_CASE("normalization equivalence") {
  CHECK(equivalent_up_to_normalization(pr("x >= 0 & t = 1"), pr("1 = t & 0 <= x")));
  CHECK(equivalent_up_to_normalization(pr("2*(x + 1) <= 4"), pr("2*x + 2 <= 4")));
  CHECK(equivalent_up_to_normalization(pr("x < 1 | t = 0"), pr("t = 0 | 1 > x")));
  CHECK_FALSE(equivalent_up_to_normalization(pr("x < 1"), pr("x <= 1")));
  CHECK_FALSE(equivalent_up_to_normalization(pr("x >= 0 & t = 1"), pr("x >= 0 | t = 1")));
}

TEST_CASE("thermostat refinement replays and discharges") {
  Model m = corpus::model("thermostat_refine.hyb");
  ReplayResult r = corpus::replay_with(m, "thermostat.ref");
  CHECK(r.final_term == m.refine->target);
  CHECK(r.trace.size() == 16);
  CHECK(r.vcs.size() == 9);
  all_proved(m, r.vcs);
}

TEST_CASE("tank refinement replays and discharges") {
  Model m = corpus::model("tank_refine.hyb");
  ReplayResult r = corpus::replay_with(m, "tank.ref");
  CHECK(r.final_term == m.refine->target);
  CHECK(r.vcs.size() == 21);
  all_proved(m, r.vcs);
}

TEST_CASE("bouncing ball refinement replays and discharges") {
  Model m = corpus::model("bouncing_ball_refine.hyb");
  ReplayResult r = corpus::replay_with(m, "bouncing_ball.ref");
  CHECK(r.final_term == m.refine->target);
  CHECK(r.vcs.size() == 5);
  all_proved(m, r.vcs);
}

TEST_CASE("a weak midpoint replays but leaves false VCs") {
  Model m = corpus::model("thermostat_refine.hyb");
  ReplayResult r = corpus::replay_with(m, "thermostat_weak_midpoint.ref");
  CHECK(r.final_term == m.refine->target);
  ProverConfig cfg = corpus::prover_config(m);
  int falsified = 0;
  for (const auto& vc : r.vcs) {
    ProofResult p = corpus::settle(vc, cfg);
    if (p.status == ProofStatus::Falsified) {
      ++falsified;
      REQUIRE(p.witness);
      CHECK(check_counterexample(vc, *p.witness, cfg));
    }
  }
  CHECK(falsified == 2);
}

}
