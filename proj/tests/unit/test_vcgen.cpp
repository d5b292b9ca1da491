#include "hvcg/dynamics.hpp"
#include "hvcg/parser.hpp"
#include "hvcg/vcgen.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

#include <random>

using namespace hvcg;

namespace {

std::vector<VC> corpus_vcs(const std::string& name) { return corpus::hoare_vcs(corpus::model(name)); }

// x, y over {0, 1, 2}: nine states.
std::vector<Store> grid() {
  std::vector<Store> out;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) out.push_back(Store({"x", "y"}, {{"x", double(x)}, {"y", double(y)}}));
  return out;
}

bool valid_on(const VC& vc, const std::vector<Store>& states) {
  for (const auto& s : states) {
    Valuation v{&s.values(), nullptr, 0.0};
    bool hyps = true;
    for (const auto& h : vc.hypotheses) hyps = hyps && eval(h, v);
    if (hyps && !eval(vc.goal, v)) return false;
  }
  return true;
}

Program random_finite(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 6);
  std::uniform_int_distribution<int> val(0, 2);
  std::uniform_int_distribution<int> rel(0, 5);
  auto atom = [&] {
    Expr a = val(rng) ? Expr::var("x") : Expr::var("y");
    Expr b = val(rng) ? Expr::constant(val(rng)) : Expr::var("y");
    return Pred::atom(static_cast<Rel>(rel(rng)), a, b);
  };
  switch (pick(rng)) {
  case 0: return Program::assign(StateUpdate({{"x", Expr::constant(val(rng))}}));
  case 1: return Program::assign(StateUpdate({{"x", Expr::var("y")}, {"y", Expr::var("x")}}));
  case 2: return Program::test(atom());
  case 3: return Program::seq({random_finite(rng, depth - 1), random_finite(rng, depth - 1)});
  case 4: return Program::choice({random_finite(rng, depth - 1), random_finite(rng, depth - 1)});
  case 5: return Program::if_then_else(atom(), random_finite(rng, depth - 1), random_finite(rng, depth - 1));
  default: return Program::seq({Program::assertion(atom()), random_finite(rng, depth - 1)});
  }
}

} // namespace

TEST_SUITE("vcgen") {

TEST_CASE("skip gives the single entry VC") {
  Scope s{{"x"}, {}};
  Pred P = parse_pred("x > 0", s);
  VcSink sink;
  CHECK(weakest_pre(Program::skip(), P, sink) == P);
  auto vcs = generate(HoareGoal{P, Program::skip(), P});
  REQUIRE(vcs.size() == 1);
  CHECK(vcs[0].id == "vc1");
  CHECK(vcs[0].hypotheses == std::vector<Pred>{P});
  CHECK(vcs[0].goal == P);
}

TEST_CASE("assignment chain of the thermostat control") {
  Scope s{{"T", "T0", "t"}, {"Tl", "Th"}};
  Pred I = parse_pred("Tl <= T & T <= Th", s);
  Pred post = parse_pred("Tl <= T & T <= Th & t = 0 & T0 = T", s);
  VcSink sink;
  Pred wp = weakest_pre(parse_program("t := 0 ; T0 := T", s), post, sink);
  CHECK(sink.vcs().empty());
  CHECK(wp == parse_pred("Tl <= T & T <= Th & 0 = 0 & T = T", s));
}

TEST_CASE("bouncing ball VCs") {
  auto vcs = corpus_vcs("bouncing_ball.hyb");
  REQUIRE(vcs.size() == 3);
  CHECK(vcs[0].origin == "entry (pre -> wp)");
  CHECK(vcs[1].origin == "loop-invariant preserved");
  CHECK(vcs[2].origin == "loop-invariant exit");
  // the preserved VC carries the evolution binder
  auto tb = time_binder(vcs[1]);
  REQUIRE(tb);
  CHECK_FALSE(tb->domain.bounded());
  CHECK_FALSE(time_binder(vcs[2]));
  // parameter assumptions travel into every VC
  for (const auto& vc : vcs) CHECK(to_string(vc.hypotheses.front()) == "g < 0 & h >= 0");
}

TEST_CASE("thermostat VCs") {
  auto vcs = corpus_vcs("thermostat.hyb");
  REQUIRE(vcs.size() == 7);
  int certs = 0, evolutions = 0;
  for (const auto& vc : vcs) {
    certs += vc.is_certificate;
    evolutions += time_binder(vc).has_value();
    if (vc.is_certificate) CHECK(vc.certificate_ok);
  }
  CHECK(certs == 2);
  CHECK(evolutions == 2);
}

TEST_CASE("tank VCs include the invariant obligations") {
  auto vcs = corpus_vcs("tank_dinv.hyb");
  int dinv = 0, exits = 0;
  for (const auto& vc : vcs) {
    if (vc.origin.rfind("dinv ", 0) == 0 && vc.origin.find("exit") == std::string::npos) ++dinv;
    if (vc.origin == "dinv exit (I & G -> Q)") ++exits;
  }
  CHECK(dinv == 12);
  CHECK(exits == 2);
  CHECK(vcs.size() == 17);
}

TEST_CASE("missing annotations") {
  Scope s{{"x"}, {}};
  Pred t = Pred::truth();
  CHECK_THROWS_AS(generate(HoareGoal{t, Program::star(parse_program("x := 1", s)), t}), AnnotationError);
  CHECK_THROWS_AS(generate(HoareGoal{t, parse_program("{x' = 1 & true on [0, 1]}", s), t}), AnnotationError);
  CHECK_THROWS_AS(generate(HoareGoal{t, Program::while_do(t, parse_program("x := 1", s), std::nullopt), t}),
                  AnnotationError);
}

TEST_CASE("VCs agree with the finite model") {
  std::mt19937_64 rng(41);
  auto states = grid();
  std::uniform_int_distribution<int> v(0, 2);
  int checked = 0, valid_seen = 0;
  for (int k = 0; k < 400; ++k) {
    Program prog = random_finite(rng, 3);
    Pred pre = Pred::atom(Rel::Le, Expr::var("x"), Expr::constant(v(rng)));
    Pred post = Pred::atom(static_cast<Rel>(v(rng)), Expr::var("y"), Expr::var("x"));
    auto vcs = generate(HoareGoal{pre, prog, post});
    bool all = true;
    for (const auto& vc : vcs) all = all && valid_on(vc, states);
    bool hv = kat::hoare_valid(finite_test(pre, states), finite_semantics(prog, states), finite_test(post, states));
    // VCs valid implies the triple; midpoints can only make VCs stronger
    if (all) CHECK(hv);
    ++checked;
    valid_seen += all;
  }
  CHECK(checked == 400);
  CHECK(valid_seen > 20);
}

TEST_CASE("loop-free programs without midpoints have exact VCs") {
  std::mt19937_64 rng(43);
  auto states = grid();
  std::uniform_int_distribution<int> v(0, 2);
  for (int k = 0; k < 300; ++k) {
    Program prog = desugar(random_finite(rng, 3));
    Pred pre = Pred::atom(Rel::Ge, Expr::var("y"), Expr::constant(v(rng)));
    Pred post = Pred::atom(static_cast<Rel>(v(rng) + 3), Expr::var("x"), Expr::constant(v(rng)));
    auto vcs = generate(HoareGoal{pre, prog, post});
    REQUIRE(vcs.size() == 1);
    bool hv = kat::hoare_valid(finite_test(pre, states), finite_semantics(prog, states), finite_test(post, states));
    CHECK(valid_on(vcs[0], states) == hv);
  }
}

}
