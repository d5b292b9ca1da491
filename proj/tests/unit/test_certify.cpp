#include "hvcg/certify.hpp"
#include "hvcg/dynamics.hpp"
#include "hvcg/parser.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hvcg;

namespace {

const Scope kScope{{"x", "v", "T", "T0", "t", "theta", "h", "h0", "pi"}, {"a", "c", "g", "k", "hl", "hh", "tau"}};

Expr ex(const char* s) { return parse_expr(s, kScope); }
Pred pr(const char* s) { return parse_pred(s, kScope); }

Flow flow_of(std::vector<std::pair<std::string, const char*>> b) {
  Flow f;
  for (auto& [x, e] : b) f.bindings.emplace_back(x, ex(e));
  return f;
}

const TimeDomain kTau{Expr::param("tau")};

} // namespace

TEST_SUITE("certify") {

TEST_CASE("identity flow of the zero field") {
  FlowCertificate c = certify_flow({{"x", ex("0")}}, flow_of({{"x", "x"}}), kTau);
  CHECK(c.certified());
  CHECK(c.lipschitz == LipschitzStatus::SymbolicAffine);
  REQUIRE(c.lipschitz_constant);
  CHECK(c.lipschitz_constant->is_const(0));
}

TEST_CASE("thermostat flow") {
  CertifyContext ctx;
  ctx.assumptions = pr("0 < a");
  VectorField f{{"T", ex("-(a*(T - c))")}, {"T0", ex("0")}, {"theta", ex("0")}, {"t", ex("1")}};
  Flow phi = flow_of({{"T", "c - exp(-(a*time))*(c - T)"}, {"t", "time + t"}});
  FlowCertificate cert = certify_flow(f, phi, kTau, ctx);
  CHECK(cert.certified());
  CHECK(cert.derivative == MatchStatus::Symbolic);
  CHECK(cert.initial_condition);
  CHECK(cert.lipschitz == LipschitzStatus::SymbolicAffine);
  REQUIRE(cert.lipschitz_constant);
  CHECK(to_string(*cert.lipschitz_constant) == "a");
}

TEST_CASE("bouncing ball flow") {
  VectorField f{{"x", ex("v")}, {"v", ex("g")}};
  FlowCertificate cert = certify_flow(f, flow_of({{"x", "g*time^2/2 + v*time + x"}, {"v", "g*time + v"}}), TimeDomain{});
  CHECK(cert.certified());
  CHECK(cert.derivative == MatchStatus::Symbolic);
  REQUIRE(cert.lipschitz_constant);
  CHECK(cert.lipschitz_constant->is_const(1));
}

TEST_CASE("wrong flows are rejected") {
  VectorField f{{"x", ex("v")}, {"v", ex("g")}};
  FlowCertificate wrong = certify_flow(f, flow_of({{"x", "g*time^2 + v*time + x"}, {"v", "g*time + v"}}), TimeDomain{});
  CHECK_FALSE(wrong.certified());
  CHECK(wrong.derivative == MatchStatus::Failed);
  FlowCertificate shifted = certify_flow(f, flow_of({{"x", "g*time^2/2 + v*time + x + 1"}, {"v", "g*time + v"}}), TimeDomain{});
  CHECK_FALSE(shifted.initial_condition);
  CHECK_FALSE(shifted.certified());
}

TEST_CASE("non-affine fields get a sampled Lipschitz bound") {
  CertifyContext ctx;
  ctx.lipschitz_box = {{"x", {0.5, 2.0}}};
  FlowCertificate c = certify_flow({{"x", ex("x^2")}}, flow_of({{"x", "x/(1 - x*time)"}}), TimeDomain{Expr::constant(Rational(1, 4))}, ctx);
  CHECK(c.certified());
  CHECK(c.lipschitz == LipschitzStatus::NumericSampled);
  REQUIRE(c.lipschitz_value);
  CHECK(*c.lipschitz_value >= 3.5);
}

TEST_CASE("tank invariant") {
  CertifyContext ctx;
  VectorField f{{"pi", ex("0")}, {"h", ex("k")}, {"h0", ex("0")}, {"t", ex("1")}};
  Pred dI = pr("h = k*t + h0 & 0 <= t & hl <= h0 & h0 <= hh & (pi = 0 | pi = 1)");
  InvariantCertificate cert = diff_invariant(dI, f, pr("t <= (hh - h0)/k"), kTau, ctx);
  CHECK(cert.valid);
  REQUIRE(cert.atoms.size() == 6);
  CHECK(cert.atoms[0].rule == "eq");
  CHECK(cert.atoms[1].rule == "leq");
  for (const auto& a : cert.atoms) CHECK(a.resolution == "proved");
}

TEST_CASE("bouncing ball energy invariant") {
  VectorField f{{"x", ex("v")}, {"v", ex("g")}};
  InvariantCertificate cert = diff_invariant(pr("2*g*x = 2*g*hh + v*v"), f, pr("x >= 0"), TimeDomain{});
  CHECK(cert.valid);
  InvariantCertificate bad = diff_invariant(pr("2*g*x = 2*g*hh - v*v"), f, pr("x >= 0"), TimeDomain{});
  CHECK_FALSE(bad.valid);
}

TEST_CASE("invariant edge cases") {
  VectorField f{{"x", ex("1")}};
  CHECK(diff_invariant(Pred::truth(), f, Pred::truth(), TimeDomain{}).valid);
  // x <= 3 is not invariant under x' = 1
  CHECK_FALSE(diff_invariant(pr("x <= 3"), f, Pred::truth(), TimeDomain{}).valid);
  // while x >= 3 is
  CHECK(diff_invariant(pr("x >= 3"), f, Pred::truth(), TimeDomain{}).valid);
  // negation of a weak inequality becomes a strict one
  InvariantCertificate neg = diff_invariant(pr("!(x <= 3)"), f, Pred::truth(), TimeDomain{});
  CHECK(neg.valid);
  CHECK(neg.atoms[0].rule == "less");
  // x != 0 requires both orders invariant, which x' = 1 breaks
  InvariantCertificate ne = diff_invariant(pr("x != 0"), f, Pred::truth(), TimeDomain{});
  CHECK(ne.atoms[0].rule == "neq");
  CHECK_FALSE(ne.valid);
  CHECK(diff_invariant(pr("x != 0"), {{"x", ex("0")}}, Pred::truth(), TimeDomain{}).valid);
}

TEST_CASE("backward time flips the derivative obligation") {
  VectorField f{{"x", ex("1")}};
  AtomObligation fw = atom_obligations(pr("x < 3"), f, {}, TimeDirection::Forward);
  AtomObligation bw = atom_obligations(pr("x < 3"), f, {}, TimeDirection::Backward);
  REQUIRE(fw.obligations.size() == 1);
  REQUIRE(bw.obligations.size() == 1);
  CHECK(fw.obligations[0].goal.rel() == Rel::Le);
  CHECK(bw.obligations[0].goal.rel() == Rel::Ge);
}

TEST_CASE("valid certificates survive simulation") {
  // orbits started inside the tank invariant stay inside
  VectorField f{{"pi", ex("0")}, {"h", ex("k")}, {"h0", ex("0")}, {"t", ex("1")}};
  Pred dI = pr("h = k*t + h0 & 0 <= t & hl <= h0 & h0 <= hh");
  Values params{{"k", 1}, {"hl", 4}, {"hh", 10}};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(4, 10);
  OdeSpec o;
  o.field = {{"pi", ex("0")}, {"h", ex("k")}, {"h0", ex("0")}, {"t", ex("1")}};
  o.guard = pr("t <= (hh - h0)/k");
  o.domain = TimeDomain{Expr::constant(1)};
  for (int k = 0; k < 50; ++k) {
    double h0 = d(rng);
    Store s({"h", "h0", "pi", "t"}, {{"h", h0}, {"h0", h0}, {"pi", 0}, {"t", 0}});
    OrbitSample orbit = guarded_orbit(Program::ode(o), s, params);
    for (const auto& [t, st] : orbit.reachable) {
      Valuation v{&st.values(), &params, 0.0};
      CHECK(std::fabs(eval(ex("h - (k*t + h0)"), v)) < 1e-9);
      CHECK(eval(pr("0 <= t & hl <= h0 & h0 <= hh"), v));
    }
  }
  CHECK(diff_invariant(dI, f, o.guard, o.domain).valid);
}

TEST_CASE("parameter signs") {
  CHECK(parameter_sign("a", pr("0 < a"), {}) == 1);
  CHECK(parameter_sign("g", pr("g < 0 & 0 <= k"), {}) == -1);
  CHECK(parameter_sign("k", pr("g < 0 & 0 <= k"), {}) == 1);
  CHECK(parameter_sign("c", Pred::truth(), {{"c", Rational(-2)}}) == -1);
  CHECK(parameter_sign("c", Pred::truth(), {}) == 0);
}

}
