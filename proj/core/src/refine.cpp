#include "hvcg/refine.hpp"

#include "hvcg/poly.hpp"
#include "hvcg/store.hpp"
#include "hvcg/vcgen.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace hvcg {

const std::vector<std::string>& refinement_laws() {
  static const std::vector<std::string> laws{"r-skip",  "r-cons",  "r-seq",  "r-cond",  "r-while", "r-inv",
                                             "r-loop",  "r-assgn", "r-assgnl", "r-assgnf", "r-evl", "r-evll",
                                             "r-evlr",  "r-evlf",  "r-evlfl", "r-evlfr"};
  return laws;
}

std::string format_path(const std::vector<std::size_t>& path) {
  if (path.empty()) return "root";
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "." : "") + std::to_string(path[i]);
  return s;
}

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string expand(const std::string& line, const std::vector<std::pair<std::string, std::string>>& macros) {
  std::string s = line;
  // later definitions may refer to earlier ones; expand newest first
  for (auto it = macros.rbegin(); it != macros.rend(); ++it) {
    const auto& [name, text] = *it;
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
      if (s.compare(i, name.size(), name) == 0 && (i == 0 || !ident_char(s[i - 1])) &&
          (i + name.size() == s.size() || !ident_char(s[i + name.size()]))) {
        out += text;
        i += name.size();
      } else {
        out += s[i++];
      }
    }
    s = std::move(out);
  }
  return s;
}

std::vector<std::size_t> parse_path(const std::string& text, int line) {
  if (text == "root") return {};
  std::vector<std::size_t> path;
  std::stringstream ss(text);
  std::string seg;
  while (std::getline(ss, seg, '.')) {
    if (seg.empty() || !std::all_of(seg.begin(), seg.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw RefinementError("malformed path '" + text + "'", line);
    path.push_back(std::stoul(seg));
  }
  return path;
}

} // namespace

RefinementScript parse_script(std::string_view text) {
  RefinementScript script;
  std::vector<std::pair<std::string, std::string>> macros;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto c = raw.find("//"); c != std::string::npos) raw.resize(c);
    std::string s = trim(raw);
    if (s.empty()) continue;
    std::stringstream ls(s);
    std::string head;
    ls >> head;
    if (head == "let") {
      std::string name, eq;
      ls >> name >> eq;
      if (name.empty() || eq != "=" || !std::all_of(name.begin(), name.end(), ident_char))
        throw RefinementError("malformed let: expected 'let NAME = text'", line);
      std::string body;
      std::getline(ls, body);
      macros.emplace_back(name, trim(expand(body, macros)));
      continue;
    }
    if (head != "step") throw RefinementError("expected 'step' or 'let', found '" + head + "'", line);
    RefinementStep st;
    st.line = line;
    std::string at, path;
    ls >> st.law >> at >> path;
    const auto& laws = refinement_laws();
    if (std::find(laws.begin(), laws.end(), st.law) == laws.end())
      throw RefinementError("unknown law '" + st.law + "'", line);
    if (at != "at" || path.empty()) throw RefinementError("expected 'at <path>' after the law name", line);
    st.path = parse_path(path, line);
    std::string rest;
    std::getline(ls, rest);
    rest = trim(rest);
    if (!rest.empty()) {
      if (rest.rfind("with", 0) != 0 || (rest.size() > 4 && ident_char(rest[4])))
        throw RefinementError("expected 'with <witness>' after the path", line);
      st.witness = trim(expand(rest.substr(4), macros));
    }
    script.steps.push_back(std::move(st));
  }
  return script;
}

// ---------------------------------------------------------------------------
// Normalized comparison of predicates

namespace {

std::string canon(const Pred& p);

std::string canon_atom(Rel rel, const Expr& a, const Expr& b) {
  // orient to < / <= / = / !=
  if (rel == Rel::Gt || rel == Rel::Ge) return canon_atom(swap(rel), b, a);
  std::string d = normalize(a - b).canonical();
  if (rel == Rel::Eq || rel == Rel::Ne) {
    std::string e = normalize(b - a).canonical();
    d = std::min(d, e);
  }
  return std::string(rel_symbol(rel)) + "{" + d + "}";
}

std::string canon_list(const char* tag, const std::vector<Pred>& parts, Pred::Kind kind) {
  std::vector<std::string> cs;
  // flatten nested parts of the same kind
  std::vector<Pred> work(parts);
  while (!work.empty()) {
    Pred q = work.back();
    work.pop_back();
    if (q.kind() == kind) {
      for (const auto& r : q.parts()) work.push_back(r);
      continue;
    }
    cs.push_back(canon(q));
  }
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  if (cs.size() == 1) return cs[0];
  std::string s = tag;
  s += "(";
  for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? "," : "") + cs[i];
  return s + ")";
}

std::string canon(const Pred& p) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: return "T";
  case K::False: return "F";
  case K::Atom: return canon_atom(p.rel(), p.lhs(), p.rhs());
  case K::Not: return "not(" + canon(p.parts()[0]) + ")";
  case K::And: return canon_list("and", p.parts(), K::And);
  case K::Or: return canon_list("or", p.parts(), K::Or);
  case K::Implies: return "imp(" + canon(p.parts()[0]) + "," + canon(p.parts()[1]) + ")";
  case K::After: {
    std::string s = "after(";
    std::vector<std::pair<std::string, Expr>> bs = p.flow().bindings;
    std::sort(bs.begin(), bs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [x, e] : bs) s += x + "=" + normalize(e).canonical() + ";";
    s += "|" + canon(p.guard()) + "|";
    s += p.domain().upper ? normalize(*p.domain().upper).canonical() : std::string("inf");
    return s + "|" + canon(p.post()) + ")";
  }
  }
  return "?";
}

} // namespace

bool equivalent_up_to_normalization(const Pred& a, const Pred& b) { return a == b || canon(a) == canon(b); }

// ---------------------------------------------------------------------------
// Laws

namespace {

const Program& at_path(const Program& term, const std::vector<std::size_t>& path, int line) {
  const Program* p = &term;
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::size_t k = path[i];
    const auto& cs = p->children();
    bool has_children = p->kind() == Program::Kind::Seq || p->kind() == Program::Kind::Choice ||
                        p->kind() == Program::Kind::If || p->kind() == Program::Kind::Star ||
                        p->kind() == Program::Kind::While || p->kind() == Program::Kind::Loop;
    if (!has_children || k >= cs.size()) {
      std::vector<std::size_t> prefix(path.begin(), path.begin() + static_cast<long>(i + 1));
      throw RefinementError("no subterm at position " + format_path(prefix), line);
    }
    p = &cs[k];
  }
  return *p;
}

Program replace_at(const Program& term, const std::vector<std::size_t>& path, std::size_t depth, const Program& repl) {
  if (depth == path.size()) return repl;
  std::vector<Program> cs = term.children();
  cs[path[depth]] = replace_at(cs[path[depth]], path, depth + 1, repl);
  if (term.kind() == Program::Kind::Seq) return Program::seq(std::move(cs));
  return term.with_children(std::move(cs));
}

class Witness {
public:
  Witness(const RefinementStep& st, const Scope& scope) : st_(st), scope_(scope) {}

  void require(bool present_expected) const {
    if (present_expected && st_.witness.empty()) fail("law " + st_.law + " needs a witness ('with ...')");
    if (!present_expected && !st_.witness.empty()) fail("law " + st_.law + " takes no witness");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw RefinementError(st_.law + " at " + format_path(st_.path) + ": " + msg, st_.line); }

  template <class F>
  auto parse(F&& f) const {
    try {
      TextParser tp(st_.witness, scope_, st_.line);
      auto r = f(tp);
      tp.expect_end();
      return r;
    } catch (const ParseError& e) {
      fail(std::string("malformed witness: ") + e.what());
    }
  }

private:
  const RefinementStep& st_;
  const Scope& scope_;
};

struct Emitter {
  VcSink sink;
  std::string origin;

  void implication(const Pred& a, const Pred& b, const std::string& what) {
    if (equivalent_up_to_normalization(a, b) || b.kind() == Pred::Kind::True) return;
    sink.emit({a}, b, origin + ": " + what);
  }
};

Pred conj2(const Pred& a, const Pred& b) { return Pred::conj({a, b}); }

Pred flow_pre(const Flow& flow, const Pred& guard, const TimeDomain& dom, const Pred& post) {
  return Pred::after(flow, guard, dom, post);
}

} // namespace

StepResult apply_step(const Program& term, const RefinementStep& st, const Scope& scope, const Pred& assumptions,
                      const CertifyContext& ctx) {
  const Program& node = at_path(term, st.path, st.line);
  Witness w(st, scope);
  if (node.kind() != Program::Kind::Spec) w.fail("position does not address a specification statement");
  const Pred& P = node.pre();
  const Pred& Q = node.post();
  Emitter em{VcSink(assumptions, ctx), st.law + " at " + format_path(st.path)};
  Program out;
  const std::string& law = st.law;

  auto evol_parts = [&](const Program& prog, bool need_solution) {
    struct Parts {
      Flow flow;
      Pred guard;
      TimeDomain domain;
    };
    if (prog.kind() == Program::Kind::Evol) {
      if (law.rfind("r-evlf", 0) != 0) w.fail("an evol command needs the r-evlf laws");
      const auto& e = prog.evol_spec();
      return Parts{e.flow, e.guard, e.domain};
    }
    if (prog.kind() != Program::Kind::Ode) w.fail("witness is not an evolution command");
    if (law.rfind("r-evlf", 0) == 0) w.fail("an ODE needs the r-evl laws (r-evlf is for evol)");
    const auto& o = prog.ode_spec();
    if (!o.solution) {
      if (need_solution) w.fail("ODE has no flow annotation (solution required for this law)");
      return Parts{Flow{}, o.guard, o.domain};
    }
    FlowCertificate cert = certify_flow(o.vector_field(), *o.solution, o.domain, em.sink.context());
    em.sink.emit_certificate(cert, em.origin + ": flow certificate");
    return Parts{*o.solution, o.guard, o.domain};
  };

  if (law == "r-skip") {
    w.require(false);
    if (!equivalent_up_to_normalization(P, Q))
      w.fail("precondition " + to_string(P) + " differs from postcondition " + to_string(Q));
    out = Program::skip();
  } else if (law == "r-cons") {
    w.require(true);
    auto [p2, q2] = w.parse([](TextParser& tp) {
      if (!tp.accept_symbol("[")) throw ParseError("expected '['", 0, 0);
      Pred a = tp.pred();
      if (!tp.accept_symbol(",")) throw ParseError("expected ','", 0, 0);
      Pred b = tp.pred();
      if (!tp.accept_symbol("]")) throw ParseError("expected ']'", 0, 0);
      return std::pair{a, b};
    });
    em.implication(P, p2, "strengthened precondition");
    em.implication(q2, Q, "weakened postcondition");
    out = Program::spec(p2, q2);
  } else if (law == "r-seq") {
    w.require(true);
    Pred r = w.parse([](TextParser& tp) { return tp.pred(); });
    out = Program::seq({Program::spec(P, r), Program::spec(r, Q)});
  } else if (law == "r-cond") {
    w.require(true);
    Pred t = w.parse([](TextParser& tp) { return tp.pred(); });
    out = Program::if_then_else(t, Program::spec(conj2(t, P), Q), Program::spec(conj2(!t, P), Q));
  } else if (law == "r-while") {
    w.require(true);
    Pred t = w.parse([](TextParser& tp) { return tp.pred(); });
    if (!equivalent_up_to_normalization(Q, conj2(!t, P)))
      w.fail("postcondition " + to_string(Q) + " does not match !(" + to_string(t) + ") & precondition");
    out = Program::while_do(t, Program::spec(conj2(t, P), P), P);
  } else if (law == "r-inv") {
    w.require(true);
    Pred i = w.parse([](TextParser& tp) { return tp.pred(); });
    em.implication(P, i, "precondition implies invariant");
    em.implication(i, Q, "invariant implies postcondition");
    out = Program::spec(i, i);
  } else if (law == "r-loop") {
    w.require(false);
    if (!equivalent_up_to_normalization(P, Q))
      w.fail("loop needs [I, I]; precondition " + to_string(P) + " differs from postcondition " + to_string(Q));
    out = Program::loop(Program::spec(P, P), P);
  } else if (law == "r-assgn") {
    w.require(true);
    StateUpdate u = w.parse([](TextParser& tp) { return tp.update(); });
    em.implication(P, subst_update(u, Q), "precondition implies Q[e/x]");
    out = Program::assign(u);
  } else if (law == "r-assgnl") {
    w.require(true);
    auto [u, mid] = w.parse([](TextParser& tp) {
      StateUpdate u = tp.update();
      if (!tp.accept_word("to")) throw ParseError("r-assgnl witness is 'x := e to Q'", 0, 0);
      return std::pair{u, tp.pred()};
    });
    em.implication(P, subst_update(u, mid), "precondition implies Q[e/x]");
    out = Program::seq({Program::assign(u), Program::spec(mid, Q)});
  } else if (law == "r-assgnf") {
    w.require(true);
    auto [u, mid] = w.parse([](TextParser& tp) {
      StateUpdate u = tp.update();
      std::optional<Pred> r;
      if (tp.accept_word("to")) r = tp.pred();
      return std::pair{u, r};
    });
    Pred need = subst_update(u, Q);
    Pred r = mid ? *mid : need;
    em.implication(r, need, "midpoint implies Q'[e/x]");
    out = Program::seq({Program::spec(P, r), Program::assign(u)});
  } else if (law == "r-evl" || law == "r-evlf") {
    w.require(true);
    Program prog = w.parse([](TextParser& tp) { return tp.program(); });
    if (prog.kind() == Program::Kind::Ode && !prog.ode_spec().solution && prog.ode_spec().dinv && law == "r-evl") {
      // differential invariant form: [I, Q] >= x' = f & G dinv I when I & G -> Q
      const auto& o = prog.ode_spec();
      if (!equivalent_up_to_normalization(P, *o.dinv))
        w.fail("precondition " + to_string(P) + " does not match the differential invariant " + to_string(*o.dinv) +
               " (insert an r-cons step)");
      for (const auto& a : dinv_obligations(*o.dinv, o.vector_field(), o.guard, em.sink.context())) {
        if (a.rule == "unsupported") w.fail("differential invariant atom not supported: " + to_string(a.atom));
        for (const auto& vc : a.obligations) {
          VC copy = vc;
          copy.id.clear();
          copy.origin = em.origin + ": " + vc.origin;
          em.sink.vcs().push_back(copy);
        }
      }
      std::vector<Pred> hyps{*o.dinv};
      if (o.guard.kind() != Pred::Kind::True) hyps.push_back(o.guard);
      em.sink.emit(hyps, Q, em.origin + ": invariant and guard imply postcondition");
    } else {
      auto parts = evol_parts(prog, true);
      Pred want = flow_pre(parts.flow, parts.guard, parts.domain, Q);
      if (!equivalent_up_to_normalization(P, want))
        w.fail("precondition " + to_string(P) + " does not match the evolution precondition " + to_string(want) +
               " (insert an r-cons step)");
    }
    out = prog;
  } else if (law == "r-evll" || law == "r-evlfl") {
    w.require(true);
    auto [prog, mid] = w.parse([](TextParser& tp) {
      Program p = tp.program();
      if (!tp.accept_word("to")) throw ParseError("witness is '<evolution> to Q'", 0, 0);
      return std::pair{p, tp.pred()};
    });
    auto parts = evol_parts(prog, true);
    Pred want = flow_pre(parts.flow, parts.guard, parts.domain, mid);
    if (!equivalent_up_to_normalization(P, want))
      w.fail("precondition " + to_string(P) + " does not match the evolution precondition " + to_string(want) +
             " (insert an r-cons step)");
    out = Program::seq({prog, Program::spec(mid, Q)});
  } else if (law == "r-evlr" || law == "r-evlfr") {
    w.require(true);
    Program prog = w.parse([](TextParser& tp) { return tp.program(); });
    auto parts = evol_parts(prog, true);
    out = Program::seq({Program::spec(P, flow_pre(parts.flow, parts.guard, parts.domain, Q)), prog});
  } else {
    w.fail("unknown law");
  }

  StepResult r;
  r.term = replace_at(term, st.path, 0, out);
  r.vcs = std::move(em.sink.vcs());
  return r;
}

ReplayResult replay(const Pred& pre, const Pred& post, const Program& target, const RefinementScript& script,
                    const Scope& scope, const Pred& assumptions, const CertifyContext& ctx) {
  ReplayResult res;
  Program term = Program::spec(pre, post);
  for (const auto& st : script.steps) {
    StepResult r = apply_step(term, st, scope, assumptions, ctx);
    term = std::move(r.term);
    for (auto& vc : r.vcs) res.vcs.push_back(std::move(vc));
    res.trace.push_back(print_program(term));
  }
  for (std::size_t i = 0; i < res.vcs.size(); ++i) res.vcs[i].id = "vc" + std::to_string(i + 1);
  res.final_term = term;
  if (contains_spec(term)) throw RefinementError("residual Spec in final term: " + print_program(term), 0);
  if (term != target)
    throw RefinementError("target mismatch\n  derived: " + print_program(term) + "\n  target:  " + print_program(target), 0);
  return res;
}

} // namespace hvcg
