#include "hvcg/parser.hpp"

#include <ostream>
#include <sstream>

namespace hvcg {

namespace {

// Expression precedence: 1 additive, 2 multiplicative, 3 negation,
// 4 power, 5 atomic.
int const_prec(const Rational& v) {
  if (v < 0) return 3;
  std::string s = format_rational(v);
  return s.find('/') != std::string::npos ? 2 : 5;
}

int prec(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: return const_prec(e.value());
  case K::Add:
  case K::Sub: return 1;
  case K::Mul:
  case K::Div: return 2;
  case K::Neg: return 3;
  case K::Pow: return 4;
  default: return 5;
  }
}

void print(std::ostream& os, const Expr& e);

void print_wrapped(std::ostream& os, const Expr& e, bool wrap) {
  if (wrap) os << "(";
  print(os, e);
  if (wrap) os << ")";
}

void print(std::ostream& os, const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: os << format_rational(e.value()); return;
  case K::Var:
  case K::Param: os << e.name(); return;
  case K::Time: os << kTimeSymbol; return;
  case K::Add:
  case K::Sub:
  case K::Mul:
  case K::Div: {
    int p = prec(e);
    bool wrap_left = prec(e.lhs()) < p;
    // literal/literal would be folded back into one constant
    if (e.kind() == K::Div && e.lhs().is_const() && e.rhs().is_const()) wrap_left = true;
    print_wrapped(os, e.lhs(), wrap_left);
    const char* op = e.kind() == K::Add ? " + " : e.kind() == K::Sub ? " - " : e.kind() == K::Mul ? " * " : " / ";
    os << op;
    print_wrapped(os, e.rhs(), prec(e.rhs()) <= p);
    return;
  }
  case K::Neg:
    os << "-";
    print_wrapped(os, e.arg(), prec(e.arg()) <= 3 || e.arg().is_const());
    return;
  case K::Pow:
    print_wrapped(os, e.lhs(), prec(e.lhs()) < 5);
    os << "^" << e.exponent();
    return;
  case K::Exp:
  case K::Ln:
    os << (e.kind() == K::Exp ? "exp(" : "ln(");
    print(os, e.arg());
    os << ")";
    return;
  }
}

// Predicate precedence: 1 implication, 2 disjunction, 3 conjunction,
// 4 negation, 5 atomic.
int prec(const Pred& p) {
  switch (p.kind()) {
  case Pred::Kind::Implies: return 1;
  case Pred::Kind::Or: return 2;
  case Pred::Kind::And: return 3;
  case Pred::Kind::Not: return 4;
  default: return 5;
  }
}

void print(std::ostream& os, const Pred& p);

void print_wrapped(std::ostream& os, const Pred& p, bool wrap) {
  if (wrap) os << "(";
  print(os, p);
  if (wrap) os << ")";
}

void print_domain(std::ostream& os, const TimeDomain& d) {
  os << "[0, ";
  if (d.upper) print(os, *d.upper);
  else os << "inf";
  os << "]";
}

void print_flow(std::ostream& os, const Flow& f) {
  os << "{";
  for (std::size_t i = 0; i < f.bindings.size(); ++i) {
    if (i) os << ", ";
    os << f.bindings[i].first << " := ";
    print(os, f.bindings[i].second);
  }
  os << "}";
}

void print(std::ostream& os, const Pred& p) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: os << "true"; return;
  case K::False: os << "false"; return;
  case K::Atom:
    print(os, p.lhs());
    os << " " << rel_symbol(p.rel()) << " ";
    print(os, p.rhs());
    return;
  case K::Not:
    os << "!";
    print_wrapped(os, p.parts()[0], prec(p.parts()[0]) < 4);
    return;
  case K::And:
  case K::Or: {
    int pr = prec(p);
    const char* sep = p.kind() == K::And ? " & " : " | ";
    for (std::size_t i = 0; i < p.parts().size(); ++i) {
      if (i) os << sep;
      print_wrapped(os, p.parts()[i], prec(p.parts()[i]) <= pr);
    }
    return;
  }
  case K::Implies:
    print_wrapped(os, p.parts()[0], prec(p.parts()[0]) <= 1);
    os << " -> ";
    print_wrapped(os, p.parts()[1], prec(p.parts()[1]) < 1);
    return;
  case K::After:
    os << "after(";
    print_flow(os, p.flow());
    os << " & ";
    print(os, p.guard());
    os << " on ";
    print_domain(os, p.domain());
    os << ", ";
    print(os, p.post());
    os << ")";
    return;
  }
}

// Program precedence: 1 choice, 2 sequence, 3 star, 4 unit.
int prec(const Program& p) {
  switch (p.kind()) {
  case Program::Kind::Choice: return 1;
  case Program::Kind::Seq: return 2;
  case Program::Kind::Star: return 3;
  default: return 4;
  }
}

void print(std::ostream& os, const Program& p);

void print_wrapped(std::ostream& os, const Program& p, bool wrap) {
  if (wrap) os << "(";
  print(os, p);
  if (wrap) os << ")";
}

void print_update(std::ostream& os, const StateUpdate& u) {
  if (u.empty()) {
    os << "skip";
    return;
  }
  const auto& a = u.assignments();
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? ", " : "") << a[i].first;
  os << " := ";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ", ";
    print(os, a[i].second);
  }
}

void print(std::ostream& os, const Program& p) {
  using K = Program::Kind;
  switch (p.kind()) {
  case K::Assign: print_update(os, p.update()); return;
  case K::Test:
    os << "? ";
    print(os, p.pred());
    return;
  case K::Assert:
    os << "assert ";
    print(os, p.pred());
    return;
  case K::Spec:
    os << "[";
    print(os, p.pre());
    os << ", ";
    print(os, p.post());
    os << "]";
    return;
  case K::Ode: {
    const OdeSpec& s = p.ode_spec();
    os << "{";
    for (std::size_t i = 0; i < s.field.size(); ++i) {
      if (i) os << ", ";
      os << s.field[i].first << "' = ";
      print(os, s.field[i].second);
    }
    if (s.guard.kind() != Pred::Kind::True) {
      os << " & ";
      print(os, s.guard);
    }
    os << " on ";
    print_domain(os, s.domain);
    os << "}";
    if (s.solution) {
      os << " solution ";
      print_flow(os, *s.solution);
    }
    if (s.dinv) {
      os << " dinv ";
      print(os, *s.dinv);
    }
    return;
  }
  case K::Evol: {
    const EvolSpec& s = p.evol_spec();
    os << "evol ";
    print_flow(os, s.flow);
    if (s.guard.kind() != Pred::Kind::True) {
      os << " & ";
      print(os, s.guard);
    }
    os << " on ";
    print_domain(os, s.domain);
    return;
  }
  case K::Seq:
  case K::Choice: {
    int pr = prec(p);
    const char* sep = p.kind() == K::Seq ? " ; " : " ++ ";
    for (std::size_t i = 0; i < p.children().size(); ++i) {
      if (i) os << sep;
      print_wrapped(os, p.children()[i], prec(p.children()[i]) <= pr);
    }
    return;
  }
  case K::Star:
    print_wrapped(os, p.children()[0], true);
    os << "*";
    return;
  case K::If:
    os << "if ";
    print(os, p.pred());
    os << " then ";
    print_wrapped(os, p.children()[0], prec(p.children()[0]) < 3);
    os << " else ";
    print_wrapped(os, p.children()[1], prec(p.children()[1]) < 3);
    return;
  case K::While:
    os << "while ";
    print(os, p.pred());
    if (p.inv()) {
      os << " inv ";
      print(os, *p.inv());
    }
    os << " do ";
    print_wrapped(os, p.children()[0], prec(p.children()[0]) < 3);
    return;
  case K::Loop:
    os << "loop ";
    print_wrapped(os, p.children()[0], prec(p.children()[0]) < 3);
    os << " inv ";
    print(os, *p.inv());
    return;
  }
}

} // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::string to_string(const Pred& p) {
  std::ostringstream os;
  print(os, p);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
  print(os, e);
  return os;
}

std::ostream& operator<<(std::ostream& os, const Pred& p) {
  print(os, p);
  return os;
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  print(os, p);
  return os.str();
}

std::string print_update(const StateUpdate& u) {
  std::ostringstream os;
  print_update(os, u);
  return os.str();
}

std::string print_model(const Model& m) {
  std::ostringstream os;
  if (!m.vars.empty()) {
    os << "var ";
    for (std::size_t i = 0; i < m.vars.size(); ++i) os << (i ? ", " : "") << m.vars[i];
    os << " : real\n";
  }
  for (const auto& p : m.params) {
    os << "param " << p.name << " : real";
    if (p.assume.kind() != Pred::Kind::True) os << " assume " << p.assume;
    os << "\n";
  }
  if (!m.instance.empty()) {
    os << "instance ";
    bool first = true;
    for (const auto& [n, v] : m.instance) {
      os << (first ? "" : ", ") << n << " = " << format_rational(v);
      first = false;
    }
    os << "\n";
  }
  for (const auto& [n, b] : m.bounds)
    os << "bounds " << n << " in [" << format_rational(b.first) << ", " << format_rational(b.second) << "]\n";
  if (m.budget) os << "budget " << *m.budget << "\n";
  if (m.hoare) {
    os << "hoare { " << m.hoare->pre << " }\n  " << print_program(m.hoare->program) << "\n{ " << m.hoare->post
       << " }\n";
  }
  if (m.refine) {
    os << "refine [" << m.refine->pre << ", " << m.refine->post << "]\n  to " << print_program(m.refine->target)
       << "\n  by " << m.refine->script_path << "\n";
  }
  return os.str();
}

} // namespace hvcg
