#include "hvcg/expr.hpp"

#include <algorithm>
#include <cmath>

namespace hvcg {

namespace {

std::shared_ptr<const ExprNode> make_node(Expr::Kind kind, std::vector<Expr> args = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

const Expr& zero_expr() {
  static const Expr zero = Expr::constant(Rational(0));
  return zero;
}

} // namespace

Expr::Expr() : node_(zero_expr().node_) {}

Expr Expr::constant(const Rational& value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Const;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::var(const std::string& name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Var;
  n->name = name;
  return Expr(std::move(n));
}

Expr Expr::param(const std::string& name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Param;
  n->name = name;
  return Expr(std::move(n));
}

Expr Expr::time() {
  static const Expr t(make_node(Kind::Time));
  return t;
}

Expr Expr::pow(const Expr& base, unsigned exponent) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Pow;
  n->exponent = exponent;
  n->args = {base};
  return Expr(std::move(n));
}

Expr Expr::exp(const Expr& arg) { return Expr(make_node(Kind::Exp, {arg})); }
Expr Expr::ln(const Expr& arg) { return Expr(make_node(Kind::Ln, {arg})); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(make_node(Expr::Kind::Add, {a, b})); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(make_node(Expr::Kind::Sub, {a, b})); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(make_node(Expr::Kind::Mul, {a, b})); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(make_node(Expr::Kind::Div, {a, b})); }
Expr operator-(const Expr& a) { return Expr(make_node(Expr::Kind::Neg, {a})); }

Expr::Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
unsigned Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return node_->args.at(0); }
const Expr& Expr::rhs() const { return node_->args.at(1); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
  case Expr::Kind::Const: return x.value == y.value;
  case Expr::Kind::Var:
  case Expr::Kind::Param: return x.name == y.name;
  case Expr::Kind::Time: return true;
  case Expr::Kind::Pow:
    if (x.exponent != y.exponent) return false;
    break;
  default: break;
  }
  return x.args == y.args;
}

Rel negate(Rel r) {
  switch (r) {
  case Rel::Eq: return Rel::Ne;
  case Rel::Ne: return Rel::Eq;
  case Rel::Lt: return Rel::Ge;
  case Rel::Le: return Rel::Gt;
  case Rel::Gt: return Rel::Le;
  case Rel::Ge: return Rel::Lt;
  }
  return r;
}

Rel swap(Rel r) {
  switch (r) {
  case Rel::Lt: return Rel::Gt;
  case Rel::Le: return Rel::Ge;
  case Rel::Gt: return Rel::Lt;
  case Rel::Ge: return Rel::Le;
  default: return r;
  }
}

const char* rel_symbol(Rel r) {
  switch (r) {
  case Rel::Eq: return "=";
  case Rel::Ne: return "!=";
  case Rel::Lt: return "<";
  case Rel::Le: return "<=";
  case Rel::Gt: return ">";
  case Rel::Ge: return ">=";
  }
  return "?";
}

bool operator==(const TimeDomain& a, const TimeDomain& b) { return a.upper == b.upper; }

const Expr* Flow::find(const std::string& var) const {
  for (const auto& [name, body] : bindings)
    if (name == var) return &body;
  return nullptr;
}

Expr Flow::at(const std::string& var) const {
  if (const Expr* e = find(var)) return *e;
  return Expr::var(var);
}

// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<PredNode> pred_node(Pred::Kind kind) {
  auto n = std::make_shared<PredNode>();
  n->kind = kind;
  return n;
}

const Pred& true_pred() {
  static const Pred t = Pred::truth();
  return t;
}

} // namespace

Pred::Pred() : node_(true_pred().node_) {}

Pred Pred::truth() {
  static const Pred t(pred_node(Kind::True));
  return t;
}

Pred Pred::falsity() {
  static const Pred f(pred_node(Kind::False));
  return f;
}

Pred Pred::atom(Rel rel, const Expr& lhs, const Expr& rhs) {
  auto n = pred_node(Kind::Atom);
  n->rel = rel;
  n->lhs = lhs;
  n->rhs = rhs;
  return Pred(std::move(n));
}

Pred Pred::negation(const Pred& p) {
  auto n = pred_node(Kind::Not);
  n->parts = {p};
  return Pred(std::move(n));
}

Pred Pred::conj(std::vector<Pred> parts) {
  if (parts.empty()) return truth();
  if (parts.size() == 1) return parts.front();
  auto n = pred_node(Kind::And);
  n->parts = std::move(parts);
  return Pred(std::move(n));
}

Pred Pred::disj(std::vector<Pred> parts) {
  if (parts.empty()) return falsity();
  if (parts.size() == 1) return parts.front();
  auto n = pred_node(Kind::Or);
  n->parts = std::move(parts);
  return Pred(std::move(n));
}

Pred Pred::implies(const Pred& a, const Pred& b) {
  auto n = pred_node(Kind::Implies);
  n->parts = {a, b};
  return Pred(std::move(n));
}

Pred Pred::after(Flow flow, const Pred& guard, TimeDomain domain, const Pred& post) {
  // Complete the flow so that every variable read by the guard or the
  // post has an explicit binding; substitution then only touches bodies.
  std::set<std::string> needed = free_vars(guard);
  for (const auto& v : free_vars(post)) needed.insert(v);
  for (const auto& v : needed)
    if (!flow.find(v)) flow.bindings.emplace_back(v, Expr::var(v));
  std::sort(flow.bindings.begin(), flow.bindings.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto n = pred_node(Kind::After);
  n->flow = std::move(flow);
  n->parts = {guard, post};
  n->domain = std::move(domain);
  return Pred(std::move(n));
}

Pred::Kind Pred::kind() const { return node_->kind; }
Rel Pred::rel() const { return node_->rel; }
const Expr& Pred::lhs() const { return node_->lhs; }
const Expr& Pred::rhs() const { return node_->rhs; }
const std::vector<Pred>& Pred::parts() const { return node_->parts; }
const Flow& Pred::flow() const { return node_->flow; }
const Pred& Pred::guard() const { return node_->parts.at(0); }
const TimeDomain& Pred::domain() const { return node_->domain; }
const Pred& Pred::post() const { return node_->parts.at(1); }

bool operator==(const Pred& a, const Pred& b) {
  if (a.node_ == b.node_) return true;
  const PredNode& x = *a.node_;
  const PredNode& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
  case Pred::Kind::True:
  case Pred::Kind::False: return true;
  case Pred::Kind::Atom: return x.rel == y.rel && x.lhs == y.lhs && x.rhs == y.rhs;
  case Pred::Kind::After:
    return x.flow == y.flow && x.domain == y.domain && x.parts == y.parts;
  default: return x.parts == y.parts;
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double lookup(const Values* map, const std::string& name, const char* what) {
  if (map) {
    auto it = map->find(name);
    if (it != map->end()) return it->second;
  }
  throw EvalError(EvalError::Kind::Unbound, std::string("unbound ") + what + " '" + name + "'");
}

bool compare(Rel rel, double a, double b) {
  switch (rel) {
  case Rel::Eq: return a == b;
  case Rel::Ne: return a != b;
  case Rel::Lt: return a < b;
  case Rel::Le: return a <= b;
  case Rel::Gt: return a > b;
  case Rel::Ge: return a >= b;
  }
  return false;
}

template <typename T>
bool compare_exact(Rel rel, const T& a, const T& b) {
  switch (rel) {
  case Rel::Eq: return a == b;
  case Rel::Ne: return a != b;
  case Rel::Lt: return a < b;
  case Rel::Le: return a <= b;
  case Rel::Gt: return a > b;
  case Rel::Ge: return a >= b;
  }
  return false;
}

} // namespace

double eval(const Expr& e, const Valuation& v) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: return to_double(e.value());
  case K::Var: return lookup(v.vars, e.name(), "variable");
  case K::Param: return lookup(v.params, e.name(), "parameter");
  case K::Time: return v.time;
  case K::Add: return eval(e.lhs(), v) + eval(e.rhs(), v);
  case K::Sub: return eval(e.lhs(), v) - eval(e.rhs(), v);
  case K::Mul: return eval(e.lhs(), v) * eval(e.rhs(), v);
  case K::Div: {
    double d = eval(e.rhs(), v);
    if (d == 0.0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero in " + to_string(e));
    return eval(e.lhs(), v) / d;
  }
  case K::Neg: return -eval(e.arg(), v);
  case K::Pow: return std::pow(eval(e.lhs(), v), static_cast<double>(e.exponent()));
  case K::Exp: {
    double r = std::exp(eval(e.arg(), v));
    if (!std::isfinite(r)) throw EvalError(EvalError::Kind::Overflow, "overflow in " + to_string(e));
    return r;
  }
  case K::Ln: {
    double a = eval(e.arg(), v);
    if (!(a > 0.0)) throw EvalError(EvalError::Kind::LnDomain, "ln of non-positive value in " + to_string(e));
    return std::log(a);
  }
  }
  return 0.0;
}

bool eval(const Pred& p, const Valuation& v) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: return true;
  case K::False: return false;
  case K::Atom: return compare(p.rel(), eval(p.lhs(), v), eval(p.rhs(), v));
  case K::Not: return !eval(p.parts()[0], v);
  case K::And:
    for (const auto& q : p.parts())
      if (!eval(q, v)) return false;
    return true;
  case K::Or:
    for (const auto& q : p.parts())
      if (eval(q, v)) return true;
    return false;
  case K::Implies: return !eval(p.parts()[0], v) || eval(p.parts()[1], v);
  case K::After:
    throw EvalError(EvalError::Kind::Unsupported, "cannot evaluate quantified evolution formula");
  }
  return false;
}

std::optional<Rational> eval_exact(const Expr& e, const ExactValues& vars, const ExactValues& params,
                                   const std::optional<Rational>& time) {
  using K = Expr::Kind;
  auto find = [](const ExactValues& m, const std::string& n, const char* what) -> Rational {
    auto it = m.find(n);
    if (it == m.end())
      throw EvalError(EvalError::Kind::Unbound, std::string("unbound ") + what + " '" + n + "'");
    return it->second;
  };
  switch (e.kind()) {
  case K::Const: return e.value();
  case K::Var: return find(vars, e.name(), "variable");
  case K::Param: return find(params, e.name(), "parameter");
  case K::Time:
    if (!time) throw EvalError(EvalError::Kind::Unbound, "unbound time symbol");
    return *time;
  case K::Add:
  case K::Sub:
  case K::Mul:
  case K::Div: {
    auto a = eval_exact(e.lhs(), vars, params, time);
    auto b = eval_exact(e.rhs(), vars, params, time);
    if (!a || !b) return std::nullopt;
    if (e.kind() == K::Add) return *a + *b;
    if (e.kind() == K::Sub) return *a - *b;
    if (e.kind() == K::Mul) return *a * *b;
    if (*b == 0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero in " + to_string(e));
    return *a / *b;
  }
  case K::Neg: {
    auto a = eval_exact(e.arg(), vars, params, time);
    if (!a) return std::nullopt;
    return Rational(-*a);
  }
  case K::Pow: {
    auto a = eval_exact(e.lhs(), vars, params, time);
    if (!a) return std::nullopt;
    Rational r = 1;
    for (unsigned i = 0; i < e.exponent(); ++i) r *= *a;
    return r;
  }
  case K::Exp: {
    auto a = eval_exact(e.arg(), vars, params, time);
    if (a && *a == 0) return Rational(1);
    return std::nullopt;
  }
  case K::Ln: {
    auto a = eval_exact(e.arg(), vars, params, time);
    if (a && *a <= 0) throw EvalError(EvalError::Kind::LnDomain, "ln of non-positive value in " + to_string(e));
    if (a && *a == 1) return Rational(0);
    return std::nullopt;
  }
  }
  return std::nullopt;
}

std::optional<bool> eval_exact(const Pred& p, const ExactValues& vars, const ExactValues& params,
                               const std::optional<Rational>& time) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: return true;
  case K::False: return false;
  case K::Atom: {
    auto a = eval_exact(p.lhs(), vars, params, time);
    auto b = eval_exact(p.rhs(), vars, params, time);
    if (!a || !b) return std::nullopt;
    return compare_exact(p.rel(), *a, *b);
  }
  case K::Not: {
    auto r = eval_exact(p.parts()[0], vars, params, time);
    if (!r) return std::nullopt;
    return !*r;
  }
  case K::And:
  case K::Or: {
    bool is_and = p.kind() == K::And;
    bool unknown = false;
    for (const auto& q : p.parts()) {
      auto r = eval_exact(q, vars, params, time);
      if (!r) unknown = true;
      else if (*r != is_and) return !is_and;
    }
    if (unknown) return std::nullopt;
    return is_and;
  }
  case K::Implies: {
    auto a = eval_exact(p.parts()[0], vars, params, time);
    if (a && !*a) return true;
    auto b = eval_exact(p.parts()[1], vars, params, time);
    if (b && *b) return true;
    if (a && b) return false;
    return std::nullopt;
  }
  case K::After: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Substitution

Expr substitute(const Expr& e, const Substitution& s) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: return e;
  case K::Var: {
    auto it = s.vars.find(e.name());
    return it == s.vars.end() ? e : it->second;
  }
  case K::Param: {
    auto it = s.params.find(e.name());
    return it == s.params.end() ? e : it->second;
  }
  case K::Time: return s.time ? *s.time : e;
  case K::Add: return substitute(e.lhs(), s) + substitute(e.rhs(), s);
  case K::Sub: return substitute(e.lhs(), s) - substitute(e.rhs(), s);
  case K::Mul: return substitute(e.lhs(), s) * substitute(e.rhs(), s);
  case K::Div: return substitute(e.lhs(), s) / substitute(e.rhs(), s);
  case K::Neg: return -substitute(e.arg(), s);
  case K::Pow: return Expr::pow(substitute(e.lhs(), s), e.exponent());
  case K::Exp: return Expr::exp(substitute(e.arg(), s));
  case K::Ln: return Expr::ln(substitute(e.arg(), s));
  }
  return e;
}

Pred substitute(const Pred& p, const Substitution& s) {
  using K = Pred::Kind;
  if (s.empty()) return p;
  switch (p.kind()) {
  case K::True:
  case K::False: return p;
  case K::Atom: return Pred::atom(p.rel(), substitute(p.lhs(), s), substitute(p.rhs(), s));
  case K::Not: return Pred::negation(substitute(p.parts()[0], s));
  case K::And:
  case K::Or: {
    std::vector<Pred> parts;
    parts.reserve(p.parts().size());
    for (const auto& q : p.parts()) parts.push_back(substitute(q, s));
    return p.kind() == K::And ? Pred::conj(std::move(parts)) : Pred::disj(std::move(parts));
  }
  case K::Implies: return Pred::implies(substitute(p.parts()[0], s), substitute(p.parts()[1], s));
  case K::After: {
    Substitution inner = s;
    inner.time.reset();
    Flow flow;
    for (const auto& [var, body] : p.flow().bindings) flow.bindings.emplace_back(var, substitute(body, inner));
    Substitution params_only;
    params_only.params = s.params;
    TimeDomain dom = p.domain();
    if (dom.upper) dom.upper = substitute(*dom.upper, params_only);
    return Pred::after(std::move(flow), substitute(p.guard(), params_only), std::move(dom),
                       substitute(p.post(), params_only));
  }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Queries

namespace {

void collect(const Expr& e, Expr::Kind kind, std::set<std::string>& out) {
  if (e.kind() == kind) {
    out.insert(e.name());
    return;
  }
  switch (e.kind()) {
  case Expr::Kind::Const:
  case Expr::Kind::Var:
  case Expr::Kind::Param:
  case Expr::Kind::Time: return;
  case Expr::Kind::Add:
  case Expr::Kind::Sub:
  case Expr::Kind::Mul:
  case Expr::Kind::Div:
    collect(e.lhs(), kind, out);
    collect(e.rhs(), kind, out);
    return;
  default: collect(e.arg(), kind, out);
  }
}

void collect(const Pred& p, Expr::Kind kind, std::set<std::string>& out) {
  switch (p.kind()) {
  case Pred::Kind::True:
  case Pred::Kind::False: return;
  case Pred::Kind::Atom:
    collect(p.lhs(), kind, out);
    collect(p.rhs(), kind, out);
    return;
  case Pred::Kind::After:
    // guard/post variables refer to flow states; bodies carry the free ones
    for (const auto& [var, body] : p.flow().bindings) collect(body, kind, out);
    if (kind == Expr::Kind::Param) {
      collect(p.guard(), kind, out);
      collect(p.post(), kind, out);
      if (p.domain().upper) collect(*p.domain().upper, kind, out);
    }
    return;
  default:
    for (const auto& q : p.parts()) collect(q, kind, out);
  }
}

} // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect(e, Expr::Kind::Var, out);
  return out;
}

std::set<std::string> free_vars(const Pred& p) {
  std::set<std::string> out;
  collect(p, Expr::Kind::Var, out);
  return out;
}

std::set<std::string> free_params(const Expr& e) {
  std::set<std::string> out;
  collect(e, Expr::Kind::Param, out);
  return out;
}

std::set<std::string> free_params(const Pred& p) {
  std::set<std::string> out;
  collect(p, Expr::Kind::Param, out);
  return out;
}

bool mentions_time(const Expr& e) {
  switch (e.kind()) {
  case Expr::Kind::Time: return true;
  case Expr::Kind::Const:
  case Expr::Kind::Var:
  case Expr::Kind::Param: return false;
  case Expr::Kind::Add:
  case Expr::Kind::Sub:
  case Expr::Kind::Mul:
  case Expr::Kind::Div: return mentions_time(e.lhs()) || mentions_time(e.rhs());
  default: return mentions_time(e.arg());
  }
}

bool contains_after(const Pred& p) {
  if (p.kind() == Pred::Kind::After) return true;
  if (p.kind() == Pred::Kind::Atom) return false;
  for (const auto& q : p.parts())
    if (contains_after(q)) return true;
  return false;
}

bool not_depends(const std::string& var, const Expr& e) { return free_vars(e).count(var) == 0; }
bool not_depends(const std::string& var, const Pred& p) { return free_vars(p).count(var) == 0; }

namespace {

Pred nnf_signed(const Pred& p, bool positive) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: return positive ? p : Pred::falsity();
  case K::False: return positive ? p : Pred::truth();
  case K::Atom: return positive ? p : Pred::atom(negate(p.rel()), p.lhs(), p.rhs());
  case K::Not: return nnf_signed(p.parts()[0], !positive);
  case K::And:
  case K::Or: {
    std::vector<Pred> parts;
    for (const auto& q : p.parts()) parts.push_back(nnf_signed(q, positive));
    bool conj = (p.kind() == K::And) == positive;
    return conj ? Pred::conj(std::move(parts)) : Pred::disj(std::move(parts));
  }
  case K::Implies: {
    // a -> b  ==  !a | b
    Pred a = nnf_signed(p.parts()[0], !positive);
    Pred b = nnf_signed(p.parts()[1], positive);
    return positive ? Pred::disj({a, b}) : Pred::conj({a, b});
  }
  case K::After: return positive ? p : Pred::negation(p);
  }
  return p;
}

void flatten_into(const Pred& p, std::vector<Pred>& out) {
  if (p.kind() == Pred::Kind::And) {
    for (const auto& q : p.parts()) flatten_into(q, out);
  } else if (p.kind() != Pred::Kind::True) {
    out.push_back(p);
  }
}

} // namespace

Pred nnf(const Pred& p) { return nnf_signed(p, true); }

std::vector<Pred> conjuncts(const Pred& p) {
  std::vector<Pred> out;
  flatten_into(p, out);
  return out;
}

} // namespace hvcg
