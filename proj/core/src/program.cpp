#include "hvcg/program.hpp"

namespace hvcg {

VectorField OdeSpec::vector_field() const {
  VectorField f;
  for (const auto& [x, e] : field) f[x] = e;
  return f;
}

bool operator==(const OdeSpec& a, const OdeSpec& b) {
  return a.field == b.field && a.guard == b.guard && a.domain == b.domain && a.solution == b.solution &&
         a.dinv == b.dinv;
}

namespace {

std::shared_ptr<ProgramNode> node(Program::Kind k) {
  auto n = std::make_shared<ProgramNode>();
  n->kind = k;
  return n;
}

const Program& skip_program() {
  static const Program p = Program::assign(StateUpdate());
  return p;
}

} // namespace

Program::Program() : node_(skip_program().node_) {}

Program Program::assign(StateUpdate update) {
  auto n = node(Kind::Assign);
  n->update = std::move(update);
  return Program(std::move(n));
}

Program Program::test(const Pred& p) {
  auto n = node(Kind::Test);
  n->pred = p;
  return Program(std::move(n));
}

Program Program::ode(OdeSpec spec) {
  auto n = node(Kind::Ode);
  n->ode = std::move(spec);
  return Program(std::move(n));
}

Program Program::evol(EvolSpec spec) {
  auto n = node(Kind::Evol);
  n->evol = std::move(spec);
  return Program(std::move(n));
}

Program Program::seq(std::vector<Program> parts) {
  std::vector<Program> flat;
  for (auto& p : parts) {
    if (p.kind() == Kind::Seq) flat.insert(flat.end(), p.children().begin(), p.children().end());
    else flat.push_back(std::move(p));
  }
  if (flat.empty()) return skip();
  if (flat.size() == 1) return flat.front();
  auto n = node(Kind::Seq);
  n->children = std::move(flat);
  return Program(std::move(n));
}

Program Program::choice(std::vector<Program> parts) {
  if (parts.size() == 1) return parts.front();
  if (parts.empty()) throw Error("empty choice");
  auto n = node(Kind::Choice);
  n->children = std::move(parts);
  return Program(std::move(n));
}

Program Program::star(const Program& body) {
  auto n = node(Kind::Star);
  n->children = {body};
  return Program(std::move(n));
}

Program Program::if_then_else(const Pred& cond, const Program& then_branch, const Program& else_branch) {
  auto n = node(Kind::If);
  n->pred = cond;
  n->children = {then_branch, else_branch};
  return Program(std::move(n));
}

Program Program::while_do(const Pred& cond, const Program& body, std::optional<Pred> inv) {
  auto n = node(Kind::While);
  n->pred = cond;
  n->children = {body};
  n->inv = std::move(inv);
  return Program(std::move(n));
}

Program Program::loop(const Program& body, const Pred& inv) {
  auto n = node(Kind::Loop);
  n->children = {body};
  n->inv = inv;
  return Program(std::move(n));
}

Program Program::spec(const Pred& pre, const Pred& post) {
  auto n = node(Kind::Spec);
  n->pre = pre;
  n->post = post;
  return Program(std::move(n));
}

Program Program::assertion(const Pred& p) {
  auto n = node(Kind::Assert);
  n->pred = p;
  return Program(std::move(n));
}

Program::Kind Program::kind() const { return node_->kind; }
bool Program::is_skip() const { return kind() == Kind::Assign && node_->update.empty(); }
const StateUpdate& Program::update() const { return node_->update; }
const Pred& Program::pred() const { return node_->pred; }
const OdeSpec& Program::ode_spec() const { return *node_->ode; }
const EvolSpec& Program::evol_spec() const { return *node_->evol; }
const std::vector<Program>& Program::children() const { return node_->children; }
const std::optional<Pred>& Program::inv() const { return node_->inv; }
const Pred& Program::pre() const { return node_->pre; }
const Pred& Program::post() const { return node_->post; }

Program Program::with_children(std::vector<Program> children) const {
  if (children.size() != node_->children.size()) throw Error("arity mismatch when rebuilding program");
  if (kind() == Kind::Seq) return seq(std::move(children));
  auto n = std::make_shared<ProgramNode>(*node_);
  n->children = std::move(children);
  return Program(std::move(n));
}

bool operator==(const Program& a, const Program& b) {
  if (a.node_ == b.node_) return true;
  const ProgramNode& x = *a.node_;
  const ProgramNode& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
  case Program::Kind::Assign: return x.update == y.update;
  case Program::Kind::Test:
  case Program::Kind::Assert: return x.pred == y.pred;
  case Program::Kind::Ode: return *x.ode == *y.ode;
  case Program::Kind::Evol: return *x.evol == *y.evol;
  case Program::Kind::Spec: return x.pre == y.pre && x.post == y.post;
  case Program::Kind::If:
  case Program::Kind::While: return x.pred == y.pred && x.inv == y.inv && x.children == y.children;
  case Program::Kind::Loop: return x.inv == y.inv && x.children == y.children;
  default: return x.children == y.children;
  }
}

Program desugar(const Program& p) {
  using K = Program::Kind;
  switch (p.kind()) {
  case K::Assign:
  case K::Test:
  case K::Ode:
  case K::Evol:
  case K::Spec: return p;
  case K::Assert: return Program::skip();
  case K::Seq:
  case K::Choice: {
    std::vector<Program> parts;
    for (const auto& c : p.children()) {
      Program d = desugar(c);
      if (p.kind() == K::Seq && d.is_skip()) continue;
      parts.push_back(d);
    }
    return p.kind() == K::Seq ? Program::seq(std::move(parts)) : Program::choice(std::move(parts));
  }
  case K::Star: return Program::star(desugar(p.children()[0]));
  case K::If:
    return Program::choice({Program::seq({Program::test(p.pred()), desugar(p.children()[0])}),
                            Program::seq({Program::test(!p.pred()), desugar(p.children()[1])})});
  case K::While:
    return Program::seq({Program::star(Program::seq({Program::test(p.pred()), desugar(p.children()[0])})),
                         Program::test(!p.pred())});
  case K::Loop: return Program::star(desugar(p.children()[0]));
  }
  return p;
}

bool contains_spec(const Program& p) {
  if (p.kind() == Program::Kind::Spec) return true;
  for (const auto& c : p.children())
    if (contains_spec(c)) return true;
  return false;
}

std::set<std::string> written_vars(const Program& p) {
  std::set<std::string> out;
  switch (p.kind()) {
  case Program::Kind::Assign:
    for (const auto& [x, e] : p.update().assignments()) out.insert(x);
    break;
  case Program::Kind::Ode:
    for (const auto& [x, e] : p.ode_spec().field) out.insert(x);
    break;
  case Program::Kind::Evol:
    for (const auto& [x, e] : p.evol_spec().flow.bindings)
      if (!(e.kind() == Expr::Kind::Var && e.name() == x)) out.insert(x);
    break;
  default:
    for (const auto& c : p.children())
      for (const auto& v : written_vars(c)) out.insert(v);
  }
  return out;
}

bool Model::declares_var(const std::string& n) const {
  for (const auto& v : vars)
    if (v == n) return true;
  return false;
}

bool Model::declares_param(const std::string& n) const {
  for (const auto& p : params)
    if (p.name == n) return true;
  return false;
}

Pred Model::assumptions() const {
  std::vector<Pred> parts;
  for (const auto& p : params)
    if (p.assume.kind() != Pred::Kind::True) parts.push_back(p.assume);
  return Pred::conj(std::move(parts));
}

} // namespace hvcg
