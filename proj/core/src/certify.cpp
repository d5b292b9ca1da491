#include "hvcg/certify.hpp"

#include "hvcg/discharge.hpp"
#include "hvcg/poly.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace hvcg {

const char* to_string(MatchStatus s) {
  switch (s) {
  case MatchStatus::Symbolic: return "symbolic";
  case MatchStatus::Numeric: return "numeric";
  case MatchStatus::Failed: return "failed";
  }
  return "?";
}

const char* to_string(LipschitzStatus s) {
  switch (s) {
  case LipschitzStatus::SymbolicAffine: return "symbolic-affine";
  case LipschitzStatus::NumericSampled: return "numeric-sampled";
  case LipschitzStatus::Unchecked: return "unchecked";
  }
  return "?";
}

std::string FlowCertificate::summary() const {
  std::ostringstream os;
  os << "derivative-match " << to_string(derivative) << ", initial-condition "
     << (initial_condition ? "passed" : "failed") << ", lipschitz " << to_string(lipschitz);
  if (lipschitz_constant) os << " (L = " << *lipschitz_constant << ")";
  else if (lipschitz_value) os << " (L = " << *lipschitz_value << ")";
  return os.str();
}

int parameter_sign(const std::string& name, const Pred& assumptions, const std::map<std::string, Rational>& instance) {
  for (const auto& c : conjuncts(assumptions)) {
    if (c.kind() != Pred::Kind::Atom) continue;
    Rel r = c.rel();
    Expr l = c.lhs(), rr = c.rhs();
    // orient as  param REL constant
    if (rr.kind() == Expr::Kind::Param && rr.name() == name && l.is_const()) {
      std::swap(l, rr);
      r = swap(r);
    }
    if (!(l.kind() == Expr::Kind::Param && l.name() == name && rr.is_const())) continue;
    const Rational& v = rr.value();
    if ((r == Rel::Gt || r == Rel::Ge) && v >= 0) return 1;
    if ((r == Rel::Lt || r == Rel::Le) && v <= 0) return -1;
    if (r == Rel::Eq) return v > 0 ? 1 : v < 0 ? -1 : 0;
  }
  auto it = instance.find(name);
  if (it != instance.end()) return it->second > 0 ? 1 : it->second < 0 ? -1 : 0;
  return 0;
}

namespace {

// |coef| for a coefficient polynomial over parameters, or nullopt when
// its sign cannot be settled.
std::optional<Poly> abs_coefficient(const Poly& coef, const CertifyContext& ctx) {
  if (coef.is_zero()) return coef;
  if (coef.is_constant()) return Poly::constant(abs(coef.constant_value()));
  if (coef.terms().size() == 1) {
    const auto& [mono, c] = *coef.terms().begin();
    int sign = c > 0 ? 1 : -1;
    for (const auto& [key, e] : mono) {
      if (key.empty() || key[0] != '@') return std::nullopt;
      if (e % 2 == 0) continue;
      int s = parameter_sign(key.substr(1), ctx.assumptions, ctx.instance);
      if (s == 0) return std::nullopt;
      sign *= s;
    }
    return sign > 0 ? coef : -coef;
  }
  // several terms: fall back to the sign at the instance
  ExactValues params(ctx.instance.begin(), ctx.instance.end());
  auto v = eval_exact(coef.to_expr(), {}, params);
  if (!v) return std::nullopt;
  return *v >= 0 ? coef : -coef;
}

bool is_state_key(const std::string& key) {
  return !key.empty() && key[0] != '@' && key[0] != '#' && key.find('(') == std::string::npos;
}

double eval_at_instance(const Expr& e, const CertifyContext& ctx) {
  ExactValues params(ctx.instance.begin(), ctx.instance.end());
  try {
    auto v = eval_exact(e, {}, params);
    if (!v) return std::nan("");
    return to_double(*v);
  } catch (const EvalError&) {
    return std::nan("");  // parameter without an instance value
  }
}

void lipschitz_affine(FlowCertificate& cert, const VectorField& f, const CertifyContext& ctx) {
  std::set<std::string> state;
  for (const auto& [x, e] : f) {
    state.insert(x);
    for (const auto& v : free_vars(e)) state.insert(v);
  }
  std::vector<Poly> rows;
  for (const auto& [x, e] : f) {
    auto p = poly_normalize(e);
    if (!p || p->mentions(atom_key_time())) return;
    Poly row;
    Poly rest = *p;
    for (const auto& y : state) {
      auto split = rest.linear_split(atom_key_var(y));
      if (!split) return;
      auto [coef, r] = *split;
      for (const auto& [mono, c] : coef.terms())
        for (const auto& [key, e2] : mono)
          if (is_state_key(key)) return;  // not affine
      auto a = abs_coefficient(coef, ctx);
      if (!a) {
        cert.notes.push_back("coefficient sign of " + y + " in " + x + "' undetermined");
        return;
      }
      row = row + *a;
      rest = r;
    }
    rows.push_back(row);
  }
  // L is the largest row sum (induced infinity norm)
  std::vector<Poly> distinct;
  for (const auto& r : rows) {
    if (r.is_zero()) continue;
    if (std::find(distinct.begin(), distinct.end(), r) == distinct.end()) distinct.push_back(r);
  }
  cert.lipschitz = LipschitzStatus::SymbolicAffine;
  if (distinct.empty()) {
    cert.lipschitz_constant = Expr::constant(0);
    cert.lipschitz_value = 0.0;
    return;
  }
  std::size_t best = 0;
  double best_value = eval_at_instance(distinct[0].to_expr(), ctx);
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    double v = eval_at_instance(distinct[i].to_expr(), ctx);
    if (std::isnan(v) || std::isnan(best_value)) {
      cert.notes.push_back("several row sums without instance values; reporting the first");
      break;
    }
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  if (distinct.size() > 1) cert.notes.push_back("L chosen as the largest row sum at the instance");
  cert.lipschitz_constant = distinct[best].to_expr();
  if (!std::isnan(best_value)) cert.lipschitz_value = best_value;
}

Values param_values(const CertifyContext& ctx, const std::set<std::string>& names, std::mt19937_64& rng) {
  Values out;
  std::uniform_real_distribution<double> fallback(0.5, 2.0);
  for (const auto& n : names) {
    auto it = ctx.instance.find(n);
    out[n] = it != ctx.instance.end() ? to_double(it->second) : fallback(rng);
  }
  return out;
}

void lipschitz_sampled(FlowCertificate& cert, const VectorField& f, const CertifyContext& ctx) {
  if (ctx.lipschitz_box.empty()) return;
  std::mt19937_64 rng(ctx.seed);
  std::set<std::string> pnames;
  for (const auto& [x, e] : f)
    for (const auto& p : free_params(e)) pnames.insert(p);
  Values params = param_values(ctx, pnames, rng);
  double L = 0.0;
  int valid = 0;
  for (int i = 0; i < ctx.numeric_points; ++i) {
    Values a, b;
    for (const auto& [n, iv] : ctx.lipschitz_box) {
      std::uniform_real_distribution<double> d(iv.first, iv.second);
      a[n] = d(rng);
      b[n] = d(rng);
    }
    try {
      double num = 0.0, den = 0.0;
      for (const auto& [x, e] : f) num = std::max(num, std::abs(eval(e, {&a, &params, 0.0}) - eval(e, {&b, &params, 0.0})));
      for (const auto& [n, v] : a) den = std::max(den, std::abs(v - b[n]));
      if (den > 0) {
        L = std::max(L, num / den);
        ++valid;
      }
    } catch (const EvalError&) {
    }
  }
  if (valid == 0) return;
  cert.lipschitz = LipschitzStatus::NumericSampled;
  cert.lipschitz_value = L;
}

bool numerically_equal(const Expr& a, const Expr& b, const TimeDomain& U, const CertifyContext& ctx) {
  std::mt19937_64 rng(ctx.seed);
  std::set<std::string> vars = free_vars(a), pnames = free_params(a);
  for (const auto& v : free_vars(b)) vars.insert(v);
  for (const auto& p : free_params(b)) pnames.insert(p);
  Values params = param_values(ctx, pnames, rng);
  double tmax = 10.0;
  if (U.upper) {
    try {
      Values none;
      double u = eval(*U.upper, {&none, &params, 0.0});
      if (u >= 0) tmax = std::min(tmax, u);
    } catch (const EvalError&) {
    }
  }
  std::uniform_real_distribution<double> dv(-10.0, 10.0), dt(0.0, tmax);
  int valid = 0;
  for (int i = 0; i < ctx.numeric_points; ++i) {
    Values vals;
    for (const auto& v : vars) vals[v] = dv(rng);
    double t = dt(rng);
    try {
      double x = eval(a, {&vals, &params, t});
      double y = eval(b, {&vals, &params, t});
      double scale = std::max({1.0, std::abs(x), std::abs(y)});
      if (std::abs(x - y) > 1e-9 * scale) return false;
      ++valid;
    } catch (const EvalError&) {
    }
  }
  return valid * 2 >= ctx.numeric_points;
}

} // namespace

FlowCertificate certify_flow(const VectorField& f, const Flow& phi, const TimeDomain& U, const CertifyContext& ctx) {
  FlowCertificate cert;
  cert.field = f;
  cert.flow = phi;
  cert.domain = U;

  std::set<std::string> vars;
  for (const auto& [x, e] : f) vars.insert(x);
  for (const auto& [x, e] : phi.bindings) vars.insert(x);

  Substitution along;
  for (const auto& [x, e] : phi.bindings) along.vars[x] = e;

  MatchStatus match = MatchStatus::Symbolic;
  for (const auto& x : vars) {
    Expr lhs = differentiate_time(phi.at(x));
    auto it = f.find(x);
    Expr rhs = it == f.end() ? Expr::constant(0) : substitute(it->second, along);
    if (normalize(lhs - rhs).is_zero()) continue;
    if (numerically_equal(lhs, rhs, U, ctx)) {
      match = MatchStatus::Numeric;
      cert.notes.push_back("derivative of " + x + " matched numerically");
      continue;
    }
    match = MatchStatus::Failed;
    cert.notes.push_back("derivative of " + x + " does not match the field");
    break;
  }
  cert.derivative = match;

  Substitution at0;
  at0.time = Expr::constant(0);
  cert.initial_condition = true;
  for (const auto& [x, e] : phi.bindings) {
    if (!normalize(substitute(e, at0) - Expr::var(x)).is_zero()) {
      cert.initial_condition = false;
      cert.notes.push_back("flow of " + x + " at time 0 is not the identity");
    }
  }

  lipschitz_affine(cert, f, ctx);
  if (cert.lipschitz == LipschitzStatus::Unchecked) lipschitz_sampled(cert, f, ctx);
  return cert;
}

AtomObligation atom_obligations(const Pred& atom, const VectorField& f, const std::vector<Pred>& hyps,
                                TimeDirection dir) {
  AtomObligation out;
  out.atom = atom;
  auto make = [&](Rel rel, const Expr& a, const Expr& b) {
    VC vc;
    vc.hypotheses = hyps;
    vc.goal = Pred::atom(rel, a, b);
    return vc;
  };
  switch (atom.kind()) {
  case Pred::Kind::True:
  case Pred::Kind::False:
    out.rule = "trivial";
    out.resolution = "proved";
    return out;
  case Pred::Kind::Atom: break;
  default:
    out.rule = "unsupported";
    out.resolution = "unsupported";
    return out;
  }
  Expr mu = lie_derivative(atom.lhs(), f);
  Expr nu = lie_derivative(atom.rhs(), f);
  // forward: d(mu) <= d(nu) keeps mu < nu; backward time flips it
  Rel le = dir == TimeDirection::Forward ? Rel::Le : Rel::Ge;
  switch (atom.rel()) {
  case Rel::Eq:
    out.rule = "eq";
    out.obligations.push_back(make(Rel::Eq, mu, nu));
    break;
  case Rel::Lt:
  case Rel::Le:
    out.rule = atom.rel() == Rel::Lt ? "less" : "leq";
    out.obligations.push_back(make(le, mu, nu));
    break;
  case Rel::Gt:
  case Rel::Ge:
    out.rule = atom.rel() == Rel::Gt ? "less" : "leq";
    out.obligations.push_back(make(le, nu, mu));
    break;
  case Rel::Ne:
    // both strict orders must be invariant
    out.rule = "neq";
    out.obligations.push_back(make(le, mu, nu));
    out.obligations.push_back(make(le, nu, mu));
    break;
  }
  return out;
}

namespace {

void collect(const Pred& p, const VectorField& f, const std::vector<Pred>& hyps, std::vector<AtomObligation>& out) {
  if (p.kind() == Pred::Kind::And || p.kind() == Pred::Kind::Or) {
    for (const auto& q : p.parts()) collect(q, f, hyps, out);
    return;
  }
  out.push_back(atom_obligations(p, f, hyps));
}

} // namespace

std::vector<AtomObligation> dinv_obligations(const Pred& I, const VectorField& f, const Pred& G,
                                             const CertifyContext& ctx) {
  std::vector<Pred> hyps;
  if (ctx.assumptions.kind() != Pred::Kind::True) hyps.push_back(ctx.assumptions);
  if (ctx.guard_hypothesis && G.kind() != Pred::Kind::True) hyps.push_back(G);
  std::vector<AtomObligation> out;
  collect(nnf(I), f, hyps, out);
  int n = 0;
  for (auto& a : out)
    for (auto& vc : a.obligations) {
      vc.id = "d" + std::to_string(++n);
      vc.origin = "dinv " + a.rule + ": " + to_string(a.atom);
    }
  return out;
}

InvariantCertificate diff_invariant(const Pred& I, const VectorField& f, const Pred& G, const TimeDomain&,
                                    const CertifyContext& ctx) {
  InvariantCertificate cert;
  cert.candidate = nnf(I);
  cert.atoms = dinv_obligations(I, f, G, ctx);
  ProverConfig pc;
  pc.instance = ctx.instance;
  pc.seed = ctx.seed;
  cert.valid = true;
  for (auto& a : cert.atoms) {
    if (a.resolution == "unsupported") {
      cert.valid = false;
      continue;
    }
    if (a.resolution == "proved") continue;
    bool all = true;
    for (const auto& vc : a.obligations)
      if (prove(vc, pc).status != ProofStatus::Proved) all = false;
    a.resolution = all ? "proved" : "unresolved";
    if (!all) cert.valid = false;
  }
  return cert;
}

} // namespace hvcg
