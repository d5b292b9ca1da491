#include "hvcg/discharge.hpp"

#include "hvcg/poly.hpp"
#include "reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hvcg {

const char* to_string(ProofStatus s) {
  switch (s) {
  case ProofStatus::Proved: return "proved";
  case ProofStatus::Falsified: return "falsified";
  case ProofStatus::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

using detail::Problem;

struct Ctx {
  explicit Ctx(const ProverConfig& c) : config(c) {}
  const ProverConfig& config;
  long long splits = 0;
  bool used_interval = false;
  std::string reason;
};

Problem instantiate(const VC& vc, const ProverConfig& config) {
  Substitution s;
  for (const auto& [k, v] : config.instance) s.params[k] = Expr::constant(v);
  Problem p;
  for (const auto& h : vc.hypotheses) detail::assume(p, s.empty() ? h : substitute(h, s));
  p.goal = nnf(s.empty() ? vc.goal : substitute(vc.goal, s));
  return p;
}

// k·ln(R) + rest >= 0 gives a bound on R through exp.
void derive_exp(Problem& p) {
  std::vector<Pred> extra;
  for (const auto& a : p.atoms) {
    Rel rel = a.rel();
    if (rel == Rel::Eq || rel == Rel::Ne) continue;
    RatFunc n = normalize(a.lhs() - a.rhs());
    if (!n.den.is_constant()) continue;
    Poly e = (rel == Rel::Le || rel == Rel::Lt) ? -n.num : n.num;
    if (n.den.constant_value() < 0) e = -e;
    bool strict = rel == Rel::Lt || rel == Rel::Gt;
    for (const auto& [key, atom] : e.atoms()) {
      if (key.rfind("ln(", 0) != 0 || e.degree_in(key) != 1) continue;
      auto split = e.linear_split(key);
      if (!split || !split->first.is_constant()) continue;
      Rational k = split->first.constant_value();
      Expr bound = Expr::exp(split->second.scaled(Rational(-1) / k).to_expr());
      const Expr& r = atom.arg();
      if (k < 0) extra.push_back(Pred::atom(strict ? Rel::Lt : Rel::Le, r, bound));
      else extra.push_back(Pred::atom(strict ? Rel::Gt : Rel::Ge, r, bound));
      extra.push_back(Pred::atom(Rel::Gt, r, Expr::constant(0)));
    }
  }
  for (auto& x : extra) p.atoms.push_back(std::move(x));
}

// e >= 0, e > 0, or e = 0.
struct Oriented {
  Poly e;
  bool strict = false;
  bool eq = false;
};

std::optional<Oriented> orient(const Pred& atom, const Box& root) {
  if (atom.rel() == Rel::Ne) return std::nullopt;
  RatFunc n = normalize(atom.lhs() - atom.rhs());
  int sign;
  if (n.den.is_constant()) {
    sign = n.den.constant_value() > 0 ? 1 : -1;
  } else {
    auto d = eval_interval(n.den.to_expr(), root);
    if (!d) return std::nullopt;
    if (d->lo > 0) sign = 1;
    else if (d->hi < 0) sign = -1;
    else return std::nullopt;
  }
  Rel r = sign > 0 ? atom.rel() : swap(atom.rel());
  switch (r) {
  case Rel::Eq: return Oriented{n.num, false, true};
  case Rel::Ge: return Oriented{n.num, false, false};
  case Rel::Gt: return Oriented{n.num, true, false};
  case Rel::Le: return Oriented{-n.num, false, false};
  case Rel::Lt: return Oriented{-n.num, true, false};
  default: return std::nullopt;
  }
}

// Ratio of the highest common non-constant monomial coefficients.
std::optional<Rational> lead_ratio(const Poly& g, const Poly& h) {
  for (auto it = g.terms().rbegin(); it != g.terms().rend(); ++it) {
    if (it->first.empty()) continue;
    auto jt = h.terms().find(it->first);
    if (jt != h.terms().end()) return it->second / jt->second;
  }
  return std::nullopt;
}

bool defined_on(const Pred& atom, const Box& box) {
  return eval_interval(atom.lhs(), box).has_value() && eval_interval(atom.rhs(), box).has_value();
}

// Expression that must be certainly >= 0 (or > 0) for the goal to hold.
struct GoalCheck {
  Expr e;
  bool strict;
};

struct HypCheck {
  Pred atom;
  std::optional<Expr> oriented;
  bool strict = false;
  bool eq = false;
};

bool certainly(const Expr& e, bool strict, const Box& box) {
  auto v = eval_interval(e, box);
  if (!v) return false;
  return strict ? v->lo > 0 : v->lo >= 0;
}

bool hyp_false(const HypCheck& h, const Box& box) {
  if (eval_interval(h.atom, box) == Tri::False) return true;
  if (!h.oriented) return false;
  auto v = eval_interval(*h.oriented, box);
  if (!v) return false;
  if (h.eq) return v->lo > 0 || v->hi < 0;
  return h.strict ? v->hi <= 0 : v->hi < 0;
}

bool branch_and_bound(const Problem& p, Box root, Ctx& ctx, long long budget) {
  const bool goal_atom = p.goal.kind() == Pred::Kind::Atom;
  auto g = goal_atom ? orient(p.goal, root) : std::nullopt;

  std::vector<HypCheck> hyps;
  std::vector<Oriented> hyp_forms;
  for (const auto& a : p.atoms) {
    HypCheck h{a, std::nullopt};
    if (auto o = orient(a, root)) {
      h.oriented = o->e.to_expr();
      h.strict = o->strict;
      h.eq = o->eq;
      hyp_forms.push_back(*o);
    }
    hyps.push_back(std::move(h));
  }

  std::vector<GoalCheck> checks;
  if (g && !g->eq) {
    checks.push_back({g->e.to_expr(), g->strict});
    for (const auto& h : hyp_forms) {
      std::vector<Rational> cs;
      if (!h.eq) cs.push_back(1);
      if (auto c = lead_ratio(g->e, h.e); c && (h.eq || *c > 0)) cs.push_back(*c);
      for (const auto& c : cs) {
        bool strict = g->strict && !(h.strict && !h.eq);
        checks.push_back({(g->e - h.e.scaled(c)).to_expr(), strict});
      }
    }
  }

  auto goal_true = [&](const Box& box) {
    if (!goal_atom) return false;
    if (eval_interval(p.goal, box) == Tri::True) return true;
    if (!defined_on(p.goal, box)) return false;
    for (const auto& c : checks)
      if (certainly(c.e, c.strict, box)) return true;
    return false;
  };

  std::vector<Box> stack{std::move(root)};
  long long local = 0;
  while (!stack.empty()) {
    Box box = std::move(stack.back());
    stack.pop_back();
    if (!detail::contract(box, p.atoms)) continue;
    bool pruned = false;
    for (const auto& h : hyps)
      if (hyp_false(h, box)) {
        pruned = true;
        break;
      }
    if (pruned || goal_true(box)) continue;

    if (goal_atom || p.goal.kind() == Pred::Kind::False) {
      bool all_hyps = std::all_of(hyps.begin(), hyps.end(),
                                  [&](const HypCheck& h) { return eval_interval(h.atom, box) == Tri::True; });
      Tri gv = goal_atom ? eval_interval(p.goal, box) : Tri::False;
      if (all_hyps && p.ors.empty() && gv == Tri::False) {
        ctx.reason = "goal fails on a box where all hypotheses hold";
        return false;
      }
    }

    std::string best;
    double width = -1;
    for (const auto& key : detail::box_keys(box)) {
      double w = detail::slot(box, key)->width();
      if (w > width) {
        width = w;
        best = key;
      }
    }
    if (best.empty() || width < 1e-9) {
      ctx.reason = "box too small to split further";
      return false;
    }
    if (local >= budget || ctx.splits >= ctx.config.budget) {
      ctx.reason = "split budget exhausted";
      return false;
    }
    ++local;
    ++ctx.splits;
    ctx.used_interval = true;
    Interval iv = *detail::slot(box, best);
    double mid = iv.mid();
    Box a = box, b = std::move(box);
    detail::slot(a, best)->hi = mid;
    detail::slot(b, best)->lo = mid;
    stack.push_back(std::move(b));
    stack.push_back(std::move(a));
  }
  return true;
}

bool prove_atomic(Problem p, Ctx& ctx, long long budget) {
  if (p.goal.kind() != Pred::Kind::Atom && p.goal.kind() != Pred::Kind::False) {
    ctx.reason = "unsupported goal form";
    return false;
  }
  derive_exp(p);
  if (p.goal.kind() == Pred::Kind::Atom && p.goal.rel() == Rel::Eq &&
      normalize(p.goal.lhs() - p.goal.rhs()).is_zero())
    return true;

  Box root = detail::initial_box(p, ctx.config.bounds);
  if (!detail::contract(root, p.atoms)) {
    ctx.used_interval = true;
    return true;
  }

  if (p.goal.kind() == Pred::Kind::Atom && defined_on(p.goal, root)) {
    if (auto g = orient(p.goal, root)) {
      for (const auto& a : p.atoms) {
        auto h = orient(a, root);
        if (!h) continue;
        if (g->eq) {
          if (h->eq && (Poly::ratio(g->e, h->e) || Poly::ratio(g->e, -h->e))) return true;
          continue;
        }
        if (h->eq) {
          if (!g->strict && (Poly::ratio(g->e, h->e) || Poly::ratio(g->e, -h->e))) return true;
          continue;
        }
        if (Poly::ratio(g->e, h->e) && (!g->strict || h->strict)) return true;
      }
    }
  }
  bool ok = branch_and_bound(p, std::move(root), ctx, budget);
  if (ok) ctx.used_interval = true;
  return ok;
}

bool prove_problem(Problem p, Ctx& ctx, int depth, long long budget) {
  detail::simplify(p);
  if (p.contradiction) return true;
  using K = Pred::Kind;
  switch (p.goal.kind()) {
  case K::True: return true;
  case K::And:
    for (const auto& part : p.goal.parts()) {
      Problem q = p;
      q.goal = part;
      if (!prove_problem(std::move(q), ctx, depth, budget)) return false;
    }
    return true;
  case K::Implies: {
    Problem q = p;
    detail::assume(q, p.goal.parts()[0]);
    q.goal = nnf(p.goal.parts()[1]);
    return prove_problem(std::move(q), ctx, depth, budget);
  }
  case K::After: {
    auto q = detail::expand_after(p);
    if (!q) {
      ctx.reason = "nested evolution goal";
      return false;
    }
    return prove_problem(std::move(*q), ctx, depth, budget);
  }
  case K::Not:
    ctx.reason = "negated evolution goal";
    return false;
  case K::Or: {
    const auto& ds = p.goal.parts();
    // cheap attempts on single disjuncts, then the classical step
    for (const auto& d : ds) {
      Problem q = p;
      q.goal = d;
      Ctx trial(ctx.config);
      trial.splits = ctx.splits;
      if (prove_problem(std::move(q), trial, depth, std::min<long long>(budget, 200))) {
        ctx.splits = trial.splits;
        ctx.used_interval = ctx.used_interval || trial.used_interval;
        return true;
      }
      ctx.splits = trial.splits;
    }
    Problem q = p;
    for (std::size_t i = 0; i + 1 < ds.size(); ++i) detail::assume(q, nnf(Pred::negation(ds[i])));
    q.goal = ds.back();
    return prove_problem(std::move(q), ctx, depth, budget);
  }
  case K::Atom:
  case K::False: break;
  }
  if (!p.ors.empty() && depth < 12) {
    Pred o = p.ors.front();
    for (const auto& d : o.parts()) {
      Problem q = p;
      q.ors.erase(q.ors.begin());
      detail::assume(q, d);
      if (!prove_problem(std::move(q), ctx, depth + 1, budget)) return false;
    }
    return true;
  }
  return prove_atomic(std::move(p), ctx, budget);
}

// Leaves for the falsifier: goal decomposed, disjunctive hypotheses split.
void sampling_leaves(Problem p, std::vector<Problem>& out, int depth) {
  detail::simplify(p);
  if (p.contradiction) return;
  using K = Pred::Kind;
  switch (p.goal.kind()) {
  case K::True:
  case K::Not: return;
  case K::And:
    for (const auto& part : p.goal.parts()) {
      Problem q = p;
      q.goal = part;
      sampling_leaves(std::move(q), out, depth);
    }
    return;
  case K::Implies: {
    Problem q = p;
    detail::assume(q, p.goal.parts()[0]);
    q.goal = nnf(p.goal.parts()[1]);
    sampling_leaves(std::move(q), out, depth);
    return;
  }
  case K::After: {
    if (auto q = detail::expand_after(p)) sampling_leaves(std::move(*q), out, depth);
    return;
  }
  default: break;
  }
  if (!p.ors.empty() && depth < 6) {
    Pred o = p.ors.front();
    for (const auto& d : o.parts()) {
      Problem q = p;
      q.ors.erase(q.ors.begin());
      detail::assume(q, d);
      sampling_leaves(std::move(q), out, depth + 1);
    }
    return;
  }
  out.push_back(std::move(p));
}

void collect_vars(const Pred& p, std::set<std::string>& out) {
  for (const auto& v : free_vars(p)) out.insert(v);
  if (p.kind() == Pred::Kind::After) {
    for (const auto& v : free_vars(p.guard())) out.insert(v);
    for (const auto& v : free_vars(p.post())) out.insert(v);
  } else if (p.kind() != Pred::Kind::Atom) {
    for (const auto& q : p.parts()) collect_vars(q, out);
  }
}

} // namespace

ProofResult prove(const VC& vc, const ProverConfig& config) {
  ProofResult r;
  if (vc.is_certificate) {
    r.method = "certificate";
    r.status = vc.certificate_ok ? ProofStatus::Proved : ProofStatus::Unknown;
    r.detail = vc.certificate_detail;
    return r;
  }
  Ctx ctx(config);
  bool ok = prove_problem(instantiate(vc, config), ctx, 0, config.budget);
  r.splits = ctx.splits;
  if (ok) {
    r.status = ProofStatus::Proved;
    r.method = ctx.used_interval ? "interval" : "ring";
  } else {
    r.detail = ctx.reason.empty() ? "no proof found" : ctx.reason;
  }
  return r;
}

bool check_counterexample(const VC& vc, const Counterexample& cex, const ProverConfig& config) {
  if (vc.is_certificate) return false;
  ExactValues params = config.instance;
  for (const auto& [k, v] : cex.params) params[k] = v;
  Box box = detail::point_box(cex.vars, params, std::nullopt);
  for (const auto& h : vc.hypotheses)
    if (detail::tri_eval(h, box, cex.time) != Tri::True) return false;
  return detail::tri_eval(vc.goal, box, cex.time) == Tri::False;
}

ProofResult falsify(const VC& vc, const ProverConfig& config) {
  ProofResult r;
  r.method = "sampling";
  if (vc.is_certificate) {
    r.detail = "certificate obligations are not sampled";
    return r;
  }
  std::vector<Problem> leaves;
  sampling_leaves(instantiate(vc, config), leaves, 0);
  std::set<std::string> all_vars;
  for (const auto& h : vc.hypotheses) collect_vars(h, all_vars);
  collect_vars(vc.goal, all_vars);

  std::mt19937_64 rng(config.seed);
  const double scales[] = {1.0, 10.0, 1000.0};
  int per_leaf = leaves.empty() ? 0 : std::max(200, config.samples / static_cast<int>(leaves.size()));
  long long tried = 0;
  for (const auto& leaf : leaves) {
    Box box = detail::initial_box(leaf, config.bounds);
    if (!detail::contract(box, leaf.atoms)) continue;
    auto keys = detail::box_keys(box);
    for (int i = 0; i < per_leaf; ++i) {
      ++tried;
      double scale = scales[std::uniform_int_distribution<int>(0, 2)(rng)];
      ExactValues vars, params;
      std::optional<Rational> time;
      bool ok = true;
      for (const auto& key : keys) {
        const Interval& iv = *detail::slot(box, key);
        auto v = detail::grid_sample(iv, scale, rng);
        if (!v) v = detail::grid_sample(iv, 1000.0, rng);
        if (!v && std::isfinite(iv.lo)) v = from_double(iv.lo);
        if (!v) {
          ok = false;
          break;
        }
        if (key == atom_key_time()) time = *v;
        else if (key[0] == '@') params[key.substr(1)] = *v;
        else vars[key] = *v;
      }
      if (!ok) continue;
      ExactValues all_params = config.instance;
      for (const auto& [k, v] : params) all_params[k] = v;
      if (!detail::reconstruct(leaf.eliminated, vars, all_params, time)) continue;

      Box pt = detail::point_box(vars, all_params, time);
      bool hyps = std::all_of(leaf.atoms.begin(), leaf.atoms.end(),
                              [&](const Pred& a) { return eval_interval(a, pt) == Tri::True; }) &&
                  std::all_of(leaf.ors.begin(), leaf.ors.end(),
                              [&](const Pred& o) { return detail::tri_eval(o, pt, std::nullopt) == Tri::True; });
      if (!hyps || detail::tri_eval(leaf.goal, pt, std::nullopt) != Tri::False) continue;

      for (const auto& v : all_vars)
        if (!vars.count(v)) vars[v] = 0;
      Counterexample cex{vars, params, time};
      if (check_counterexample(vc, cex, config)) {
        r.status = ProofStatus::Falsified;
        r.witness = std::move(cex);
        r.detail = "counterexample found after " + std::to_string(tried) + " samples";
        return r;
      }
    }
  }
  r.detail = "no counterexample in " + std::to_string(tried) + " samples";
  return r;
}

ProofResult discharge(const VC& vc, const ProverConfig& config) {
  ProofResult p = prove(vc, config);
  if (p.status == ProofStatus::Proved || vc.is_certificate) return p;
  ProofResult f = falsify(vc, config);
  if (f.status == ProofStatus::Falsified) {
    f.splits = p.splits;
    return f;
  }
  p.detail += "; " + f.detail;
  return p;
}

} // namespace hvcg
