#include "reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace hvcg::detail {

namespace {

bool is_var_key(const std::string& k) {
  return !k.empty() && k[0] != '@' && k[0] != '#' && k.find('(') == std::string::npos;
}

bool closed(const Expr& e) { return free_vars(e).empty() && free_params(e).empty() && !mentions_time(e); }

bool pred_mentions_time(const Pred& p) {
  switch (p.kind()) {
  case Pred::Kind::True:
  case Pred::Kind::False: return false;
  case Pred::Kind::Atom: return mentions_time(p.lhs()) || mentions_time(p.rhs());
  case Pred::Kind::After: return false;  // bound
  default:
    for (const auto& q : p.parts())
      if (pred_mentions_time(q)) return true;
    return false;
  }
}

Pred fold(const Pred& p) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::Atom: {
    auto v = closed_value(p);
    if (!v) return p;
    return *v ? Pred::truth() : Pred::falsity();
  }
  case K::Not: {
    Pred q = fold(p.parts()[0]);
    if (q.kind() == K::True) return Pred::falsity();
    if (q.kind() == K::False) return Pred::truth();
    return Pred::negation(q);
  }
  case K::And:
  case K::Or: {
    bool is_and = p.kind() == K::And;
    std::vector<Pred> keep;
    for (const auto& q : p.parts()) {
      Pred f = fold(q);
      if (f.kind() == (is_and ? K::False : K::True)) return f;
      if (f.kind() == (is_and ? K::True : K::False)) continue;
      keep.push_back(f);
    }
    if (keep.empty()) return is_and ? Pred::truth() : Pred::falsity();
    if (keep.size() == 1) return keep[0];
    return is_and ? Pred::conj(std::move(keep)) : Pred::disj(std::move(keep));
  }
  case K::Implies: {
    Pred a = fold(p.parts()[0]);
    Pred b = fold(p.parts()[1]);
    if (a.kind() == K::False || b.kind() == K::True) return Pred::truth();
    if (a.kind() == K::True) return b;
    return Pred::implies(a, b);
  }
  default: return p;
  }
}

struct Candidate {
  std::size_t index;
  std::string var;
  Expr value;
};

std::optional<Candidate> find_elimination(const std::vector<Pred>& atoms) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Pred& a = atoms[i];
    if (a.rel() != Rel::Eq) continue;
    auto p = poly_normalize(a.lhs() - a.rhs());
    if (!p) continue;
    std::optional<Candidate> best;
    for (const auto& [key, e] : p->atoms()) {
      if (!is_var_key(key) || p->degree_in(key) != 1) continue;
      auto split = p->linear_split(key);
      if (!split || !split->first.is_constant()) continue;
      Rational c = split->first.constant_value();
      if (c == 0) continue;
      if (!best || key > best->var) best = Candidate{i, key, split->second.scaled(Rational(-1) / c).to_expr()};
    }
    if (best) return best;
  }
  return std::nullopt;
}

} // namespace

void assume(Problem& p, const Pred& hyp) {
  Pred h = nnf(hyp);
  switch (h.kind()) {
  case Pred::Kind::True: return;
  case Pred::Kind::False: p.contradiction = true; return;
  case Pred::Kind::Atom: p.atoms.push_back(h); return;
  case Pred::Kind::And:
    for (const auto& q : h.parts()) assume(p, q);
    return;
  case Pred::Kind::Or: p.ors.push_back(h); return;
  default: return;
  }
}

std::optional<bool> closed_value(const Pred& atom) {
  if (atom.kind() != Pred::Kind::Atom || !closed(atom.lhs()) || !closed(atom.rhs())) return std::nullopt;
  try {
    if (auto v = eval_exact(atom, {}, {})) return v;
  } catch (const Error&) {
    return false;  // undefined atoms are false
  }
  Tri t = eval_interval(atom, Box{});
  if (t == Tri::True) return true;
  if (t == Tri::False) return false;
  return std::nullopt;
}

void simplify(Problem& p) {
  for (int round = 0; round < 1000 && !p.contradiction; ++round) {
    std::vector<Pred> atoms;
    for (const auto& a : p.atoms) {
      auto v = closed_value(a);
      if (!v) atoms.push_back(a);
      else if (!*v) {
        p.contradiction = true;
        return;
      }
    }
    p.atoms = std::move(atoms);

    std::vector<Pred> ors = std::move(p.ors);
    p.ors.clear();
    for (const auto& o : ors) assume(p, fold(o));
    if (p.contradiction) return;
    p.goal = fold(p.goal);

    auto cand = find_elimination(p.atoms);
    if (!cand) {
      // assume() may have added new atoms from collapsed disjunctions
      bool changed = false;
      for (const auto& a : p.atoms)
        if (closed_value(a)) changed = true;
      if (!changed) return;
      continue;
    }
    Substitution s;
    s.vars[cand->var] = cand->value;
    std::vector<Pred> rest;
    for (std::size_t i = 0; i < p.atoms.size(); ++i)
      if (i != cand->index) rest.push_back(substitute(p.atoms[i], s));
    p.atoms = std::move(rest);
    for (auto& o : p.ors) o = substitute(o, s);
    p.goal = substitute(p.goal, s);
    p.eliminated.push_back({cand->var, cand->value});
  }
}

std::optional<Problem> expand_after(const Problem& p) {
  const Pred& a = p.goal;
  if (a.kind() != Pred::Kind::After) return std::nullopt;
  if (contains_after(a.guard()) || contains_after(a.post())) return std::nullopt;
  Substitution along;
  for (const auto& [x, e] : a.flow().bindings) along.vars[x] = e;
  Pred g_t = substitute(a.guard(), along);
  Pred q_t = substitute(a.post(), along);
  Substitution at0;
  at0.time = Expr::constant(0);
  Pred g_0 = substitute(g_t, at0);

  Problem q = p;
  q.goal = nnf(q_t);
  assume(q, Pred::atom(Rel::Le, Expr::constant(0), Expr::time()));
  if (a.domain().upper) assume(q, Pred::atom(Rel::Le, Expr::time(), *a.domain().upper));
  assume(q, g_0);
  assume(q, g_t);
  return q;
}

Box initial_box(const Problem& p, const std::map<std::string, std::pair<Rational, Rational>>& bounds) {
  std::set<std::string> vars, params;
  bool time = pred_mentions_time(p.goal);
  auto scan = [&](const Pred& q) {
    for (const auto& v : free_vars(q)) vars.insert(v);
    for (const auto& v : free_params(q)) params.insert(v);
    time = time || pred_mentions_time(q);
  };
  for (const auto& a : p.atoms) scan(a);
  for (const auto& o : p.ors) scan(o);
  scan(p.goal);

  auto make = [&](const std::string& name) {
    auto it = bounds.find(name);
    if (it == bounds.end()) return Interval::entire();
    Interval lo = Interval::enclose(it->second.first);
    Interval hi = Interval::enclose(it->second.second);
    return Interval{lo.lo, hi.hi};
  };
  Box box;
  for (const auto& v : vars) box.vars[v] = make(v);
  for (const auto& v : params) box.params[v] = make(v);
  if (time) box.time = Interval{0.0, std::numeric_limits<double>::infinity()};
  return box;
}

Interval* slot(Box& box, const std::string& key) {
  if (key == atom_key_time()) return box.time ? &*box.time : nullptr;
  if (!key.empty() && key[0] == '@') {
    auto it = box.params.find(key.substr(1));
    return it == box.params.end() ? nullptr : &it->second;
  }
  auto it = box.vars.find(key);
  return it == box.vars.end() ? nullptr : &it->second;
}

std::vector<std::string> box_keys(const Box& box) {
  std::vector<std::string> keys;
  for (const auto& [v, iv] : box.vars) keys.push_back(v);
  for (const auto& [v, iv] : box.params) keys.push_back("@" + v);
  if (box.time) keys.push_back(atom_key_time());
  return keys;
}

namespace {

struct Linear {
  Poly poly;
  Rel rel;
};

bool linear(const Poly& p) {
  if (p.has_transcendental()) return false;
  for (const auto& [m, c] : p.terms()) {
    unsigned d = 0;
    for (const auto& [k, e] : m) d += e;
    if (d > 1) return false;
  }
  return true;
}

bool tighten(Interval& x, Rel rel, const Interval& bound) {
  const double eps = 1e-12;
  bool changed = false;
  if ((rel == Rel::Le || rel == Rel::Lt || rel == Rel::Eq) && bound.hi < x.hi) {
    if (x.hi - bound.hi > eps * (1.0 + std::fabs(bound.hi))) changed = true;
    x.hi = bound.hi;
  }
  if ((rel == Rel::Ge || rel == Rel::Gt || rel == Rel::Eq) && bound.lo > x.lo) {
    if (bound.lo - x.lo > eps * (1.0 + std::fabs(bound.lo))) changed = true;
    x.lo = bound.lo;
  }
  return changed;
}

} // namespace

bool contract(Box& box, const std::vector<Pred>& atoms) {
  std::vector<Linear> lin;
  for (const auto& a : atoms) {
    if (a.rel() == Rel::Ne) continue;
    auto p = poly_normalize(a.lhs() - a.rhs());
    if (p && !p->is_constant() && linear(*p)) lin.push_back({*p, a.rel()});
  }
  if (lin.empty()) return true;
  for (int round = 0; round < 30; ++round) {
    bool changed = false;
    for (const auto& l : lin) {
      for (const auto& [m, a] : l.poly.terms()) {
        if (m.empty()) continue;
        const std::string& key = m.begin()->first;
        Interval* x = slot(box, key);
        if (!x) continue;
        Interval rest = Interval::point(0.0);
        bool ok = true;
        for (const auto& [m2, c2] : l.poly.terms()) {
          if (m2 == m) continue;
          if (m2.empty()) {
            rest = rest + Interval::enclose(c2);
            continue;
          }
          Interval* y = slot(box, m2.begin()->first);
          if (!y) {
            ok = false;
            break;
          }
          rest = rest + Interval::enclose(c2) * *y;
        }
        if (!ok || std::isnan(rest.lo) || std::isnan(rest.hi)) continue;
        auto bound = divide(-rest, Interval::enclose(a));
        if (!bound || std::isnan(bound->lo) || std::isnan(bound->hi)) continue;
        Rel rel = a > 0 ? l.rel : swap(l.rel);
        if (tighten(*x, rel, *bound)) changed = true;
        if (x->lo > x->hi) return false;
      }
    }
    if (!changed) break;
  }
  return true;
}

std::optional<Rational> grid_sample(const Interval& iv, double scale, std::mt19937_64& rng) {
  double lo = std::max(iv.lo, -scale);
  double hi = std::min(iv.hi, scale);
  if (!(lo <= hi)) return std::nullopt;
  const double q = 1024.0;
  double klo = std::ceil(lo * q);
  double khi = std::floor(hi * q);
  if (klo > khi) return from_double(lo);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  double k;
  if (r < 0.1) k = klo;
  else if (r < 0.2) k = khi;
  else {
    std::uniform_int_distribution<long long> pick(static_cast<long long>(klo), static_cast<long long>(khi));
    k = static_cast<double>(pick(rng));
  }
  return Rational(static_cast<long long>(k)) / 1024;
}

bool reconstruct(const std::vector<Elimination>& elim, ExactValues& vars, const ExactValues& params,
                 const std::optional<Rational>& time) {
  for (auto it = elim.rbegin(); it != elim.rend(); ++it) {
    try {
      auto v = eval_exact(it->value, vars, params, time);
      if (!v) return false;
      vars[it->var] = *v;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

Box point_box(const ExactValues& vars, const ExactValues& params, const std::optional<Rational>& time) {
  Box b;
  for (const auto& [k, v] : vars) b.vars[k] = Interval::enclose(v);
  for (const auto& [k, v] : params) b.params[k] = Interval::enclose(v);
  if (time) b.time = Interval::enclose(*time);
  return b;
}

namespace {

bool history_holds(const Pred& g, Box box, double lo, double hi, int depth) {
  box.time = Interval{lo, hi};
  Tri t = tri_eval(g, box, std::nullopt);
  if (t == Tri::True) return true;
  if (t == Tri::False || depth >= 10) return false;
  double mid = lo + (hi - lo) / 2.0;
  return history_holds(g, box, lo, mid, depth + 1) && history_holds(g, box, mid, hi, depth + 1);
}

} // namespace

Tri tri_eval(const Pred& p, const Box& box, const std::optional<Rational>& witness_time) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: return Tri::True;
  case K::False: return Tri::False;
  case K::Atom: return eval_interval(p, box);
  case K::Not: return tri_not(tri_eval(p.parts()[0], box, witness_time));
  case K::And: {
    Tri r = Tri::True;
    for (const auto& q : p.parts()) r = tri_and(r, tri_eval(q, box, witness_time));
    return r;
  }
  case K::Or: {
    Tri r = Tri::False;
    for (const auto& q : p.parts()) r = tri_or(r, tri_eval(q, box, witness_time));
    return r;
  }
  case K::Implies:
    return tri_or(tri_not(tri_eval(p.parts()[0], box, witness_time)), tri_eval(p.parts()[1], box, witness_time));
  case K::After: {
    if (!witness_time || *witness_time < 0) return Tri::Unknown;
    Interval t = Interval::enclose(*witness_time);
    if (p.domain().upper) {
      auto u = eval_interval(*p.domain().upper, box);
      if (!u || compare(Rel::Ge, *u, t) != Tri::True) return Tri::Unknown;
    }
    Substitution along;
    for (const auto& [x, e] : p.flow().bindings) along.vars[x] = e;
    Pred g = substitute(p.guard(), along);
    Pred q = substitute(p.post(), along);
    if (!history_holds(g, box, 0.0, t.hi, 0)) return Tri::Unknown;
    Box at = box;
    at.time = t;
    return tri_eval(q, at, std::nullopt) == Tri::False ? Tri::False : Tri::Unknown;
  }
  }
  return Tri::Unknown;
}

} // namespace hvcg::detail
