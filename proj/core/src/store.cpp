#include "hvcg/store.hpp"

#include <algorithm>

namespace hvcg {

Store::Store(std::vector<std::string> declared) : declared_(std::move(declared)) {
  for (const auto& v : declared_) values_[v] = 0.0;
}

Store::Store(std::vector<std::string> declared, const Values& values) : Store(std::move(declared)) {
  for (const auto& [k, v] : values) {
    if (!declares(k)) throw EvalError(EvalError::Kind::Unbound, "undeclared variable '" + k + "'");
    values_[k] = v;
  }
}

bool Store::declares(const std::string& var) const {
  return std::find(declared_.begin(), declared_.end(), var) != declared_.end();
}

double Store::get(const std::string& var) const {
  auto it = values_.find(var);
  if (it == values_.end()) throw EvalError(EvalError::Kind::Unbound, "undeclared variable '" + var + "'");
  return it->second;
}

Store Store::put(const std::string& var, double value) const {
  if (!declares(var)) throw EvalError(EvalError::Kind::Unbound, "undeclared variable '" + var + "'");
  Store r = *this;
  r.values_[var] = value;
  return r;
}

bool independent(const Lens& x, const Lens& y) { return x.var() != y.var(); }

StateUpdate::StateUpdate(std::vector<std::pair<std::string, Expr>> assignments)
    : assignments_(std::move(assignments)) {}

StateUpdate StateUpdate::sequential(const std::vector<std::pair<std::string, Expr>>& steps) {
  Substitution sofar;
  std::vector<std::pair<std::string, Expr>> out;
  for (const auto& [x, e] : steps) {
    Expr pre = substitute(e, sofar);
    out.emplace_back(x, pre);
    sofar.vars[x] = pre;
  }
  return StateUpdate(std::move(out));
}

Substitution StateUpdate::as_substitution() const {
  Substitution s;
  for (const auto& [x, e] : assignments_) s.vars[x] = e;
  return s;
}

Store update_apply(const StateUpdate& sigma, const Store& s, const Values& params) {
  Valuation val{&s.values(), &params, 0.0};
  Store r = s;
  for (const auto& [x, e] : sigma.assignments()) r = r.put(x, eval(e, val));
  return r;
}

Expr subst_update(const StateUpdate& sigma, const Expr& e) { return substitute(e, sigma.as_substitution()); }

Pred subst_update(const StateUpdate& sigma, const Pred& p) { return substitute(p, sigma.as_substitution()); }

Transformer assign_transformer(const StateUpdate& sigma, Values params) {
  return [sigma, params = std::move(params)](const Store& s) {
    return std::vector<Store>{update_apply(sigma, s, params)};
  };
}

} // namespace hvcg
