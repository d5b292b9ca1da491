#pragma once

#include "hvcg/expr.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hvcg {

/// Named real-valued program state over a fixed set of declared variables.
class Store {
public:
  Store() = default;
  explicit Store(std::vector<std::string> declared);
  Store(std::vector<std::string> declared, const Values& values);

  const std::vector<std::string>& declared() const { return declared_; }
  const Values& values() const { return values_; }
  bool declares(const std::string& var) const;

  double get(const std::string& var) const;
  Store put(const std::string& var, double value) const;

  friend bool operator==(const Store& a, const Store& b) { return a.values_ == b.values_; }
  friend bool operator!=(const Store& a, const Store& b) { return !(a == b); }

private:
  std::vector<std::string> declared_;
  Values values_;
};

/// The get/put pair for one named variable.
class Lens {
public:
  explicit Lens(std::string var) : var_(std::move(var)) {}
  const std::string& var() const { return var_; }
  double get(const Store& s) const { return s.get(var_); }
  Store put(const Store& s, double v) const { return s.put(var_, v); }

private:
  std::string var_;
};

/// Distinct variables are independent lenses in the named model.
bool independent(const Lens& x, const Lens& y);

/// id(x1 -> e1)...(xn -> en). Every ei is read in the state the update is
/// applied to; a later write to the same variable supersedes an earlier one.
class StateUpdate {
public:
  StateUpdate() = default;
  explicit StateUpdate(std::vector<std::pair<std::string, Expr>> assignments);

  /// Update equivalent to running x1 := e1; ...; xn := en in order. Each
  /// expression is pre-substituted with the writes before it.
  static StateUpdate sequential(const std::vector<std::pair<std::string, Expr>>& steps);

  const std::vector<std::pair<std::string, Expr>>& assignments() const { return assignments_; }
  bool empty() const { return assignments_.empty(); }

  /// The effective expression written to each variable (last write wins).
  Substitution as_substitution() const;

  friend bool operator==(const StateUpdate& a, const StateUpdate& b) {
    return a.assignments_ == b.assignments_;
  }

private:
  std::vector<std::pair<std::string, Expr>> assignments_;
};

Store update_apply(const StateUpdate& sigma, const Store& s, const Values& params = {});

/// sigma † e: evaluating the result in s equals evaluating e in sigma(s).
Expr subst_update(const StateUpdate& sigma, const Expr& e);
Pred subst_update(const StateUpdate& sigma, const Pred& p);

using Transformer = std::function<std::vector<Store>(const Store&)>;

/// The deterministic transformer s -> {sigma(s)}.
Transformer assign_transformer(const StateUpdate& sigma, Values params = {});

} // namespace hvcg
