#pragma once

// Sequent machinery shared by the prover, the falsifier and the store
// sampler. Not installed.

#include "hvcg/expr.hpp"
#include "hvcg/interval.hpp"
#include "hvcg/poly.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hvcg::detail {

/// var := value, solved from an equality hypothesis.
struct Elimination {
  std::string var;
  Expr value;
};

/// Atom hypotheses, disjunctive hypotheses, and a goal (in NNF).
struct Problem {
  std::vector<Pred> atoms;
  std::vector<Pred> ors;
  Pred goal = Pred::falsity();
  std::vector<Elimination> eliminated;
  bool contradiction = false;
};

/// Adds a hypothesis (converted to NNF) to the problem. Conjunctions
/// are split, `after` hypotheses dropped (a sound weakening).
void assume(Problem& p, const Pred& hyp);

/// True/false for atoms without variables, parameters or time.
std::optional<bool> closed_value(const Pred& atom);

/// Repeated equality elimination and closed-atom simplification.
void simplify(Problem& p);

/// Expands an `after` goal into hypotheses 0 <= time (<= U), the guard
/// at time and at 0, and the post at time. nullopt when nested.
std::optional<Problem> expand_after(const Problem& p);

/// Box over the free symbols, restricted by the user bounds.
Box initial_box(const Problem& p, const std::map<std::string, std::pair<Rational, Rational>>& bounds);

/// HC4-style contraction with the linear hypotheses. false when the
/// box becomes empty.
bool contract(Box& box, const std::vector<Pred>& atoms);

/// Interval slot of an atom key ("x", "@p", "#time"); nullptr if absent.
Interval* slot(Box& box, const std::string& key);

/// Keys of the box dimensions in a fixed order.
std::vector<std::string> box_keys(const Box& box);

/// Uniform grid value (multiples of 2^-10) inside iv clipped to
/// [-scale, scale]; nullopt when the clipped range is empty.
std::optional<Rational> grid_sample(const Interval& iv, double scale, std::mt19937_64& rng);

/// Exact values of eliminated variables, last elimination first.
bool reconstruct(const std::vector<Elimination>& elim, ExactValues& vars, const ExactValues& params,
                 const std::optional<Rational>& time);

/// Interval truth of a predicate at a box, with `after` nodes decided
/// at a witness time when given.
Tri tri_eval(const Pred& p, const Box& box, const std::optional<Rational>& witness_time);

/// Point box of exact values.
Box point_box(const ExactValues& vars, const ExactValues& params, const std::optional<Rational>& time);

} // namespace hvcg::detail
