#pragma once

#include "hvcg/calculus.hpp"
#include "hvcg/expr.hpp"
#include "hvcg/store.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hvcg {

/// x' = f & G on U, optionally annotated with a closed-form solution
/// (flow certificate candidate) or a differential invariant.
struct OdeSpec {
  std::vector<std::pair<std::string, Expr>> field;  // in source order
  Pred guard;
  TimeDomain domain;
  std::optional<Flow> solution;
  std::optional<Pred> dinv;

  VectorField vector_field() const;
  friend bool operator==(const OdeSpec& a, const OdeSpec& b);
};

/// evol phi & G on U.
struct EvolSpec {
  Flow flow;
  Pred guard;
  TimeDomain domain;

  friend bool operator==(const EvolSpec& a, const EvolSpec& b) {
    return a.flow == b.flow && a.guard == b.guard && a.domain == b.domain;
  }
};

struct ProgramNode;

class Program {
public:
  enum class Kind { Assign, Test, Ode, Evol, Seq, Choice, Star, If, While, Loop, Spec, Assert };

  Program();  // skip

  static Program skip() { return Program(); }
  static Program assign(StateUpdate update);
  static Program test(const Pred& p);
  static Program ode(OdeSpec spec);
  static Program evol(EvolSpec spec);
  /// Nested sequences are flattened; a single element collapses to itself.
  static Program seq(std::vector<Program> parts);
  static Program choice(std::vector<Program> parts);
  static Program star(const Program& body);
  static Program if_then_else(const Pred& cond, const Program& then_branch, const Program& else_branch);
  static Program while_do(const Pred& cond, const Program& body, std::optional<Pred> inv);
  static Program loop(const Program& body, const Pred& inv);
  static Program spec(const Pred& pre, const Pred& post);
  /// Midpoint assertion used to split sequences; a no-op at run time.
  static Program assertion(const Pred& p);

  Kind kind() const;
  bool is_skip() const;
  const StateUpdate& update() const;             // Assign
  const Pred& pred() const;                      // Test, Assert, If/While condition
  const OdeSpec& ode_spec() const;               // Ode
  const EvolSpec& evol_spec() const;             // Evol
  const std::vector<Program>& children() const;  // Seq, Choice; If (then, else); Star/While/Loop (body)
  const std::optional<Pred>& inv() const;        // While, Loop
  const Pred& pre() const;                       // Spec
  const Pred& post() const;                      // Spec

  /// Same node with its children replaced (arity must match).
  Program with_children(std::vector<Program> children) const;

  friend bool operator==(const Program& a, const Program& b);
  friend bool operator!=(const Program& a, const Program& b) { return !(a == b); }

private:
  explicit Program(std::shared_ptr<const ProgramNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ProgramNode> node_;
};

struct ProgramNode {
  Program::Kind kind = Program::Kind::Assign;
  StateUpdate update;
  Pred pred;
  std::optional<OdeSpec> ode;
  std::optional<EvolSpec> evol;
  std::vector<Program> children;
  std::optional<Pred> inv;
  Pred pre, post;
};

/// Rewrites If/While/Loop into Test/Seq/Choice/Star and drops assertions.
Program desugar(const Program& p);

bool contains_spec(const Program& p);
/// Variables assigned or evolved anywhere in p.
std::set<std::string> written_vars(const Program& p);

/// Parameter declaration with its assumption (true when none given).
struct ParamDecl {
  std::string name;
  Pred assume;
};

struct HoareGoal {
  Pred pre;
  Program program;
  Pred post;
};

struct RefineGoal {
  Pred pre;
  Pred post;
  Program target;
  std::string script_path;  // as written in the file
};

/// One verification file: declarations plus exactly one goal.
struct Model {
  std::vector<std::string> vars;
  std::vector<ParamDecl> params;
  std::map<std::string, Rational> instance;          // parameter values used for proving
  std::map<std::string, std::pair<Rational, Rational>> bounds;  // proving box restrictions
  std::optional<long long> budget;
  std::optional<HoareGoal> hoare;
  std::optional<RefineGoal> refine;

  bool declares_var(const std::string& n) const;
  bool declares_param(const std::string& n) const;
  /// Conjunction of all parameter assumptions.
  Pred assumptions() const;
};

} // namespace hvcg
