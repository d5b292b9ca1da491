#pragma once

#include "hvcg/program.hpp"

#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace hvcg {

/// Names visible to the parser. Identifiers resolve to variables or
/// parameters; anything else is a scope error.
struct Scope {
  std::set<std::string> vars;
  std::set<std::string> params;

  static Scope of(const Model& m);
};

/// Parses a complete verification file.
Model parse_model(std::string_view text);

Program parse_program(std::string_view text, const Scope& scope);
Pred parse_pred(std::string_view text, const Scope& scope);
Expr parse_expr(std::string_view text, const Scope& scope);

/// Token-level access for line formats layered on top of the program
/// syntax (refinement scripts).
class TextParser {
public:
  TextParser(std::string_view text, const Scope& scope, int line = 1);
  ~TextParser();
  TextParser(const TextParser&) = delete;
  TextParser& operator=(const TextParser&) = delete;

  bool at_end() const;
  /// Consumes the next token if it is the identifier or keyword `word`.
  bool accept_word(const std::string& word);
  bool accept_symbol(const std::string& symbol);
  /// Next bare word (identifier, keyword, or number-ish path segment).
  std::string word();
  /// Raw text from the current token to end of input.
  std::string rest();

  Expr expr();
  Pred pred();
  Program program();
  StateUpdate update();  // x := e [, y := f] or `skip`
  void expect_end();

  struct Impl;

private:
  std::unique_ptr<Impl> impl_;
};

/// Canonical concrete syntax; parse(print(x)) == x.
std::string print_program(const Program& p);
std::string print_update(const StateUpdate& u);
std::string print_model(const Model& m);

} // namespace hvcg
