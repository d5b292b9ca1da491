#include "hvcg/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <vector>

namespace hvcg {

Scope Scope::of(const Model& m) {
  Scope s;
  s.vars.insert(m.vars.begin(), m.vars.end());
  for (const auto& p : m.params) s.params.insert(p.name);
  return s;
}

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "var",  "param", "real",  "assume", "instance", "bounds", "in",    "budget",   "hoare",
      "refine", "to",  "by",    "skip",   "if",       "then",   "else",  "while",    "inv",
      "do",   "loop",  "evol",  "on",     "inf",      "dinv",   "solution", "assert", "true",
      "false", "exp",  "ln",    "time",   "after"};
  return words;
}

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
  std::size_t offset = 0;
};

std::vector<Token> lex(std::string_view src, int first_line) {
  static const char* const symbols[] = {":=", "!=", "<=", ">=", "->", "++", "'", "=", "<", ">",
                                        "&",  "|",  "!",  "+",  "-",  "*",  "/", "^", "(", ")",
                                        "{",  "}",  "[",  "]",  ",",  ";",  ":", "?", "."};
  std::vector<Token> out;
  int line = first_line, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    t.offset = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      bool matched = false;
      for (const char* s : symbols) {
        std::string_view sv(s);
        if (src.substr(i, sv.size()) == sv) {
          t.kind = Tok::Symbol;
          t.text = std::string(sv);
          advance(sv.size());
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  end.offset = src.size();
  out.push_back(end);
  return out;
}

bool is_relation(const std::string& s) {
  return s == "=" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=";
}

Rel to_rel(const std::string& s) {
  if (s == "=") return Rel::Eq;
  if (s == "!=") return Rel::Ne;
  if (s == "<") return Rel::Lt;
  if (s == "<=") return Rel::Le;
  if (s == ">") return Rel::Gt;
  return Rel::Ge;
}

} // namespace

struct TextParser::Impl {
  std::string src;
  std::vector<Token> toks;
  std::size_t pos = 0;
  Scope scope;

  Impl(std::string_view text, Scope sc, int line) : src(text), toks(lex(src, line)), scope(std::move(sc)) {}

  const Token& peek(std::size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + " near " + near, t.line, t.col);
  }

  bool is_symbol(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Symbol && peek(k).text == s;
  }
  bool is_word(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }
  bool accept_symbol(const std::string& s) {
    if (!is_symbol(s)) return false;
    ++pos;
    return true;
  }
  bool accept_word(const std::string& s) {
    if (!is_word(s)) return false;
    ++pos;
    return true;
  }
  void expect_symbol(const std::string& s) {
    if (!accept_symbol(s)) fail("expected '" + s + "'");
  }
  void expect_word(const std::string& s) {
    if (!accept_word(s)) fail("expected '" + s + "'");
  }
  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || reserved().count(t.text)) fail("expected identifier");
    ++pos;
    return t.text;
  }
  std::string variable() {
    const Token& t = peek();
    std::string n = ident();
    if (!scope.vars.count(n)) throw ParseError("'" + n + "' is not a declared variable", t.line, t.col);
    return n;
  }

  // ---- expressions -------------------------------------------------------

  struct Parsed {
    Expr e;
    bool literal = false;  // a bare number token (possibly folded)
  };

  Expr expr() { return sum().e; }

  Parsed sum() {
    Parsed a = product();
    while (is_symbol("+") || is_symbol("-")) {
      bool plus = peek().text == "+";
      ++pos;
      Parsed b = product();
      a = Parsed{plus ? a.e + b.e : a.e - b.e, false};
    }
    return a;
  }

  Parsed product() {
    Parsed a = unary();
    while (is_symbol("*") || is_symbol("/")) {
      // A trailing '*' with no operand is the program star, not a product.
      if (is_symbol("*") && !starts_operand(1)) break;
      bool times = peek().text == "*";
      ++pos;
      Parsed b = unary();
      if (!times && a.literal && b.literal && b.e.value() != 0) {
        a = Parsed{Expr::constant(Rational(a.e.value() / b.e.value())), true};
      } else {
        a = Parsed{times ? a.e * b.e : a.e / b.e, false};
      }
    }
    return a;
  }

  bool starts_operand(std::size_t k) const {
    const Token& t = peek(k);
    if (t.kind == Tok::Number) return true;
    if (t.kind == Tok::Ident) {
      if (t.text == "time" || t.text == "exp" || t.text == "ln") return true;
      return !reserved().count(t.text);
    }
    return t.kind == Tok::Symbol && (t.text == "(" || t.text == "-");
  }

  Parsed unary() {
    if (accept_symbol("-")) {
      Parsed a = unary();
      if (a.literal) return Parsed{Expr::constant(Rational(-a.e.value())), true};
      return Parsed{-a.e, false};
    }
    return power();
  }

  Parsed power() {
    Parsed base = atom();
    if (accept_symbol("^")) {
      const Token& t = peek();
      if (t.kind != Tok::Number || t.text.find('.') != std::string::npos) fail("expected natural exponent");
      ++pos;
      unsigned n = static_cast<unsigned>(std::stoul(t.text));
      return Parsed{Expr::pow(base.e, n), false};
    }
    return base;
  }

  Parsed atom() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++pos;
      auto r = parse_rational(t.text);
      if (!r) fail("malformed number");
      return Parsed{Expr::constant(*r), true};
    }
    if (accept_symbol("(")) {
      Expr e = expr();
      expect_symbol(")");
      return Parsed{e, false};
    }
    if (accept_word("time")) return Parsed{Expr::time(), false};
    if (is_word("exp") || is_word("ln")) {
      bool is_exp = peek().text == "exp";
      ++pos;
      expect_symbol("(");
      Expr a = expr();
      expect_symbol(")");
      return Parsed{is_exp ? Expr::exp(a) : Expr::ln(a), false};
    }
    if (t.kind == Tok::Ident && !reserved().count(t.text)) {
      ++pos;
      if (scope.vars.count(t.text)) return Parsed{Expr::var(t.text), false};
      if (scope.params.count(t.text)) return Parsed{Expr::param(t.text), false};
      throw ParseError("undeclared identifier '" + t.text + "'", t.line, t.col);
    }
    fail("expected expression");
  }

  // ---- predicates --------------------------------------------------------

  Pred pred() {
    Pred a = disjunction();
    if (accept_symbol("->")) return Pred::implies(a, pred());
    return a;
  }

  Pred disjunction() {
    std::vector<Pred> parts{conjunction()};
    while (accept_symbol("|")) parts.push_back(conjunction());
    return Pred::disj(std::move(parts));
  }

  Pred conjunction() {
    std::vector<Pred> parts{negation()};
    while (accept_symbol("&")) parts.push_back(negation());
    return Pred::conj(std::move(parts));
  }

  Pred negation() {
    if (accept_symbol("!")) return Pred::negation(negation());
    return pred_atom();
  }

  Pred pred_atom() {
    if (accept_word("true")) return Pred::truth();
    if (accept_word("false")) return Pred::falsity();
    if (accept_word("after")) {
      expect_symbol("(");
      Flow flow = flow_bindings();
      expect_symbol("&");
      Pred guard = pred();
      expect_word("on");
      TimeDomain dom = domain();
      expect_symbol(",");
      Pred post = pred();
      expect_symbol(")");
      return Pred::after(std::move(flow), guard, std::move(dom), post);
    }
    if (is_symbol("(")) {
      std::size_t save = pos;
      try {
        ++pos;
        Pred p = pred();
        expect_symbol(")");
        const Token& n = peek();
        bool continues_expr = n.kind == Tok::Symbol &&
                              (is_relation(n.text) || n.text == "+" || n.text == "-" || n.text == "*" ||
                               n.text == "/" || n.text == "^");
        if (!continues_expr) return p;
      } catch (const ParseError&) {
      }
      pos = save;
    }
    Expr lhs = expr();
    const Token& r = peek();
    if (r.kind != Tok::Symbol || !is_relation(r.text)) fail("expected relation");
    ++pos;
    Expr rhs = expr();
    return Pred::atom(to_rel(r.text), lhs, rhs);
  }

  // ---- programs ----------------------------------------------------------

  TimeDomain domain() {
    expect_symbol("[");
    const Token& z = peek();
    if (z.kind != Tok::Number || parse_rational(z.text) != Rational(0))
      throw ParseError("time domains must start at 0", z.line, z.col);
    ++pos;
    expect_symbol(",");
    TimeDomain d;
    if (!accept_word("inf")) d.upper = expr();
    expect_symbol("]");
    return d;
  }

  Flow flow_bindings() {
    expect_symbol("{");
    Flow f;
    std::set<std::string> seen;
    do {
      const Token& t = peek();
      std::string x = variable();
      if (!seen.insert(x).second) throw ParseError("duplicate binding for '" + x + "'", t.line, t.col);
      expect_symbol(":=");
      f.bindings.emplace_back(x, expr());
    } while (accept_symbol(","));
    expect_symbol("}");
    return f;
  }

  StateUpdate update() {
    if (accept_word("skip")) return StateUpdate();
    std::vector<std::string> lhs{variable()};
    while (accept_symbol(",")) lhs.push_back(variable());
    expect_symbol(":=");
    std::vector<std::pair<std::string, Expr>> asg;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      if (i) expect_symbol(",");
      asg.emplace_back(lhs[i], expr());
    }
    return StateUpdate(std::move(asg));
  }

  Program program() {
    std::vector<Program> parts{sequence()};
    while (accept_symbol("++")) parts.push_back(sequence());
    return Program::choice(std::move(parts));
  }

  Program sequence() {
    std::vector<Program> parts{postfix()};
    while (accept_symbol(";")) parts.push_back(postfix());
    return Program::seq(std::move(parts));
  }

  Program postfix() {
    Program p = unit();
    while (accept_symbol("*")) p = Program::star(p);
    return p;
  }

  Program unit() {
    if (accept_word("skip")) return Program::skip();
    if (accept_symbol("?")) return Program::test(pred());
    if (accept_word("assert")) return Program::assertion(pred());
    if (accept_symbol("(")) {
      Program p = program();
      expect_symbol(")");
      return p;
    }
    if (accept_symbol("[")) {
      Pred pre = pred();
      expect_symbol(",");
      Pred post = pred();
      expect_symbol("]");
      return Program::spec(pre, post);
    }
    if (accept_word("if")) {
      Pred c = pred();
      expect_word("then");
      Program a = postfix();
      expect_word("else");
      Program b = postfix();
      return Program::if_then_else(c, a, b);
    }
    if (accept_word("while")) {
      Pred c = pred();
      std::optional<Pred> inv;
      if (accept_word("inv")) inv = pred();
      expect_word("do");
      Program body = postfix();
      return Program::while_do(c, body, inv);
    }
    if (accept_word("loop")) {
      Program body = postfix();
      expect_word("inv");
      Pred inv = pred();
      return Program::loop(body, inv);
    }
    if (accept_word("evol")) {
      EvolSpec s;
      s.flow = flow_bindings();
      s.guard = accept_symbol("&") ? pred() : Pred::truth();
      if (accept_word("on")) s.domain = domain();
      return Program::evol(std::move(s));
    }
    if (is_symbol("{")) return ode();
    if (peek().kind == Tok::Ident && !reserved().count(peek().text)) return Program::assign(update());
    fail("expected program");
  }

  Program ode() {
    expect_symbol("{");
    OdeSpec s;
    std::set<std::string> seen;
    do {
      const Token& t = peek();
      std::string x = variable();
      if (!seen.insert(x).second) throw ParseError("duplicate derivative for '" + x + "'", t.line, t.col);
      expect_symbol("'");
      expect_symbol("=");
      Expr e = expr();
      if (mentions_time(e)) throw ParseError("vector fields must not mention time", t.line, t.col);
      s.field.emplace_back(x, e);
    } while (accept_symbol(","));
    s.guard = accept_symbol("&") ? pred() : Pred::truth();
    if (accept_word("on")) s.domain = domain();
    expect_symbol("}");
    if (accept_word("solution")) s.solution = flow_bindings();
    if (accept_word("dinv")) s.dinv = pred();
    return Program::ode(std::move(s));
  }

  // ---- files -------------------------------------------------------------

  Rational constant_value() {
    const Token& t = peek();
    Expr e = expr();
    std::optional<Rational> v;
    try {
      v = eval_exact(e, {}, {});
    } catch (const Error&) {
    }
    if (!v) throw ParseError("expected a rational constant", t.line, t.col);
    return *v;
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> names{ident()};
    while (accept_symbol(",")) names.push_back(ident());
    return names;
  }

  std::string path_word() {
    if (at_end()) fail("expected path");
    std::size_t start = peek().offset;
    std::size_t end = start;
    while (end < src.size() && !std::isspace(static_cast<unsigned char>(src[end]))) ++end;
    std::string w = src.substr(start, end - start);
    if (w.size() >= 2 && w.front() == '"' && w.back() == '"') w = w.substr(1, w.size() - 2);
    while (!at_end() && peek().offset < end) ++pos;
    return w;
  }

  Model model() {
    Model m;
    // Declarations may be used before they appear (parameter assumptions
    // referring to later parameters), so collect names first.
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (toks[i].kind != Tok::Ident || (toks[i].text != "var" && toks[i].text != "param")) continue;
      bool is_var = toks[i].text == "var";
      for (std::size_t j = i + 1; j < toks.size() && toks[j].kind == Tok::Ident; j += 2) {
        if (reserved().count(toks[j].text)) break;
        if (is_var) scope.vars.insert(toks[j].text);
        else scope.params.insert(toks[j].text);
        if (!(toks[j + 1].kind == Tok::Symbol && toks[j + 1].text == ",")) break;
      }
    }
    for (const auto& v : scope.vars)
      if (scope.params.count(v)) throw ParseError("'" + v + "' declared as both variable and parameter", 1, 1);

    std::set<std::string> declared;
    while (!at_end()) {
      const Token& t = peek();
      if (accept_word("var")) {
        for (auto& n : name_list()) {
          if (!declared.insert(n).second) throw ParseError("duplicate declaration of '" + n + "'", t.line, t.col);
          m.vars.push_back(n);
        }
        expect_symbol(":");
        expect_word("real");
      } else if (accept_word("param")) {
        auto names = name_list();
        expect_symbol(":");
        expect_word("real");
        Pred assume = accept_word("assume") ? pred() : Pred::truth();
        for (auto& n : names) {
          if (!declared.insert(n).second) throw ParseError("duplicate declaration of '" + n + "'", t.line, t.col);
          m.params.push_back(ParamDecl{n, assume});
          assume = Pred::truth();  // attach a shared assumption once
        }
      } else if (accept_word("instance")) {
        do {
          const Token& nt = peek();
          std::string n = ident();
          if (!scope.params.count(n)) throw ParseError("'" + n + "' is not a parameter", nt.line, nt.col);
          expect_symbol("=");
          m.instance[n] = constant_value();
        } while (accept_symbol(","));
      } else if (accept_word("bounds")) {
        do {
          const Token& nt = peek();
          std::string n = ident();
          if (!scope.vars.count(n)) throw ParseError("'" + n + "' is not a variable", nt.line, nt.col);
          expect_word("in");
          expect_symbol("[");
          Rational lo = constant_value();
          expect_symbol(",");
          Rational hi = constant_value();
          expect_symbol("]");
          if (lo > hi) throw ParseError("empty bounds for '" + n + "'", nt.line, nt.col);
          m.bounds[n] = {lo, hi};
        } while (accept_symbol(","));
      } else if (accept_word("budget")) {
        const Token& bt = peek();
        if (bt.kind != Tok::Number || bt.text.find('.') != std::string::npos) fail("expected integer budget");
        ++pos;
        m.budget = std::stoll(bt.text);
      } else if (accept_word("hoare")) {
        if (m.hoare || m.refine) throw ParseError("a file holds exactly one goal", t.line, t.col);
        expect_symbol("{");
        Pred pre = pred();
        expect_symbol("}");
        Program prog = program();
        expect_symbol("{");
        Pred post = pred();
        expect_symbol("}");
        m.hoare = HoareGoal{pre, prog, post};
      } else if (accept_word("refine")) {
        if (m.hoare || m.refine) throw ParseError("a file holds exactly one goal", t.line, t.col);
        expect_symbol("[");
        Pred pre = pred();
        expect_symbol(",");
        Pred post = pred();
        expect_symbol("]");
        expect_word("to");
        Program target = program();
        expect_word("by");
        m.refine = RefineGoal{pre, post, target, path_word()};
      } else {
        fail("expected declaration or goal");
      }
    }
    if (!m.hoare && !m.refine) throw ParseError("file declares no goal", peek().line, peek().col);
    return m;
  }
};

TextParser::TextParser(std::string_view text, const Scope& scope, int line)
    : impl_(std::make_unique<Impl>(text, scope, line)) {}
TextParser::~TextParser() = default;

bool TextParser::at_end() const { return impl_->at_end(); }
bool TextParser::accept_word(const std::string& word) { return impl_->accept_word(word); }
bool TextParser::accept_symbol(const std::string& symbol) { return impl_->accept_symbol(symbol); }
std::string TextParser::word() { return impl_->path_word(); }
std::string TextParser::rest() {
  if (impl_->at_end()) return "";
  std::string r = impl_->src.substr(impl_->peek().offset);
  impl_->pos = impl_->toks.size() - 1;
  return r;
}
Expr TextParser::expr() { return impl_->expr(); }
Pred TextParser::pred() { return impl_->pred(); }
Program TextParser::program() { return impl_->program(); }
StateUpdate TextParser::update() { return impl_->update(); }
void TextParser::expect_end() {
  if (!impl_->at_end()) impl_->fail("unexpected trailing input");
}

Model parse_model(std::string_view text) {
  TextParser::Impl p(text, Scope{}, 1);
  return p.model();
}

Program parse_program(std::string_view text, const Scope& scope) {
  TextParser p(text, scope);
  Program r = p.program();
  p.expect_end();
  return r;
}

Pred parse_pred(std::string_view text, const Scope& scope) {
  TextParser p(text, scope);
  Pred r = p.pred();
  p.expect_end();
  return r;
}

Expr parse_expr(std::string_view text, const Scope& scope) {
  TextParser p(text, scope);
  Expr r = p.expr();
  p.expect_end();
  return r;
}

} // namespace hvcg
