#pragma once

// Parser and evaluator for the set/relation script language:
//
//   Domain := [n] -> { S[i,j] : 1 <= i <= n and 1 <= j <= n };
//   Swap   := { S[i,j] -> S[j,i] };
//   codegen(Swap * Domain);
//
// `*` restricts a map's domain (map * set) or intersects (set * set).
// `#` starts a comment that runs to the end of the line.

#include "pbench/iset/basic.hpp"

#include <cctype>
#include <memory>
#include <unordered_map>
#include <variant>

namespace pbench {

using Value = std::variant<USet, UMap>;

inline bool is_map(const Value &v) { return std::holds_alternative<UMap>(v); }

struct ScriptExpr;
using ScriptExprPtr = std::shared_ptr<const ScriptExpr>;

struct ScriptExpr {
  struct Ref {
    std::string name;
  };
  struct Literal {
    Value value;
  };
  struct Product {
    ScriptExprPtr lhs, rhs;
  };
  std::variant<Ref, Literal, Product> node;
  SourceLoc loc;
};

struct Definition {
  std::string name;
  ScriptExprPtr expr;
  SourceLoc loc;
};

struct Script {
  std::vector<Definition> definitions;
  ScriptExprPtr codegen;
  SourceLoc codegen_loc;
};

namespace script_detail {

enum class Tok {
  Ident, Int, Assign, Colon, Semi, Comma, LBrack, RBrack, LBrace, RBrace,
  LParen, RParen, Arrow, Star, Plus, Minus, Le, Lt, Ge, Gt, Eq, End
};

struct Token {
  Tok kind;
  std::string text;
  Int value = 0;
  SourceLoc loc;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLoc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", 0, loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t b = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_' || src_[pos_] == '\''))
          advance();
        out.push_back({Tok::Ident, std::string(src_.substr(b, pos_ - b)), 0, loc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        Int v = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          v = checked_add(checked_mul(v, 10), src_[pos_] - '0');
          advance();
        }
        out.push_back({Tok::Int, "", v, loc});
        continue;
      }
      auto two = src_.substr(pos_, 2);
      auto sym = [&](Tok t, std::size_t len) {
        out.push_back({t, std::string(src_.substr(pos_, len)), 0, loc});
        for (std::size_t i = 0; i < len; ++i)
          advance();
      };
      if (two == ":=") sym(Tok::Assign, 2);
      else if (two == "->") sym(Tok::Arrow, 2);
      else if (two == "<=") sym(Tok::Le, 2);
      else if (two == ">=") sym(Tok::Ge, 2);
      else if (c == ':') sym(Tok::Colon, 1);
      else if (c == ';') sym(Tok::Semi, 1);
      else if (c == ',') sym(Tok::Comma, 1);
      else if (c == '[') sym(Tok::LBrack, 1);
      else if (c == ']') sym(Tok::RBrack, 1);
      else if (c == '{') sym(Tok::LBrace, 1);
      else if (c == '}') sym(Tok::RBrace, 1);
      else if (c == '(') sym(Tok::LParen, 1);
      else if (c == ')') sym(Tok::RParen, 1);
      else if (c == '*') sym(Tok::Star, 1);
      else if (c == '+') sym(Tok::Plus, 1);
      else if (c == '-') sym(Tok::Minus, 1);
      else if (c == '<') sym(Tok::Lt, 1);
      else if (c == '>') sym(Tok::Gt, 1);
      else if (c == '=') sym(Tok::Eq, 1);
      else
        throw Error(Errc::SyntaxError, std::string("unexpected character '") + c + "'", loc);
    }
  }

private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

/// Affine form with symbolic names, resolved to columns once a piece's
/// names are all known.
struct LinearForm {
  std::vector<std::pair<std::string, Int>> terms;
  Int constant = 0;
  SourceLoc loc;

  bool is_constant() const {
    return std::all_of(terms.begin(), terms.end(), [](auto &t) { return t.second == 0; });
  }
  LinearForm &scale(Int k) {
    for (auto &t : terms)
      t.second = checked_mul(t.second, k);
    constant = checked_mul(constant, k);
    return *this;
  }
  LinearForm &add(const LinearForm &o, Int sign) {
    for (auto t : o.terms)
      terms.emplace_back(t.first, checked_mul(t.second, sign));
    constant = checked_add(constant, checked_mul(o.constant, sign));
    return *this;
  }
  /// A single bare identifier with coefficient 1.
  std::optional<std::string> as_ident() const {
    if (terms.size() == 1 && terms[0].second == 1 && constant == 0)
      return terms[0].first;
    return std::nullopt;
  }
};

struct RawConstraint {
  LinearForm lhs;  // lhs (>= | =) 0
  Constraint::Kind kind;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Script parse_script() {
    Script script;
    while (peek().kind != Tok::End) {
      const Token &t = peek();
      if (t.kind == Tok::Ident && t.text == "codegen" && peek(1).kind == Tok::LParen) {
        if (script.codegen)
          throw Error(Errc::SyntaxError, "more than one codegen directive", t.loc);
        next();
        expect(Tok::LParen, "'('");
        script.codegen_loc = t.loc;
        script.codegen = parse_expr();
        expect(Tok::RParen, "')'");
        accept(Tok::Semi);
        continue;
      }
      if (t.kind != Tok::Ident)
        throw Error(Errc::SyntaxError, "expected a definition or codegen directive", t.loc);
      Definition def;
      def.name = t.text;
      def.loc = t.loc;
      next();
      expect(Tok::Assign, "':='");
      def.expr = parse_expr();
      expect(Tok::Semi, "';'");
      if (defined_.count(def.name))
        throw Error(Errc::SyntaxError, "'" + def.name + "' is defined twice", def.loc);
      defined_.insert({def.name, is_map_expr(*def.expr)});
      script.definitions.push_back(std::move(def));
    }
    if (!script.codegen)
      throw Error(Errc::SyntaxError, "script has no codegen directive", peek().loc);
    return script;
  }

  /// Parse a single set or map literal (no surrounding script).
  Value parse_literal_only() {
    Value v = parse_literal();
    if (peek().kind != Tok::End)
      throw Error(Errc::SyntaxError, "trailing input after literal", peek().loc);
    return v;
  }

private:
  const Token &peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token &next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k)
      return false;
    next();
    return true;
  }
  const Token &expect(Tok k, const char *what) {
    if (peek().kind != k)
      throw Error(Errc::SyntaxError, std::string("expected ") + what, peek().loc);
    return next();
  }

  bool is_map_expr(const ScriptExpr &e) const {
    if (auto *r = std::get_if<ScriptExpr::Ref>(&e.node))
      return defined_.at(r->name);
    if (auto *l = std::get_if<ScriptExpr::Literal>(&e.node))
      return is_map(l->value);
    return is_map_expr(*std::get<ScriptExpr::Product>(e.node).lhs);
  }

  ScriptExprPtr parse_expr() {
    ScriptExprPtr lhs = parse_primary();
    while (peek().kind == Tok::Star) {
      SourceLoc loc = next().loc;
      ScriptExprPtr rhs = parse_primary();
      lhs = std::make_shared<ScriptExpr>(
          ScriptExpr{ScriptExpr::Product{lhs, rhs}, loc});
    }
    return lhs;
  }

  ScriptExprPtr parse_primary() {
    const Token &t = peek();
    if (t.kind == Tok::Ident) {
      next();
      if (!defined_.count(t.text))
        throw Error(Errc::UnknownIdentifier, "'" + t.text + "' is not defined", t.loc);
      return std::make_shared<ScriptExpr>(ScriptExpr{ScriptExpr::Ref{t.text}, t.loc});
    }
    if (t.kind == Tok::LParen) {
      next();
      auto e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::LBrack || t.kind == Tok::LBrace) {
      SourceLoc loc = t.loc;
      return std::make_shared<ScriptExpr>(ScriptExpr{ScriptExpr::Literal{parse_literal()}, loc});
    }
    throw Error(Errc::SyntaxError, "expected an expression", t.loc);
  }

  // -- literals ------------------------------------------------------------

  struct RawTuple {
    std::string name;
    std::vector<LinearForm> elems;
    SourceLoc loc;
  };

  Value parse_literal() {
    std::vector<std::string> params;
    if (accept(Tok::LBrack)) {
      if (peek().kind != Tok::RBrack) {
        do {
          params.push_back(expect(Tok::Ident, "parameter name").text);
        } while (accept(Tok::Comma));
      }
      expect(Tok::RBrack, "']'");
      expect(Tok::Arrow, "'->'");
    }
    expect(Tok::LBrace, "'{'");
    std::vector<BasicSet> sets;
    std::vector<BasicMap> maps;
    while (peek().kind != Tok::RBrace) {
      SourceLoc loc = peek().loc;
      Polyhedron p = parse_piece(params);
      if (p.space.is_map())
        maps.emplace_back(std::move(p));
      else
        sets.emplace_back(std::move(p));
      if (!sets.empty() && !maps.empty())
        throw Error(Errc::SyntaxError, "literal mixes set and map pieces", loc);
      if (!accept(Tok::Semi))
        break;
    }
    expect(Tok::RBrace, "'}'");
    if (!maps.empty())
      return UMap{std::move(maps)};
    return USet{std::move(sets)};
  }

  RawTuple parse_tuple() {
    RawTuple t;
    t.loc = peek().loc;
    // `{ : constraints }` is a parameter set with an empty, unnamed tuple.
    if (peek().kind == Tok::Colon)
      return t;
    if (peek().kind == Tok::Ident)
      t.name = next().text;
    expect(Tok::LBrack, "'['");
    if (peek().kind != Tok::RBrack) {
      do {
        t.elems.push_back(parse_sum());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBrack, "']'");
    return t;
  }

  void check_domain_arity(const RawTuple &t) {
    if (t.name.empty())
      return;
    auto [it, fresh] = arity_.insert({t.name, t.elems.size()});
    if (!fresh && it->second != t.elems.size())
      throw Error(Errc::ArityMismatch,
                  "tuple " + t.name + " has arity " + std::to_string(t.elems.size()) +
                      " but was used with arity " + std::to_string(it->second),
                  t.loc);
  }

  Polyhedron parse_piece(const std::vector<std::string> &params) {
    RawTuple first = parse_tuple();
    std::optional<RawTuple> second;
    if (accept(Tok::Arrow))
      second = parse_tuple();
    check_domain_arity(first);

    std::vector<std::string> exists;
    std::vector<RawConstraint> raw;
    if (accept(Tok::Colon)) {
      if (peek().kind == Tok::Ident && peek().text == "exists") {
        next();
        do {
          exists.push_back(expect(Tok::Ident, "existential name").text);
        } while (accept(Tok::Comma));
        expect(Tok::Colon, "':'");
      }
      parse_conjunction(raw);
    }

    // Name resolution: params, then tuple dims left to right. A bare fresh
    // identifier declares a dim; anything else is an anonymous dim tied to
    // its expression by an equality.
    std::unordered_map<std::string, std::size_t> names;
    for (std::size_t i = 0; i < params.size(); ++i)
      names.emplace(params[i], i);
    std::vector<std::pair<std::size_t, LinearForm>> ties;
    std::size_t col = params.size();
    int anon = 0;
    auto declare = [&](const RawTuple &t) {
      Tuple out{t.name, {}};
      for (const auto &e : t.elems) {
        auto id = e.as_ident();
        if (id && !names.count(*id)) {
          names.emplace(*id, col);
          out.dims.push_back(*id);
        } else {
          std::string fresh = "_t" + std::to_string(anon++);
          out.dims.push_back(fresh);
          ties.emplace_back(col, e);
        }
        ++col;
      }
      return out;
    };
    Polyhedron p;
    Tuple t1 = declare(first);
    if (second) {
      Tuple t2 = declare(*second);
      p.space = Space::map(params, std::move(t1), std::move(t2));
    } else {
      p.space = Space::set(params, std::move(t1));
    }
    for (const auto &e : exists) {
      if (names.count(e))
        throw Error(Errc::SyntaxError, "existential '" + e + "' shadows another name",
                    first.loc);
      names.emplace(e, col++);
    }
    p.exists = exists;
    std::size_t ncols = col;

    auto resolve = [&](const LinearForm &f) {
      AffExpr e(ncols, f.constant);
      for (const auto &[name, k] : f.terms) {
        auto it = names.find(name);
        if (it == names.end())
          throw Error(Errc::UnknownIdentifier, "unknown identifier '" + name + "'", f.loc);
        e[it->second] = checked_add(e[it->second], k);
      }
      return e;
    };
    for (const auto &[c, form] : ties) {
      AffExpr e = resolve(form);
      e[c] = checked_sub(e[c], 1);
      p.constraints.push_back(Constraint::eq(std::move(e)));
    }
    for (const auto &r : raw)
      p.constraints.push_back({resolve(r.lhs), r.kind});
    return p;
  }

  void parse_conjunction(std::vector<RawConstraint> &out) {
    do {
      LinearForm lhs = parse_sum();
      bool any = false;
      for (;;) {
        Tok op = peek().kind;
        if (op != Tok::Le && op != Tok::Lt && op != Tok::Ge && op != Tok::Gt && op != Tok::Eq)
          break;
        next();
        any = true;
        LinearForm rhs = parse_sum();
        LinearForm diff;
        Constraint::Kind kind = Constraint::Kind::GeqZero;
        switch (op) {
        case Tok::Le: diff = rhs; diff.add(lhs, -1); break;
        case Tok::Lt: diff = rhs; diff.add(lhs, -1); diff.constant = checked_sub(diff.constant, 1); break;
        case Tok::Ge: diff = lhs; diff.add(rhs, -1); break;
        case Tok::Gt: diff = lhs; diff.add(rhs, -1); diff.constant = checked_sub(diff.constant, 1); break;
        default: diff = lhs; diff.add(rhs, -1); kind = Constraint::Kind::EqZero; break;
        }
        diff.loc = lhs.loc;
        out.push_back({std::move(diff), kind});
        lhs = std::move(rhs);
      }
      if (!any)
        throw Error(Errc::SyntaxError, "expected a comparison", peek().loc);
    } while (peek().kind == Tok::Ident && peek().text == "and" && (next(), true));
  }

  LinearForm parse_sum() {
    SourceLoc loc = peek().loc;
    LinearForm acc;
    if (accept(Tok::Minus))
      acc.add(parse_product(), -1);
    else {
      accept(Tok::Plus);
      acc.add(parse_product(), 1);
    }
    for (;;) {
      if (accept(Tok::Plus))
        acc.add(parse_product(), 1);
      else if (accept(Tok::Minus))
        acc.add(parse_product(), -1);
      else
        break;
    }
    acc.loc = loc;
    return acc;
  }

  LinearForm parse_product() {
    bool literal = peek().kind == Tok::Int;
    LinearForm acc = parse_unary();
    // `2h` is shorthand for `2 * h`.
    if (literal && (peek().kind == Tok::Ident || peek().kind == Tok::LParen) &&
        peek().text != "and")
      acc = parse_unary().scale(acc.constant);
    while (peek().kind == Tok::Star) {
      SourceLoc loc = next().loc;
      LinearForm rhs = parse_unary();
      if (acc.is_constant())
        acc = rhs.scale(acc.constant);
      else if (rhs.is_constant())
        acc.scale(rhs.constant);
      else
        throw Error(Errc::SyntaxError, "non-affine product", loc);
    }
    return acc;
  }

  LinearForm parse_unary() {
    const Token &t = peek();
    if (t.kind == Tok::Minus) {
      next();
      return parse_unary().scale(-1);
    }
    if (t.kind == Tok::Int) {
      next();
      LinearForm f;
      f.constant = t.value;
      f.loc = t.loc;
      return f;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "and" || t.text == "exists")
        throw Error(Errc::SyntaxError, "unexpected keyword '" + t.text + "'", t.loc);
      next();
      LinearForm f;
      f.terms.emplace_back(t.text, 1);
      f.loc = t.loc;
      return f;
    }
    if (t.kind == Tok::LParen) {
      next();
      LinearForm f = parse_sum();
      expect(Tok::RParen, "')'");
      return f;
    }
    throw Error(Errc::SyntaxError, "expected an affine term", t.loc);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::unordered_map<std::string, bool> defined_;
  std::unordered_map<std::string, std::size_t> arity_;
};

} // namespace script_detail

inline Script parse_script(std::string_view text) {
  script_detail::Lexer lex(text);
  script_detail::Parser parser(lex.run());
  return parser.parse_script();
}

/// Parse one literal, e.g. `[n] -> { S[i] : 0 <= i < n }`.
inline Value parse_value(std::string_view text) {
  script_detail::Lexer lex(text);
  script_detail::Parser parser(lex.run());
  return parser.parse_literal_only();
}

inline USet parse_set(std::string_view text) {
  Value v = parse_value(text);
  if (is_map(v))
    throw Error(Errc::SpaceMismatch, "expected a set literal");
  return std::get<USet>(std::move(v));
}

inline UMap parse_map(std::string_view text) {
  Value v = parse_value(text);
  if (!is_map(v)) {
    if (std::get<USet>(v).empty())
      return {};
    throw Error(Errc::SpaceMismatch, "expected a map literal");
  }
  return std::get<UMap>(std::move(v));
}

inline Value apply_product(const Value &lhs, const Value &rhs, SourceLoc loc) {
  if (is_map(lhs) && !is_map(rhs))
    return restrict_domain(std::get<UMap>(lhs), std::get<USet>(rhs));
  if (!is_map(lhs) && !is_map(rhs))
    return intersect(std::get<USet>(lhs), std::get<USet>(rhs));
  throw Error(Errc::SpaceMismatch,
              "'*' is defined for map * set and set * set only", loc);
}

namespace script_detail {

inline Value eval(const ScriptExpr &e, const std::unordered_map<std::string, Value> &env) {
  return std::visit(
      [&](const auto &n) -> Value {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ScriptExpr::Ref>)
          return env.at(n.name);
        else if constexpr (std::is_same_v<N, ScriptExpr::Literal>)
          return n.value;
        else
          return apply_product(eval(*n.lhs, env), eval(*n.rhs, env), e.loc);
      },
      e.node);
}

} // namespace script_detail

/// Evaluate definitions in order and return the codegen operand.
inline Value evaluate(const Script &script) {
  std::unordered_map<std::string, Value> env;
  for (const auto &d : script.definitions)
    env.insert_or_assign(d.name, script_detail::eval(*d.expr, env));
  return script_detail::eval(*script.codegen, env);
}

/// Evaluate a single named definition (useful for inspecting scripts).
inline Value evaluate_definition(const Script &script, const std::string &name) {
  std::unordered_map<std::string, Value> env;
  for (const auto &d : script.definitions) {
    env.insert_or_assign(d.name, script_detail::eval(*d.expr, env));
    if (d.name == name)
      return env.at(name);
  }
  throw Error(Errc::UnknownIdentifier, "'" + name + "' is not defined");
}

} // namespace pbench
