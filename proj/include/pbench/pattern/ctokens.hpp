#pragma once

// Token-level view of statement bodies and mapping addresses. Bodies stay
// opaque C; only identifiers and their call/subscript use sites are read.

#include "pbench/iset/int_math.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace pbench {

struct IdentUse {
  std::string name;
  std::size_t offset = 0;
  char next = '\0';      ///< first non-blank character after the identifier
  std::size_t n_args = 0; ///< argument count when next == '('
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::size_t count_args(std::string_view text, std::size_t open) {
  int depth = 0;
  std::size_t commas = 0;
  bool any = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(' || c == '[') {
      ++depth;
    } else if (c == ')' || c == ']') {
      if (--depth == 0)
        return any ? commas + 1 : 0;
    } else if (c == ',' && depth == 1) {
      ++commas;
    } else if (depth >= 1 && !std::isspace(static_cast<unsigned char>(c))) {
      any = true;
    }
  }
  return any ? commas + 1 : 0;
}

} // namespace detail

/// Identifiers in C-like text, skipping numeric literals (so `1.0e5` is
/// not an identifier) and string/char literals.
inline std::vector<IdentUse> identifier_uses(std::string_view text) {
  std::vector<IdentUse> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '"' || c == '\'') {
      char q = c;
      for (++i; i < text.size() && text[i] != q; ++i)
        if (text[i] == '\\')
          ++i;
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && (detail::ident_char(text[i]) || text[i] == '.'))
        ++i;
    } else if (detail::ident_start(c)) {
      std::size_t start = i;
      while (i < text.size() && detail::ident_char(text[i]))
        ++i;
      IdentUse u{std::string(text.substr(start, i - start)), start, '\0', 0};
      std::size_t j = i;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j])))
        ++j;
      if (j < text.size()) {
        u.next = text[j];
        if (u.next == '(')
          u.n_args = detail::count_args(text, j);
      }
      out.push_back(std::move(u));
    } else {
      ++i;
    }
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    --e;
  return std::string(s.substr(b, e - b));
}

/// Integer arithmetic over `n` and `t` for data-space extents such as
/// `n + 2` or `(n / t) * 8`.
class ExtentExpr {
public:
  static Int eval(std::string_view text, Int n, Int t) {
    ExtentExpr p{text, 0, n, t};
    Int v = p.sum();
    p.skip();
    if (p.pos_ != text.size())
      p.fail("unexpected '" + std::string(1, text[p.pos_]) + "'");
    return v;
  }

private:
  std::string_view text_;
  std::size_t pos_;
  Int n_, t_;

  ExtentExpr(std::string_view text, std::size_t pos, Int n, Int t)
      : text_(text), pos_(pos), n_(n), t_(t) {}

  [[noreturn]] void fail(const std::string &msg) const {
    throw Error(Errc::PatternParseError,
                "extent '" + std::string(text_) + "': " + msg);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool take(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Int sum() {
    Int v = product();
    for (;;) {
      if (take('+'))
        v = checked_add(v, product());
      else if (take('-'))
        v = checked_sub(v, product());
      else
        return v;
    }
  }
  Int product() {
    Int v = atom();
    for (;;) {
      if (take('*')) {
        v = checked_mul(v, atom());
      } else if (take('/')) {
        Int d = atom();
        if (d == 0)
          fail("division by zero");
        v = floor_div(v, d);
      } else {
        return v;
      }
    }
  }
  Int atom() {
    skip();
    if (take('('))  {
      Int v = sum();
      if (!take(')'))
        fail("expected ')'");
      return v;
    }
    if (take('-'))
      return checked_neg(atom());
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      Int v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        v = checked_add(checked_mul(v, 10), text_[pos_++] - '0');
      return v;
    }
    if (pos_ < text_.size() && detail::ident_start(text_[pos_])) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && detail::ident_char(text_[pos_]))
        ++pos_;
      auto id = text_.substr(start, pos_ - start);
      if (id == "n")
        return n_;
      if (id == "t")
        return t_;
      fail("unknown name '" + std::string(id) + "' (only n and t are allowed)");
    }
    fail("expected a number, n, or t");
  }
};

} // namespace pbench
