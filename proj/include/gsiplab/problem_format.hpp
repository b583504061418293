// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "gsiplab/box.hpp"
#include "gsiplab/error.hpp"
#include "gsiplab/expr.hpp"

namespace gsiplab {

/// Contents of a `.gsip` file.
///
/// `outer` spans the decision box X, `inner` the lower-level box Y. `h` keeps
/// the lower-level constraints in declaration order.
struct ProblemDocument {
  std::string name;
  BoxDomain outer;
  BoxDomain inner;
  Expr objective;
  Expr g;
  std::vector<Expr> h;
  std::optional<double> f_star;
  std::optional<double> f_L;

  friend bool operator==(const ProblemDocument&, const ProblemDocument&) = default;
};

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw StructuralError("cannot format real");
  return std::string(buf, end);
}

/// Checks the document invariants; throws StructuralError.
inline void validate(const ProblemDocument& doc) {
  if (doc.outer.empty()) throw StructuralError("problem declares no outer variable");
  if (doc.inner.empty()) throw StructuralError("problem declares no inner variable");
  std::set<std::string> outer_names;
  for (const auto& c : doc.outer.coordinates()) outer_names.insert(c.name);
  std::set<std::string> all = outer_names;
  for (const auto& c : doc.inner.coordinates()) {
    if (!all.insert(c.name).second) throw StructuralError("variable '" + c.name + "' declared twice");
  }
  for (const auto& v : variables(doc.objective)) {
    if (!outer_names.contains(v)) throw StructuralError("objective references non-outer variable '" + v + "'");
  }
  auto check_all = [&](const Expr& e, const std::string& what) {
    for (const auto& v : variables(e)) {
      if (!all.contains(v)) throw StructuralError(what + " references undeclared variable '" + v + "'");
    }
  };
  check_all(doc.g, "g");
  for (const auto& h : doc.h) check_all(h, "h");
}

namespace format_detail {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
  double number = 0.0;
};

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t line, std::size_t column_offset,
             const std::set<std::string>& allowed, const std::set<std::string>& declared)
      : text_(text), line_(line), offset_(column_offset), allowed_(allowed), declared_(declared) {
    tokenize();
  }

  Expr parse_all() {
    Expr e = parse_sum();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + std::string(peek().text) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(line_, t.column, msg); }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      const std::size_t col = offset_ + i + 1;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t j = i;
        while (j < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '.')) ++j;
        if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
          if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
            while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) ++k;
            j = k;
          }
        }
        Token t{Tok::Number, text_.substr(i, j - i), col};
        const char* first = text_.data() + i;
        const char* last = text_.data() + j;
        auto [ptr, ec] = std::from_chars(first, last, t.number);
        if (ec != std::errc() || ptr != last || !std::isfinite(t.number))
          throw ParseError(line_, col, "malformed number '" + std::string(t.text) + "'");
        tokens_.push_back(t);
        i = j;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) ++j;
        tokens_.push_back({Tok::Ident, text_.substr(i, j - i), col});
        i = j;
        continue;
      }
      Tok kind;
      switch (c) {
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '^': kind = Tok::Caret; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case ',': kind = Tok::Comma; break;
        default: throw ParseError(line_, col, std::string("unexpected character '") + c + "'");
      }
      tokens_.push_back({kind, text_.substr(i, 1), col});
      ++i;
    }
    tokens_.push_back({Tok::End, "end of line", offset_ + text_.size() + 1});
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    ++pos_;
  }

  Expr parse_sum() {
    Expr e = parse_product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Op op = next().kind == Tok::Plus ? Op::Add : Op::Sub;
      e = Expr::binary(op, std::move(e), parse_product());
    }
    return e;
  }

  Expr parse_product() {
    Expr e = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Op op = next().kind == Tok::Star ? Op::Mul : Op::Div;
      e = Expr::binary(op, std::move(e), parse_unary());
    }
    return e;
  }

  // A minus sign glued to a bare literal is a negative constant; anywhere
  // else it negates its operand, and binds looser than '^'.
  Expr parse_unary() {
    if (peek().kind != Tok::Minus) return parse_power();
    next();
    if (peek().kind == Tok::Number && peek(1).kind != Tok::Caret) return Expr::constant(-next().number);
    return -parse_unary();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek().kind != Tok::Caret) return base;
    next();
    const Token& t = next();
    unsigned exponent = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), exponent);
    if (t.kind != Tok::Number || ec != std::errc() || ptr != t.text.data() + t.text.size())
      fail(t, "exponent must be a nonnegative integer literal");
    return pow(base, exponent);
  }

  Expr parse_primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Number: return Expr::constant(t.number);
      case Tok::LParen: {
        Expr e = parse_sum();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "min" || t.text == "max") {
          const Op op = t.text == "min" ? Op::Min : Op::Max;
          expect(Tok::LParen, "'('");
          Expr a = parse_sum();
          expect(Tok::Comma, "','");
          Expr b = parse_sum();
          expect(Tok::RParen, "')'");
          return Expr::binary(op, std::move(a), std::move(b));
        }
        std::string name(t.text);
        if (!declared_.contains(name)) fail(t, "undeclared variable '" + name + "'");
        if (!allowed_.contains(name)) fail(t, "variable '" + name + "' is not allowed here");
        return Expr::variable(std::move(name));
      }
      default: fail(t, "expected an operand");
    }
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  const std::set<std::string>& allowed_;
  const std::set<std::string>& declared_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// Precedence levels used for printing: sums < products < unary < power < atoms.
constexpr int kSum = 1;
constexpr int kProduct = 2;
constexpr int kUnary = 3;
constexpr int kPower = 4;
constexpr int kAtom = 5;

inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return kSum;
    case Op::Mul:
    case Op::Div: return kProduct;
    case Op::Neg: return kUnary;
    case Op::Pow: return kPower;
    case Op::Constant: return std::signbit(e.value()) ? kUnary : kAtom;
    default: return kAtom;
  }
}

inline void print(const Expr& e, std::string& out);

inline void print_at(const Expr& e, int min_precedence, std::string& out) {
  if (precedence(e) < min_precedence) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

inline void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Constant: out += format_real(e.value()); return;
    case Op::Variable: out += e.name(); return;
    case Op::Neg:
      out += '-';
      // "-2" would read back as a negative literal, so keep constants wrapped.
      print_at(e.lhs(), e.lhs().is_constant() ? kAtom + 1 : kUnary, out);
      return;
    case Op::Pow:
      print_at(e.lhs(), kAtom, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Op::Min:
    case Op::Max:
      out += e.op() == Op::Min ? "min(" : "max(";
      print(e.lhs(), out);
      out += ", ";
      print(e.rhs(), out);
      out += ')';
      return;
    default: {
      const int p = precedence(e);
      print_at(e.lhs(), p, out);
      switch (e.op()) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += " * "; break;
        default: out += " / "; break;
      }
      print_at(e.rhs(), p + 1, out);
      return;
    }
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace format_detail

/// Renders an expression in `.gsip` syntax. Parenthesization follows the
/// tree exactly, so parsing the text rebuilds a structurally equal tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  format_detail::print(e, out);
  return out;
}

/// Parses a `.gsip` document and validates it.
///
/// The format is line oriented; `#` starts a comment. Directives:
///   problem "<name>"
///   outer <var> in [<lo>, <hi>]      (repeatable)
///   inner <var> in [<lo>, <hi>]      (repeatable)
///   objective: <expr>
///   g: <expr>
///   h: <expr>                        (repeatable, order kept)
///   f_star: <real>                   (optional)
///   f_L: <real>                      (optional)
/// Variable declarations must precede the expressions that use them.
inline ProblemDocument parse_problem(std::string_view text) {
  using format_detail::trim;
  ProblemDocument doc;
  bool have_name = false;
  bool have_objective = false;
  bool have_g = false;
  std::vector<Coordinate> outer;
  std::vector<Coordinate> inner;
  std::set<std::string> outer_names;
  std::set<std::string> all_names;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    // Strip comments, but not '#' inside the quoted problem name.
    {
      bool in_string = false;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (in_string && raw[i] == '\\') {
          ++i;
        } else if (raw[i] == '"') {
          in_string = !in_string;
        } else if (!in_string && raw[i] == '#') {
          raw = raw.substr(0, i);
          break;
        }
      }
    }
    const std::string_view line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data());
    auto col_of = [&](std::string_view part) { return static_cast<std::size_t>(part.data() - raw.data()) + 1; };

    std::size_t word_end = 0;
    while (word_end < line.size() && (std::isalnum(static_cast<unsigned char>(line[word_end])) || line[word_end] == '_'))
      ++word_end;
    const std::string_view keyword = line.substr(0, word_end);
    std::string_view rest = line.substr(word_end);

    auto real_after_colon = [&](std::string_view body) -> double {
      body = trim(body);
      if (body.empty() || body.front() != ':') throw ParseError(line_no, col_of(body), "expected ':'");
      std::string_view num = trim(body.substr(1));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (num.empty() || ec != std::errc() || ptr != num.data() + num.size() || !std::isfinite(v))
        throw ParseError(line_no, col_of(num), "expected a finite real number");
      return v;
    };
    auto expr_after_colon = [&](std::string_view body, const std::set<std::string>& allowed) -> Expr {
      body = trim(body);
      if (body.empty() || body.front() != ':') throw ParseError(line_no, col_of(body), "expected ':'");
      std::string_view src = body.substr(1);
      return format_detail::ExprParser(src, line_no, col_of(src) - 1, allowed, all_names).parse_all();
    };

    if (keyword == "problem") {
      if (have_name) throw ParseError(line_no, indent + 1, "duplicate 'problem' line");
      std::string_view body = trim(rest);
      if (body.size() < 2 || body.front() != '"')
        throw ParseError(line_no, col_of(body), "expected a quoted problem name");
      std::string name;
      std::size_t i = 1;
      bool closed = false;
      for (; i < body.size(); ++i) {
        if (body[i] == '\\' && i + 1 < body.size()) {
          name += body[++i];
        } else if (body[i] == '"') {
          closed = true;
          break;
        } else {
          name += body[i];
        }
      }
      if (!closed) throw ParseError(line_no, col_of(body), "unterminated problem name");
      if (!trim(body.substr(i + 1)).empty())
        throw ParseError(line_no, col_of(body.substr(i + 1)), "unexpected text after problem name");
      doc.name = std::move(name);
      have_name = true;
    } else if (keyword == "outer" || keyword == "inner") {
      // <var> in [<lo>, <hi>]
      std::string_view body = trim(rest);
      std::size_t n = 0;
      while (n < body.size() && (std::isalnum(static_cast<unsigned char>(body[n])) || body[n] == '_')) ++n;
      const std::string_view var = body.substr(0, n);
      if (!format_detail::is_identifier(var) || var == "min" || var == "max")
        throw ParseError(line_no, col_of(body), "expected a variable name");
      const std::string name(var);
      if (all_names.contains(name)) throw ParseError(line_no, col_of(var), "duplicate declaration of '" + name + "'");
      std::string_view after = trim(body.substr(n));
      if (after.substr(0, 2) != "in" || (after.size() > 2 && !std::isspace(static_cast<unsigned char>(after[2])) && after[2] != '['))
        throw ParseError(line_no, col_of(after), "expected 'in'");
      after = trim(after.substr(2));
      if (after.empty() || after.front() != '[' || after.back() != ']')
        throw ParseError(line_no, col_of(after), "unbounded variable '" + name + "': expected [lo, hi]");
      const std::string_view inside = after.substr(1, after.size() - 2);
      const std::size_t comma = inside.find(',');
      if (comma == std::string_view::npos)
        throw ParseError(line_no, col_of(inside), "expected ',' between bounds");
      auto bound = [&](std::string_view s) {
        s = trim(s);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
          throw ParseError(line_no, col_of(s), "expected a real bound");
        if (!std::isfinite(v)) throw ParseError(line_no, col_of(s), "unbounded variable '" + name + "'");
        return v;
      };
      const double lo = bound(inside.substr(0, comma));
      const double hi = bound(inside.substr(comma + 1));
      if (lo > hi) throw ParseError(line_no, col_of(inside), "empty range for '" + name + "': lo > hi");
      (keyword == "outer" ? outer : inner).push_back({name, lo, hi});
      if (keyword == "outer") outer_names.insert(name);
      all_names.insert(name);
    } else if (keyword == "objective") {
      if (have_objective) throw ParseError(line_no, indent + 1, "duplicate 'objective' line");
      doc.objective = expr_after_colon(rest, outer_names);
      have_objective = true;
    } else if (keyword == "g") {
      if (have_g) throw ParseError(line_no, indent + 1, "duplicate 'g' line");
      doc.g = expr_after_colon(rest, all_names);
      have_g = true;
    } else if (keyword == "h") {
      doc.h.push_back(expr_after_colon(rest, all_names));
    } else if (keyword == "f_star") {
      if (doc.f_star) throw ParseError(line_no, indent + 1, "duplicate 'f_star' line");
      doc.f_star = real_after_colon(rest);
    } else if (keyword == "f_L") {
      if (doc.f_L) throw ParseError(line_no, indent + 1, "duplicate 'f_L' line");
      doc.f_L = real_after_colon(rest);
    } else {
      throw ParseError(line_no, indent + 1, "unknown directive '" + std::string(keyword) + "'");
    }
    if (end == text.size()) break;
  }

  const std::size_t last = line_no;
  if (!have_name) throw ParseError(last, 0, "missing 'problem' line");
  if (outer.empty()) throw ParseError(last, 0, "no outer variable declared");
  if (inner.empty()) throw ParseError(last, 0, "no inner variable declared");
  if (!have_objective) throw ParseError(last, 0, "missing 'objective' line");
  if (!have_g) throw ParseError(last, 0, "missing 'g' line");
  doc.outer = BoxDomain(std::move(outer));
  doc.inner = BoxDomain(std::move(inner));
  try {
    validate(doc);
  } catch (const StructuralError& e) {
    throw ParseError(last, 0, e.what());
  }
  return doc;
}

/// Canonical text of a document; parse_problem maps it back to an equal
/// document.
inline std::string serialize_problem(const ProblemDocument& doc) {
  std::ostringstream os;
  os << "problem " << format_detail::quote(doc.name) << '\n';
  for (const auto& c : doc.outer.coordinates())
    os << "outer " << c.name << " in [" << format_real(c.lo) << ", " << format_real(c.hi) << "]\n";
  for (const auto& c : doc.inner.coordinates())
    os << "inner " << c.name << " in [" << format_real(c.lo) << ", " << format_real(c.hi) << "]\n";
  os << "objective: " << to_string(doc.objective) << '\n';
  os << "g: " << to_string(doc.g) << '\n';
  for (const auto& h : doc.h) os << "h: " << to_string(h) << '\n';
  if (doc.f_star) os << "f_star: " << format_real(*doc.f_star) << '\n';
  if (doc.f_L) os << "f_L: " << format_real(*doc.f_L) << '\n';
  return os.str();
}

}  // namespace gsiplab
