#include "seqsos/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace seqsos {

namespace {

enum class Tok { kNumber, kVar, kRef, kPlus, kMinus, kStar, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  double number = 0.0;
  int var_index = 0;        // 0-based
  std::string name;         // for kRef
  int pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const int start = static_cast<int>(pos_);
    if (pos_ >= text_.size()) return {Tok::kEnd, 0, 0, "", start};
    const char c = text_[pos_];
    switch (c) {
      case '+': ++pos_; return {Tok::kPlus, 0, 0, "", start};
      case '-': ++pos_; return {Tok::kMinus, 0, 0, "", start};
      case '*': ++pos_; return {Tok::kStar, 0, 0, "", start};
      case '^': ++pos_; return {Tok::kCaret, 0, 0, "", start};
      case '(': ++pos_; return {Tok::kLParen, 0, 0, "", start};
      case ')': ++pos_; return {Tok::kRParen, 0, 0, "", start};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
    if (c == 'x') return lex_var(start);
    if (c == '@') return lex_ref(start);
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  Token lex_number(int start) {
    size_t end = pos_;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) ++end;
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
        while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
        end = e;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + end, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + end) {
      throw ParseError("malformed number", start);
    }
    pos_ = end;
    return {Tok::kNumber, value, 0, "", start};
  }

  Token lex_var(int start) {
    size_t end = pos_ + 1;
    size_t digits = 0;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
      ++end;
      ++digits;
    }
    if (digits == 0) throw ParseError("expected variable index after 'x'", start);
    int idx = 0;
    std::from_chars(text_.data() + pos_ + 1, text_.data() + end, idx);
    if (idx < 1) throw ParseError("variable indices start at x1", start);
    pos_ = end;
    return {Tok::kVar, 0, idx - 1, "", start};
  }

  Token lex_ref(int start) {
    size_t end = pos_ + 1;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
    }
    if (end == pos_ + 1) throw ParseError("expected name after '@'", start);
    std::string name(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end;
    return {Tok::kRef, 0, 0, std::move(name), start};
  }

  std::string_view text_;
  size_t pos_ = 0;
};

// Expression values: map from sorted reference multiset to coefficient
// polynomial. Plain polynomials use only the empty multiset.
using Key = std::vector<std::string>;

ParsedExpr make_const(int nvars, double c) {
  ParsedExpr e;
  if (c != 0.0) e.terms[{}] = Polynomial::constant(nvars, c);
  return e;
}

ParsedExpr& add_into(ParsedExpr& a, const ParsedExpr& b, double sign) {
  for (const auto& [key, poly] : b.terms) {
    auto it = a.terms.find(key);
    if (it == a.terms.end()) {
      a.terms[key] = poly * sign;
    } else {
      it->second += poly * sign;
    }
  }
  for (auto it = a.terms.begin(); it != a.terms.end();) {
    it = it->second.is_zero() ? a.terms.erase(it) : std::next(it);
  }
  return a;
}

ParsedExpr multiply(const ParsedExpr& a, const ParsedExpr& b) {
  ParsedExpr out;
  for (const auto& [ka, pa] : a.terms) {
    for (const auto& [kb, pb] : b.terms) {
      Key key = ka;
      key.insert(key.end(), kb.begin(), kb.end());
      std::sort(key.begin(), key.end());
      auto it = out.terms.find(key);
      Polynomial prod = pa * pb;
      if (it == out.terms.end()) {
        out.terms[std::move(key)] = std::move(prod);
      } else {
        it->second += prod;
      }
    }
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, int nvars, bool allow_refs)
      : lexer_(text), nvars_(nvars), allow_refs_(allow_refs) {
    advance();
  }

  ParsedExpr parse() {
    ParsedExpr e = expression();
    expect(Tok::kEnd, "trailing input");
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) throw ParseError(std::string("expected ") + what, cur_.pos);
  }

  ParsedExpr expression() {
    double sign = 1.0;
    while (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
      if (cur_.kind == Tok::kMinus) sign = -sign;
      advance();
    }
    ParsedExpr acc = make_const(nvars_, 0.0);
    add_into(acc, term(), sign);
    while (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
      sign = cur_.kind == Tok::kMinus ? -1.0 : 1.0;
      advance();
      while (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
        if (cur_.kind == Tok::kMinus) sign = -sign;
        advance();
      }
      add_into(acc, term(), sign);
    }
    return acc;
  }

  bool starts_factor() const {
    return cur_.kind == Tok::kNumber || cur_.kind == Tok::kVar ||
           cur_.kind == Tok::kRef || cur_.kind == Tok::kLParen;
  }

  ParsedExpr term() {
    ParsedExpr acc = factor();
    for (;;) {
      if (cur_.kind == Tok::kStar) {
        advance();
        acc = multiply(acc, factor());
      } else if (starts_factor()) {
        acc = multiply(acc, factor());  // implicit multiplication
      } else {
        return acc;
      }
    }
  }

  ParsedExpr factor() {
    ParsedExpr base = atom();
    if (cur_.kind == Tok::kCaret) {
      const int pos = cur_.pos;
      advance();
      if (cur_.kind != Tok::kNumber || cur_.number < 0 ||
          cur_.number != std::floor(cur_.number)) {
        throw ParseError("exponent must be a nonnegative integer", pos);
      }
      const int e = static_cast<int>(cur_.number);
      advance();
      ParsedExpr out = make_const(nvars_, 1.0);
      for (int k = 0; k < e; ++k) out = multiply(out, base);
      return out;
    }
    return base;
  }

  ParsedExpr atom() {
    switch (cur_.kind) {
      case Tok::kNumber: {
        ParsedExpr e = make_const(nvars_, cur_.number);
        advance();
        return e;
      }
      case Tok::kVar: {
        if (cur_.var_index >= nvars_) {
          throw ParseError("variable x" + std::to_string(cur_.var_index + 1) +
                               " exceeds declared count " + std::to_string(nvars_),
                           cur_.pos);
        }
        ParsedExpr e;
        e.terms[{}] = Polynomial::variable(nvars_, cur_.var_index);
        advance();
        return e;
      }
      case Tok::kRef: {
        if (!allow_refs_) throw ParseError("'@' references not allowed here", cur_.pos);
        ParsedExpr e;
        e.terms[{cur_.name}] = Polynomial::constant(nvars_, 1.0);
        advance();
        return e;
      }
      case Tok::kLParen: {
        advance();
        ParsedExpr e = expression();
        expect(Tok::kRParen, "')'");
        advance();
        return e;
      }
      default:
        throw ParseError("expected a number, variable, or '('", cur_.pos);
    }
  }

  Lexer lexer_;
  Token cur_;
  int nvars_;
  bool allow_refs_;
};

}  // namespace

int scan_max_var_index(std::string_view text) {
  int max_idx = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x') continue;
    size_t end = i + 1;
    int idx = 0;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    if (end > i + 1) {
      std::from_chars(text.data() + i + 1, text.data() + end, idx);
      max_idx = std::max(max_idx, idx);
    }
    i = end - 1;
  }
  return max_idx;
}

ParsedExpr parse_expression(std::string_view text, int nvars, bool allow_refs) {
  if (nvars < 0) nvars = std::max(1, scan_max_var_index(text));
  return Parser(text, nvars, allow_refs).parse();
}

Polynomial parse_polynomial(std::string_view text, int nvars) {
  if (nvars < 0) nvars = std::max(1, scan_max_var_index(text));
  ParsedExpr e = parse_expression(text, nvars, /*allow_refs=*/false);
  if (e.terms.empty()) return Polynomial(nvars);
  return e.terms.begin()->second;
}

}  // namespace seqsos
