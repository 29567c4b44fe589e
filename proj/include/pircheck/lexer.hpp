#ifndef PIRCHECK_LEXER_HPP
#define PIRCHECK_LEXER_HPP

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "pircheck/diag.hpp"

namespace pircheck {

// One tokenizer serves the .pir, .spec, and .entries surfaces; keyword
// recognition is left to the parsers.
enum class Tok {
  End,
  Ident,
  Int,
  Str,
  LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Semi, Colon, Comma, Dot,
  Arrow,     // ->
  Assign,    // =
  Eq, Ne, Le, Ge, Lt, Gt,
  Shl, Shr,
  Plus, Minus, Star,
  Amp, Pipe, Caret, Tilde,
  AndAnd, OrOr, Bang,
  Always,    // []
  Eventually // <>
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  uint64_t value = 0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src, bool ltl_ops = false)
      : src_(src), ltl_ops_(ltl_ops) {
    tokenize();
  }

  const std::vector<Token>& tokens() const { return toks_; }

 private:
  void tokenize() {
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
      for (size_t k = 0; k < n; ++k) {
        if (src_[i + k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < src_.size()) {
      char c = src_[i];
      SourcePos pos{line, col};
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n') advance(1);
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '*') {
        advance(2);
        while (i + 1 < src_.size() && !(src_[i] == '*' && src_[i + 1] == '/'))
          advance(1);
        if (i + 1 >= src_.size())
          throw SyntaxError(pos, "unterminated block comment");
        advance(2);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                src_[j] == '_'))
          ++j;
        push(Tok::Ident, src_.substr(i, j - i), 0, pos);
        advance(j - i);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        uint64_t v = 0;
        if (c == '0' && i + 1 < src_.size() &&
            (src_[i + 1] == 'x' || src_[i + 1] == 'X')) {
          j = i + 2;
          if (j >= src_.size() || !std::isxdigit(static_cast<unsigned char>(src_[j])))
            throw SyntaxError(pos, "malformed hex literal");
          while (j < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[j]))) {
            v = v * 16 + hexval(src_[j]);
            ++j;
          }
        } else {
          while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
            v = v * 10 + static_cast<uint64_t>(src_[j] - '0');
            ++j;
          }
        }
        push(Tok::Int, src_.substr(i, j - i), v, pos);
        advance(j - i);
        continue;
      }
      if (c == '"') {
        size_t j = i + 1;
        while (j < src_.size() && src_[j] != '"' && src_[j] != '\n') ++j;
        if (j >= src_.size() || src_[j] != '"')
          throw SyntaxError(pos, "unterminated string literal");
        push(Tok::Str, src_.substr(i + 1, j - i - 1), 0, pos);
        advance(j - i + 1);
        continue;
      }
      auto two = [&](char a, char b) {
        return c == a && i + 1 < src_.size() && src_[i + 1] == b;
      };
      if (ltl_ops_ && two('[', ']')) { push(Tok::Always, "[]", 0, pos); advance(2); continue; }
      if (ltl_ops_ && two('<', '>')) { push(Tok::Eventually, "<>", 0, pos); advance(2); continue; }
      if (two('-', '>')) { push(Tok::Arrow, "->", 0, pos); advance(2); continue; }
      if (two('=', '=')) { push(Tok::Eq, "==", 0, pos); advance(2); continue; }
      if (two('!', '=')) { push(Tok::Ne, "!=", 0, pos); advance(2); continue; }
      if (two('<', '=')) { push(Tok::Le, "<=", 0, pos); advance(2); continue; }
      if (two('>', '=')) { push(Tok::Ge, ">=", 0, pos); advance(2); continue; }
      if (two('<', '<')) { push(Tok::Shl, "<<", 0, pos); advance(2); continue; }
      if (two('>', '>')) { push(Tok::Shr, ">>", 0, pos); advance(2); continue; }
      if (two('&', '&')) { push(Tok::AndAnd, "&&", 0, pos); advance(2); continue; }
      if (two('|', '|')) { push(Tok::OrOr, "||", 0, pos); advance(2); continue; }
      Tok k;
      switch (c) {
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBracket; break;
        case ']': k = Tok::RBracket; break;
        case ';': k = Tok::Semi; break;
        case ':': k = Tok::Colon; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case '=': k = Tok::Assign; break;
        case '<': k = Tok::Lt; break;
        case '>': k = Tok::Gt; break;
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '&': k = Tok::Amp; break;
        case '|': k = Tok::Pipe; break;
        case '^': k = Tok::Caret; break;
        case '~': k = Tok::Tilde; break;
        case '!': k = Tok::Bang; break;
        default:
          throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
      }
      push(k, std::string(1, c), 0, pos);
      advance(1);
    }
    push(Tok::End, "", 0, SourcePos{line, col});
  }

  static uint64_t hexval(char c) {
    if (c >= '0' && c <= '9') return static_cast<uint64_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<uint64_t>(c - 'a' + 10);
    return static_cast<uint64_t>(c - 'A' + 10);
  }

  void push(Tok k, std::string t, uint64_t v, SourcePos p) {
    toks_.push_back(Token{k, std::move(t), v, p});
  }

  std::string src_;
  bool ltl_ops_;
  std::vector<Token> toks_;
};

// Small cursor over the token stream shared by both parsers.
class TokenCursor {
 public:
  explicit TokenCursor(const std::vector<Token>& toks) : toks_(toks) {}

  const Token& peek(size_t ahead = 0) const {
    size_t i = idx_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++idx_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  bool accept(Tok k) {
    if (at(k)) { next(); return true; }
    return false;
  }
  bool accept_kw(const char* kw) {
    if (at_kw(kw)) { next(); return true; }
    return false;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k))
      throw SyntaxError(peek().pos, std::string("expected ") + what +
                                        ", found '" + describe(peek()) + "'");
    return next();
  }
  Token expect_kw(const char* kw) {
    if (!at_kw(kw))
      throw SyntaxError(peek().pos, std::string("expected '") + kw +
                                        "', found '" + describe(peek()) + "'");
    return next();
  }
  SourcePos pos() const { return peek().pos; }

 private:
  static std::string describe(const Token& t) {
    return t.kind == Tok::End ? "<end of input>" : t.text;
  }
  const std::vector<Token>& toks_;
  size_t idx_ = 0;
};

}  // namespace pircheck

#endif  // PIRCHECK_LEXER_HPP
