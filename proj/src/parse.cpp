#include "loopsynth/parse.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>

namespace loopsynth {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

Resolver free_resolver() {
  auto seen = std::make_shared<std::map<std::string, int>>();
  return [seen](const std::string& name) {
    auto [it, inserted] = seen->try_emplace(name, static_cast<int>(seen->size()));
    return Var(name, VarKind::Program, it->second);
  };
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, EqEq, AndAnd, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
      std::size_t col = pos_ + 1;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", col});
        return out;
      }
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) != 0 || (c == '.' && next_is_digit())) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
          ++pos_;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
        }
        out.push_back({Tok::Number, std::string(text_.substr(start, pos_ - start)), col});
      } else if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
          ++pos_;
        }
        out.push_back({Tok::Ident, std::string(text_.substr(start, pos_ - start)), col});
      } else if (c == '=' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
        pos_ += 2;
        out.push_back({Tok::EqEq, "==", col});
      } else if (c == '&' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
        pos_ += 2;
        out.push_back({Tok::AndAnd, "&&", col});
      } else {
        ++pos_;
        switch (c) {
          case '+': out.push_back({Tok::Plus, "+", col}); break;
          case '-': out.push_back({Tok::Minus, "-", col}); break;
          case '*': out.push_back({Tok::Star, "*", col}); break;
          case '/': out.push_back({Tok::Slash, "/", col}); break;
          case '^': out.push_back({Tok::Caret, "^", col}); break;
          case '(': out.push_back({Tok::LParen, "(", col}); break;
          case ')': out.push_back({Tok::RParen, ")", col}); break;
          default: throw ParseError(std::string("unexpected character '") + c + "'", line_, col);
        }
      }
    }
  }

 private:
  bool next_is_digit() const {
    return pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) != 0;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Resolver& resolve, std::size_t line)
      : toks_(std::move(tokens)), resolve_(resolve), line_(line) {}

  std::vector<Polynomial> conjunction() {
    std::vector<Polynomial> out;
    while (true) {
      Polynomial lhs = expr();
      if (peek().kind == Tok::EqEq) {
        ++pos_;
        Polynomial rhs = expr();
        lhs -= rhs;
      }
      out.push_back(std::move(lhs));
      if (peek().kind != Tok::AndAnd) break;
      ++pos_;
    }
    expect_end();
    return out;
  }

  Polynomial single() {
    Polynomial p = expr();
    expect_end();
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, peek().column); }

  void expect_end() const {
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
  }

  Polynomial expr() {
    Polynomial acc = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = peek().kind == Tok::Minus;
      ++pos_;
      Polynomial rhs = term();
      if (minus) {
        acc -= rhs;
      } else {
        acc += rhs;
      }
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = unary();
    while (true) {
      Tok k = peek().kind;
      if (k == Tok::Star) {
        ++pos_;
        acc *= unary();
      } else if (k == Tok::Slash) {
        ++pos_;
        std::size_t col = peek().column;
        Polynomial divisor = unary();
        if (!divisor.is_constant() || divisor.is_zero()) {
          throw ParseError("division is only allowed by a nonzero constant", line_, col);
        }
        acc *= Rational(1) / divisor.constant_term();
      } else if (k == Tok::Ident || k == Tok::LParen) {
        acc *= unary();
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (peek().kind == Tok::Minus) {
      ++pos_;
      return -unary();
    }
    if (peek().kind == Tok::Plus) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (peek().kind == Tok::Caret) {
      ++pos_;
      if (peek().kind != Tok::Number || peek().text.find('.') != std::string::npos) {
        fail("exponent must be a nonnegative integer literal");
      }
      unsigned long e = std::stoul(peek().text);
      if (e > 64) fail("exponent too large");
      ++pos_;
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Polynomial primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        ++pos_;
        return Polynomial(parse_rational(t.text));
      }
      case Tok::Ident: {
        ++pos_;
        try {
          return Polynomial(resolve_(t.text));
        } catch (const std::exception& e) {
          // "xz" may be juxtaposed variables x and z
          if (auto product = split_product(t.text)) return *product;
          if (dynamic_cast<const ParseError*>(&e) != nullptr) throw;
          throw ParseError(e.what(), line_, t.column);
        }
      }
      case Tok::LParen: {
        ++pos_;
        Polynomial inner = expr();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        ++pos_;
        return inner;
      }
      default:
        fail(t.kind == Tok::End ? "unexpected end of expression" : "unexpected '" + t.text + "'");
    }
  }

  std::optional<Polynomial> split_product(const std::string& text) const {
    if (text.size() < 2) return std::nullopt;
    for (std::size_t cut = text.size() - 1; cut > 0; --cut) {
      std::string head = text.substr(0, cut);
      if (std::isdigit(static_cast<unsigned char>(text[cut])) != 0) continue;
      Polynomial first;
      try {
        first = Polynomial(resolve_(head));
      } catch (const std::exception&) {
        continue;
      }
      std::string rest = text.substr(cut);
      try {
        return first * Polynomial(resolve_(rest));
      } catch (const std::exception&) {
      }
      if (auto tail = split_product(rest)) return first * *tail;
    }
    return std::nullopt;
  }

  std::vector<Token> toks_;
  const Resolver& resolve_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, const Resolver& resolve, std::size_t line) {
  return Parser(Lexer(text, line).run(), resolve, line).single();
}

std::vector<Polynomial> parse_conjunction(std::string_view text, const Resolver& resolve, std::size_t line) {
  return Parser(Lexer(text, line).run(), resolve, line).conjunction();
}

}  // namespace loopsynth
