#include <cctype>

#include "padexp/errors.hpp"
#include "padexp/polymap.hpp"

namespace padexp {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  PolyMap parse_map() {
    std::vector<Polynomial> components;
    while (true) {
      skip_space();
      if (at_end() || peek() == ';') throw ParseError("empty component", pos_);
      components.push_back(parse_expr());
      skip_space();
      if (at_end()) break;
      if (peek() != ';') throw ParseError("unexpected character '" + std::string(1, peek()) + "'", pos_);
      ++pos_;
    }
    return PolyMap(n_, std::move(components));
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  Polynomial parse_expr() {
    skip_space();
    bool negate = false;
    if (!at_end() && (peek() == '+' || peek() == '-')) {
      negate = peek() == '-';
      ++pos_;
    }
    Polynomial acc = parse_term();
    if (negate) acc *= Rational(-1);
    while (true) {
      skip_space();
      if (at_end() || (peek() != '+' && peek() != '-')) break;
      const bool minus = peek() == '-';
      ++pos_;
      Polynomial rhs = parse_term();
      if (minus)
        acc -= rhs;
      else
        acc += rhs;
    }
    return acc;
  }

  Polynomial parse_term() {
    Polynomial acc = parse_factor();
    while (true) {
      skip_space();
      if (at_end() || (peek() != '*' && peek() != '/')) break;
      const char op = peek();
      const std::size_t at = ++pos_;
      Polynomial rhs = parse_factor();
      if (op == '*') {
        acc = acc * rhs;
        continue;
      }
      if (!rhs.is_constant() || rhs.is_zero()) throw ParseError("can only divide by a nonzero constant", at);
      acc *= Rational(1 / rhs.constant_term());
    }
    return acc;
  }

  Polynomial parse_factor() {
    Polynomial base = parse_primary();
    while (true) {
      skip_space();
      if (at_end() || peek() != '^') break;
      ++pos_;
      skip_space();
      const std::size_t at = pos_;
      const Integer e = parse_nat();
      if (e > kMaxExponent) throw ParseError("exponent overflow (max " + std::to_string(kMaxExponent) + ")", at);
      base = base.pow(static_cast<unsigned>(e.get_ui()));
    }
    return base;
  }

  Polynomial parse_primary() {
    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", pos_);
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = parse_expr();
      skip_space();
      if (at_end() || peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if (c == 'x' || c == 'X') {
      const std::size_t at = pos_;
      ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError("expected a variable index after 'x'", pos_);
      const Integer index = parse_nat();
      if (index < 1 || index > n_)
        throw ParseError("unknown variable x" + index.get_str() + " (map has " + std::to_string(n_) + " variables)", at);
      return Polynomial::variable(n_, index.get_ui() - 1);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t at = pos_;
      Integer num = parse_nat();
      Integer den = 1;
      skip_space();
      if (!at_end() && peek() == '/') {
        ++pos_;
        skip_space();
        den = parse_nat();
        if (den == 0) throw ParseError("zero denominator", at);
      }
      Rational value(num, den);
      value.canonicalize();
      return Polynomial::constant(n_, value);
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Integer parse_nat() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw ParseError("expected a natural number", pos_);
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

PolyMap parse_polymap(std::string_view text, std::size_t n) {
  if (n < 1) throw PreconditionError("variable count must be >= 1");
  return Parser(text, n).parse_map();
}

std::size_t infer_variable_count(std::string_view text) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x' && text[i] != 'X') continue;
    std::size_t j = i + 1;
    std::size_t index = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      index = index * 10 + static_cast<std::size_t>(text[j] - '0');
      if (index > 1000) break;
      ++j;
    }
    n = std::max(n, index);
  }
  return n;
}

}  // namespace padexp
