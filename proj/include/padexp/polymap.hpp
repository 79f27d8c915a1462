#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "padexp/padic.hpp"

namespace padexp {

using Exponent = std::vector<std::uint32_t>;

/// Graded-lex order: lower total degree first, then lexicographic.
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

unsigned total_degree(const Exponent& e);

/// Sparse multivariate polynomial in n variables with exact rational
/// coefficients. Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Rational, GradedLex>;

  explicit Polynomial(std::size_t n);

  static Polynomial constant(std::size_t n, const Rational& c);
  static Polynomial variable(std::size_t n, std::size_t j);

  std::size_t variables() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;

  void add_term(const Exponent& e, const Rational& c);

  Rational coefficient(const Exponent& e) const;
  Rational constant_term() const;
  unsigned degree() const;
  unsigned degree_in(std::size_t j) const;

  /// Minimal coefficient valuation (+inf for the zero polynomial).
  Valuation min_valuation(const PrimeContext& ctx) const;

  Rational evaluate(std::span<const Rational> x) const;
  Polynomial derivative(std::size_t j) const;
  Polynomial pow(unsigned e) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string to_string() const;

 private:
  std::size_t n_;
  Terms terms_;
};

/// f = (f_1, ..., f_r) : Z_p^n -> Q_p^r.
class PolyMap {
 public:
  PolyMap(std::size_t n, std::vector<Polynomial> components);

  std::size_t variables() const { return n_; }
  std::size_t size() const { return components_.size(); }
  const Polynomial& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<Polynomial>& components() const { return components_; }

  /// B = max(0, -min coefficient valuation): p^B f has p-integral coefficients.
  long denominator_exponent(const PrimeContext& ctx) const;

  friend bool operator==(const PolyMap&, const PolyMap&) = default;

  std::string to_string() const;

 private:
  std::size_t n_;
  std::vector<Polynomial> components_;
};

/// Parses "expr; expr; ..." in the variables x1..xn.
///
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor (('*' | '/') factor)*     (divisors must be nonzero constants)
///   factor := primary ('^' nat)*
///   primary:= rational | var | '(' expr ')'
///   rational := nat ['/' nat]      var := 'x' nat  (1 <= index <= n)
///
/// Exponents are limited to kMaxExponent.
PolyMap parse_polymap(std::string_view text, std::size_t n);

/// Number of variables referenced by `text` (max index of x<i>, at least 1).
std::size_t infer_variable_count(std::string_view text);

inline constexpr unsigned kMaxExponent = 256;

struct DegreeData {
  /// per_variable[i][j] = deg_{x_j} f_i
  std::vector<std::vector<unsigned>> per_variable;
  unsigned d_max = 0;
  /// e(f_i) = min order of the coefficients of f_i - f_i(0)
  std::vector<Valuation> e_orders;
};

DegreeData degree_data(const PolyMap& f, const PrimeContext& ctx);

/// g(a + p^k t) expanded in t. k may be negative and a any rational vector.
Polynomial shift_substitute(const Polynomial& g, std::span<const Rational> a, long k,
                            const PrimeContext& ctx);
PolyMap shift_substitute(const PolyMap& f, std::span<const Rational> a, long k,
                         const PrimeContext& ctx);

/// True iff 1, f_1, ..., f_r are linearly independent over Q.
bool check_affine_independence(const PolyMap& f);

/// f(x) reduced modulo p^{m+B} after scaling by p^B. The residue F_i
/// represents f_i(x) = F_i / p^B mod p^m Z_p, which determines y . f(x)
/// mod Z_p for every y with v(y_j) >= -m.
struct ModResidues {
  std::vector<std::uint64_t> values;
  long shift = 0;  // B
  std::uint64_t modulus = 1;  // p^{m+B}
};

/// Precomputed sparse modular form of a map, for repeated evaluation.
class ModularMap {
 public:
  ModularMap(const PolyMap& f, int m, const PrimeContext& ctx);

  std::size_t variables() const { return n_; }
  std::size_t size() const { return components_.size(); }
  long shift() const { return shift_; }
  std::uint64_t modulus() const { return q_; }
  int working_level() const { return level_; }

  /// Evaluates all components at x (entries taken mod modulus()).
  void evaluate(std::span<const std::uint64_t> x, std::span<std::uint64_t> out) const;

 private:
  struct Term {
    Exponent exponent;
    std::uint64_t coefficient;
  };
  std::size_t n_;
  long shift_;
  int level_;
  std::uint64_t q_;
  std::vector<std::vector<Term>> components_;
  std::vector<unsigned> max_degree_;
};

ModResidues eval_mod(const PolyMap& f, std::span<const std::uint64_t> x, int m, const PrimeContext& ctx);

/// A power series sum_I c_I x^I with a certified valuation floor:
/// v(c_I) >= floor(|I|), floor nondecreasing and unbounded.
struct RestrictedSeries {
  std::size_t variables = 1;
  std::function<Rational(const Exponent&)> coefficient;
  std::function<long(unsigned)> floor;
};

/// Largest total degree searched when locating the truncation degree.
inline constexpr unsigned kMaxSeriesDegree = 4096;

/// All terms with v(c_I) < m. Every coefficient inspected is checked against
/// the floor; throws PreconditionError if the floor never reaches m or a
/// coefficient violates it.
Polynomial series_truncate(const RestrictedSeries& s, int m, const PrimeContext& ctx);

/// One term of a Schwartz-Bruhat function: weight * 1_{center + p^k Z_p^n}.
struct Ball {
  std::vector<Rational> center;
  long radius_exponent = 0;
  Rational weight = 1;

  friend bool operator==(const Ball&, const Ball&) = default;
};

/// Finite rational combination of ball indicators (balls may overlap).
class SchwartzBruhat {
 public:
  SchwartzBruhat(std::size_t n, std::vector<Ball> terms);

  /// Indicator of Z_p^n.
  static SchwartzBruhat trivial(std::size_t n);

  std::size_t variables() const { return n_; }
  const std::vector<Ball>& terms() const { return terms_; }

  /// sum |w| p^{-kn}: an exact upper bound for the integral of |phi|.
  Rational abs_mass(const PrimeContext& ctx) const;

  /// "c1,..,cn:k:w; ..." (or "triv").
  static SchwartzBruhat parse(std::string_view text, std::size_t n);
  std::string to_string() const;

  friend bool operator==(const SchwartzBruhat&, const SchwartzBruhat&) = default;

 private:
  std::size_t n_;
  std::vector<Ball> terms_;
};

}  // namespace padexp
