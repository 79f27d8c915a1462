#include "padexp/padic.hpp"

#include <cctype>
#include <limits>

#include "padexp/errors.hpp"
#include "padexp/modular.hpp"

namespace padexp {

long Valuation::value() const {
  if (infinite_) throw std::logic_error("Valuation::value() on +infinity");
  return v_;
}

std::string Valuation::to_string() const { return infinite_ ? "inf" : std::to_string(v_); }

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d <= n / d; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimeContext::PrimeContext(std::uint64_t p, std::uint64_t naive_budget)
    : p_(p), naive_budget_(naive_budget) {
  if (!is_prime(p)) throw PreconditionError("p = " + std::to_string(p) + " is not prime");
  if (naive_budget < 1) throw PreconditionError("naive budget must be >= 1");
}

Valuation valuation(const Integer& x, const PrimeContext& ctx) {
  if (x == 0) return Valuation::infinity();
  Integer rest = x;
  const Integer p(static_cast<unsigned long>(ctx.p()));
  long v = 0;
  v = static_cast<long>(mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t()));
  return Valuation(v);
}

Valuation valuation(const Rational& x, const PrimeContext& ctx) {
  if (x == 0) return Valuation::infinity();
  return Valuation(valuation(x.get_num(), ctx).value() - valuation(x.get_den(), ctx).value());
}

PAdicRational::PAdicRational(Rational value, const PrimeContext& ctx)
    : value_(std::move(value)), valuation_(padexp::valuation(value_, ctx)), p_(ctx.p()) {
  value_.canonicalize();
}

Rational PAdicRational::norm() const {
  if (valuation_.is_infinite()) return 0;
  return rational_power(p_, -valuation_.value());
}

Rational rational_power(std::uint64_t p, long e) {
  Integer base(static_cast<unsigned long>(p));
  Integer pw;
  mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(pw);
  Rational r(Integer(1), pw);
  r.canonicalize();
  return r;
}

PhaseFraction fractional_part(const Rational& x, const PrimeContext& ctx) {
  const Valuation v = valuation(x, ctx);
  if (v.is_infinite() || v.value() >= 0) return {};
  const int level = static_cast<int>(-v.value());
  const Modulus mod(ctx.p(), level);
  const Rational unit = x * rational_power(ctx.p(), level);
  return {level, mod.reduce(unit)};
}

namespace {

Integer parse_integer(std::string_view text, std::size_t offset) {
  if (text.empty()) throw ParseError("expected an integer", offset);
  std::size_t i = 0;
  if (text[0] == '+' || text[0] == '-') ++i;
  if (i == text.size()) throw ParseError("expected digits", offset + i);
  for (std::size_t j = i; j < text.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(text[j])))
      throw ParseError("unexpected character '" + std::string(1, text[j]) + "'", offset + j);
  std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return Integer(digits);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  const std::string_view body = text.substr(begin, end - begin);
  if (body.empty()) throw ParseError("empty rational", begin);

  const auto slash = body.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(body, begin));

  const Integer num = parse_integer(body.substr(0, slash), begin);
  std::string_view den_text = body.substr(slash + 1);
  Integer den;
  const auto caret = den_text.find('^');
  if (caret == std::string_view::npos) {
    den = parse_integer(den_text, begin + slash + 1);
  } else {
    const Integer base = parse_integer(den_text.substr(0, caret), begin + slash + 1);
    const Integer exp = parse_integer(den_text.substr(caret + 1), begin + slash + caret + 2);
    if (exp < 0 || exp > 4096) throw ParseError("exponent out of range", begin + slash + caret + 2);
    mpz_pow_ui(den.get_mpz_t(), base.get_mpz_t(), exp.get_ui());
  }
  if (den == 0) throw ParseError("zero denominator", begin + slash + 1);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

// --- modular -----------------------------------------------------------------

std::uint64_t checked_power(std::uint64_t p, std::uint64_t e, std::uint64_t limit) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (result > (limit - 1) / p)
      throw BudgetError(std::to_string(p) + "^" + std::to_string(e) + " exceeds the 64-bit working range",
                        static_cast<long double>(e) , static_cast<long double>(limit));
    result *= p;
  }
  return result;
}

Modulus::Modulus(std::uint64_t p, int level) : p_(p), level_(level) {
  if (level < 0) throw PreconditionError("negative modulus level");
  q_ = checked_power(p, static_cast<std::uint64_t>(level));
}

std::uint64_t Modulus::reduce(const Integer& x) const {
  Integer r;
  const Integer q(std::to_string(q_));
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
  return std::stoull(r.get_str());
}

std::uint64_t Modulus::reduce(const Rational& x) const {
  if (q_ == 1) return 0;
  const Integer q(std::to_string(q_));
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), x.get_den().get_mpz_t(), q.get_mpz_t()) == 0)
    throw PreconditionError("rational " + to_string(x) + " is not p-integral");
  Integer r = x.get_num() * inv;
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t());
  return std::stoull(r.get_str());
}

int Modulus::order(std::uint64_t residue) const {
  if (residue == 0) return level_;
  int v = 0;
  while (residue % p_ == 0) {
    residue /= p_;
    ++v;
  }
  return v;
}

}  // namespace padexp
