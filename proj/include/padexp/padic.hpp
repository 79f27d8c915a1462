#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace padexp {

using Integer = mpz_class;
using Rational = mpq_class;

/// p-adic order: an integer or +infinity (the order of 0).
class Valuation {
 public:
  constexpr Valuation() = default;
  constexpr explicit Valuation(long v) : v_(v), infinite_(false) {}

  static constexpr Valuation infinity() { return Valuation(); }

  constexpr bool is_infinite() const { return infinite_; }
  long value() const;

  friend constexpr bool operator==(const Valuation& a, const Valuation& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.v_ == b.v_);
  }
  friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.v_ <=> b.v_;
  }

  friend constexpr Valuation operator+(const Valuation& a, const Valuation& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return Valuation(a.v_ + b.v_);
  }

  std::string to_string() const;

 private:
  long v_ = 0;
  bool infinite_ = true;
};

/// Fixes the prime (and hence q = p, since the ground field is Q_p) and the
/// brute-force enumeration budget. The additive character throughout is
/// psi(x) = exp(2 pi i {x}_p), trivial exactly on Z_p.
class PrimeContext {
 public:
  static constexpr std::uint64_t kDefaultNaiveBudget = std::uint64_t{1} << 22;

  explicit PrimeContext(std::uint64_t p, std::uint64_t naive_budget = kDefaultNaiveBudget);

  std::uint64_t p() const { return p_; }
  std::uint64_t naive_budget() const { return naive_budget_; }

  PrimeContext with_budget(std::uint64_t budget) const { return PrimeContext(p_, budget); }

 private:
  std::uint64_t p_;
  std::uint64_t naive_budget_;
};

bool is_prime(std::uint64_t n);

Valuation valuation(const Integer& x, const PrimeContext& ctx);
Valuation valuation(const Rational& x, const PrimeContext& ctx);

/// A rational viewed in Q_p, with its valuation cached.
class PAdicRational {
 public:
  PAdicRational(Rational value, const PrimeContext& ctx);

  const Rational& value() const { return value_; }
  Valuation valuation() const { return valuation_; }
  /// |x| = p^{-v(x)} as an exact rational (0 for x = 0).
  Rational norm() const;

 private:
  Rational value_;
  Valuation valuation_;
  std::uint64_t p_;
};

/// Canonical class u / p^M of Q_p / Z_p with M minimal.
struct PhaseFraction {
  int level = 0;
  std::uint64_t numerator = 0;

  friend bool operator==(const PhaseFraction&, const PhaseFraction&) = default;
};

/// x mod Z_p in canonical form. Throws BudgetError if p^M does not fit in
/// 62 bits.
PhaseFraction fractional_part(const Rational& x, const PrimeContext& ctx);

/// Exact power p^e as a rational; e may be negative.
Rational rational_power(std::uint64_t p, long e);

/// Parses "a", "-a", "a/b" and the sugar "a/b^c" (= a / b^c).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& x);

}  // namespace padexp
