#pragma once

#include <cstdint>

#include "padexp/padic.hpp"

namespace padexp {

/// Arithmetic in Z / p^level with p^level < 2^62.
class Modulus {
 public:
  static constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;

  Modulus(std::uint64_t p, int level);

  std::uint64_t p() const { return p_; }
  int level() const { return level_; }
  std::uint64_t q() const { return q_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + q_ - b; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q_);
  }

  /// Reduces a p-integral rational (denominator prime to p) mod q.
  std::uint64_t reduce(const Rational& x) const;
  std::uint64_t reduce(const Integer& x) const;

  /// p-adic order of a residue, capped at `level` (the order of 0 mod q).
  int order(std::uint64_t residue) const;

 private:
  std::uint64_t p_;
  int level_;
  std::uint64_t q_;
};

/// p^e, throwing BudgetError when the result reaches `limit`.
std::uint64_t checked_power(std::uint64_t p, std::uint64_t e,
                            std::uint64_t limit = Modulus::kLimit);

}  // namespace padexp
