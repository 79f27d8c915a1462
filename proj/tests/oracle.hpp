#pragma once

// Reference computations for the tests. Nothing here goes through the
// histogram algebra, the modular kernels or the pruning code: phases are found
// by searching for u with x - u/p^M in Z_p, and sums are taken in complex
// floating point straight from the definition.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "padexp/polymap.hpp"

namespace oracle {

using padexp::Integer;
using padexp::Rational;

inline bool p_integral(const Rational& x, std::uint64_t p) {
  return mpz_divisible_ui_p(x.get_den().get_mpz_t(), p) == 0;
}

inline Integer ipow(std::uint64_t p, unsigned e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, e);
  return r;
}

/// {x}_p as u / p^M, 0 <= u < p^M.
inline std::pair<Integer, unsigned> frac_p(const Rational& x, std::uint64_t p) {
  Integer den = x.get_den();
  unsigned level = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), p)) {
    den /= p;
    ++level;
  }
  const Integer q = ipow(p, level);
  if (q <= 2187) {
    for (Integer u = 0; u < q; ++u)
      if (p_integral(Rational(x - Rational(u, q)), p)) return {u, level};
  }
  // u = numerator * den^{-1} mod q
  Integer inv, u;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), q.get_mpz_t());
  u = x.get_num() * inv;
  mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), q.get_mpz_t());
  return {u, level};
}

inline std::complex<long double> psi(const Rational& x, std::uint64_t p) {
  const auto [u, level] = frac_p(x, p);
  const Rational t(u, ipow(p, level));
  const long double angle = 2 * std::numbers::pi_v<long double> * static_cast<long double>(t.get_d());
  return {std::cos(angle), std::sin(angle)};
}

/// Calls fn(x) for every x in {0..q-1}^n.
template <class Fn>
void for_each_point(std::size_t n, std::uint64_t q, Fn fn) {
  std::vector<Rational> x(n, Rational(0));
  std::vector<std::uint64_t> digits(n, 0);
  while (true) {
    fn(x);
    std::size_t j = 0;
    while (j < n && ++digits[j] == q) {
      digits[j] = 0;
      x[j] = 0;
      ++j;
    }
    if (j == n) return;
    x[j] = Rational(Integer(static_cast<unsigned long>(digits[j])));
  }
}

/// int_{Z_p^n} psi(y . f(x)) dx by summing over x mod p^level; level must be
/// at least m + B.
inline std::complex<long double> integral(const padexp::PolyMap& f, const std::vector<Rational>& y, std::uint64_t p,
                                          unsigned level) {
  const std::uint64_t q = ipow(p, level).get_ui();
  std::complex<long double> sum = 0;
  std::uint64_t count = 0;
  for_each_point(f.variables(), q, [&](const std::vector<Rational>& x) {
    Rational s = 0;
    for (std::size_t j = 0; j < f.size(); ++j) s += y[j] * f[j].evaluate(x);
    sum += psi(s, p);
    ++count;
  });
  return sum / static_cast<long double>(count);
}

/// Residue of an integral-valued p-integral rational mod q.
inline std::uint64_t residue(const Rational& x, const Integer& q) {
  Integer inv, u;
  mpz_invert(inv.get_mpz_t(), x.get_den().get_mpz_t(), q.get_mpz_t());
  u = x.get_num() * inv;
  mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), q.get_mpz_t());
  return u.get_ui();
}

/// N(Z) = #{x mod p^{m+B} : p^B f(x) = Z mod p^{m+B}}.
inline std::map<std::vector<std::uint64_t>, std::int64_t> fibers(const padexp::PolyMap& f, std::uint64_t p,
                                                                 unsigned m, unsigned shift) {
  const Integer q = ipow(p, m + shift);
  const Integer lift = ipow(p, shift);
  std::map<std::vector<std::uint64_t>, std::int64_t> out;
  for_each_point(f.variables(), q.get_ui(), [&](const std::vector<Rational>& x) {
    std::vector<std::uint64_t> z;
    for (std::size_t i = 0; i < f.size(); ++i) z.push_back(residue(Rational(f[i].evaluate(x) * lift), q));
    ++out[z];
  });
  return out;
}

/// Random coefficient unit * p^v with v in [vmin, vmax].
inline Rational random_coefficient(std::mt19937_64& rng, std::uint64_t p, int vmin, int vmax) {
  std::uniform_int_distribution<int> val(vmin, vmax);
  std::uniform_int_distribution<long> small(1, 12);
  long a, b;
  do a = small(rng); while (a % static_cast<long>(p) == 0);
  do b = small(rng); while (b % static_cast<long>(p) == 0);
  if (rng() & 1) a = -a;
  const int v = val(rng);
  Rational c(a, b);
  c.canonicalize();
  return v >= 0 ? Rational(c * ipow(p, v)) : Rational(c / ipow(p, -v));
}

/// Random map with at most `terms` monomials per component of total degree
/// between 1 and `degree`, plus an optional constant.
inline padexp::PolyMap random_map(std::mt19937_64& rng, std::size_t n, std::size_t r, unsigned degree,
                                  std::uint64_t p, int vmin, int vmax, std::size_t terms = 3) {
  std::vector<padexp::Polynomial> comps;
  std::uniform_int_distribution<unsigned> deg(1, degree);
  std::uniform_int_distribution<std::size_t> count(1, terms);
  std::uniform_int_distribution<std::size_t> var(0, n - 1);
  for (std::size_t i = 0; i < r; ++i) {
    padexp::Polynomial g(n);
    const std::size_t k = count(rng);
    for (std::size_t t = 0; t < k; ++t) {
      padexp::Exponent e(n, 0);
      const unsigned d = deg(rng);
      for (unsigned s = 0; s < d; ++s) ++e[var(rng)];
      g.add_term(e, random_coefficient(rng, p, vmin, vmax));
    }
    if (rng() % 3 == 0) g.add_term(padexp::Exponent(n, 0), random_coefficient(rng, p, vmin, vmax));
    if (g.is_zero()) g = padexp::Polynomial::variable(n, 0);
    comps.push_back(std::move(g));
  }
  return padexp::PolyMap(n, std::move(comps));
}

/// y = u / p^level with u a random unit vector entry somewhere.
inline std::vector<Rational> random_y(std::mt19937_64& rng, std::size_t r, std::uint64_t p, unsigned level) {
  const Integer q = ipow(p, level);
  std::uniform_int_distribution<std::uint64_t> digit(0, q.get_ui() - 1);
  std::vector<Rational> y;
  for (std::size_t j = 0; j < r; ++j) y.emplace_back(Integer(static_cast<unsigned long>(digit(rng))), q);
  for (auto& v : y) v.canonicalize();
  return y;
}

}  // namespace oracle
