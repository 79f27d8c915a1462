#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "padexp/errors.hpp"
#include "padexp/expsum.hpp"

using namespace padexp;

namespace {

std::complex<long double> complex_value(const PhaseHistogram& h) {
  std::complex<long double> sum = 0;
  for (const auto& [k, c] : h.counts()) {
    const long double angle = 2 * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                              static_cast<long double>(h.modulus());
    sum += static_cast<long double>(c) * std::complex<long double>(std::cos(angle), std::sin(angle));
  }
  return sum * static_cast<long double>(h.scale().get_d());
}

EvalRequest request(std::string_view map, std::vector<Rational> y, std::uint64_t p, std::string_view phi = "triv") {
  const auto f = parse_polymap(map, infer_variable_count(map));
  return EvalRequest(f, SchwartzBruhat::parse(phi, f.variables()), std::move(y), PrimeContext(p));
}

Rational q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("naive evaluation examples") {
  const auto h = eval_naive(request("x1^2", {q(1, 3)}, 3));
  CHECK(h == PhaseHistogram(3, 1, q(1, 3), {{0, 1}, {1, 2}}));
  CHECK(hist_magnitude(h).value == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));

  for (std::uint64_t p : {3, 5})
    for (int m = 1; m <= 3; ++m) {
      const long pm = static_cast<long>(std::pow(p, m));
      for (long u = 1; u < pm; ++u) {
        if (u % static_cast<long>(p) == 0) continue;
        CHECK(hist_is_zero(eval_naive(request("x1", {q(u, pm)}, p))));
      }
    }

  const PhaseHistogram one(5, 0, 1, {{0, 1}});
  CHECK(eval_naive(request("3*x1^3*x2 - x2^2 + 4; x1", {q(7), q(2, 3)}, 5)) == one);
  CHECK(eval_recursive(request("3*x1^3*x2 - x2^2 + 4; x1", {q(7), q(2, 3)}, 5)).value == one);
}

TEST_CASE("recursive evaluation examples") {
  const auto req = request("x1^2", {q(1, 9)}, 3);
  const auto r = eval_recursive(req);
  CHECK(r.value == eval_naive(req));
  CHECK(hist_magnitude(r.value).value == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(r.stats.p2 > 0);

  const auto lin = eval_recursive(request("x1", {q(1, 5)}, 5));
  CHECK(hist_is_zero(lin.value));
  CHECK(lin.stats.p2 == 1);
  CHECK(lin.stats.splits == 0);
  CHECK(lin.stats.leaves == 0);

  const auto c = eval_recursive(request("5", {q(1, 9)}, 3));
  CHECK(c.stats.p1 == 1);
  CHECK(c.stats.leaves == 0);
  CHECK(c.value == hist_reduce(PhaseHistogram(3, 2, 1, {{5, 1}})));
}

TEST_CASE("recursive evaluation equals enumeration") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 60; ++i) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5}[rng() % 3];
    const std::size_t n = 1 + rng() % 2;
    const auto f = oracle::random_map(rng, n, 1 + rng() % 2, 4, p, -2, 2);
    const auto y = oracle::random_y(rng, f.size(), p, 1 + static_cast<unsigned>(rng() % 3));
    const EvalRequest req(f, SchwartzBruhat::trivial(n), y, PrimeContext(p, 1u << 24));
    CHECK(eval_recursive(req).value == eval_naive(req));
  }
}

TEST_CASE("evaluation agrees with direct complex summation") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 40; ++i) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5}[rng() % 3];
    const std::size_t n = 1 + rng() % 2;
    const auto f = oracle::random_map(rng, n, 1 + rng() % 2, 3, p, -1, 1);
    const unsigned m = 1 + static_cast<unsigned>(rng() % 2);
    const auto y = oracle::random_y(rng, f.size(), p, m);
    const PrimeContext ctx(p);
    const EvalRequest req(f, SchwartzBruhat::trivial(n), y, ctx);
    const unsigned level = static_cast<unsigned>(req.level() + f.denominator_exponent(ctx));
    if (std::pow(p, level * n) > 20000) continue;
    const auto expected = oracle::integral(f, y, p, std::max(level, 1u));
    CHECK(std::abs(complex_value(eval_recursive(req).value) - expected) < 1e-12L);
  }
}

TEST_CASE("linearity in phi") {
  const auto f = parse_polymap("x1^3 + x1*x2; x2^2", 2);
  const PrimeContext ctx(3);
  const std::vector<Rational> y{q(2, 9), q(1, 3)};
  const SchwartzBruhat both(2, {Ball{{q(1), q(0)}, 1, q(2)}, Ball{{q(0), q(1, 3)}, -1, q(-5, 7)}});
  const SchwartzBruhat first(2, {both.terms()[0]});
  const SchwartzBruhat second(2, {both.terms()[1]});
  const auto a = eval_recursive(EvalRequest(f, first, y, ctx)).value;
  const auto b = eval_recursive(EvalRequest(f, second, y, ctx)).value;
  const auto ab = eval_recursive(EvalRequest(f, both, y, ctx)).value;
  CHECK(ab == hist_reduce(hist_add(a, b)));
  CHECK(eval_naive(EvalRequest(f, both, y, ctx)) == ab);
}

TEST_CASE("balls larger than the unit ball rescale the argument") {
  // x = t/3 on 3^{-1} Z_3: E_phi(y) = 3 E(y/9)
  const PrimeContext ctx(3);
  const auto f = parse_polymap("x1^2", 1);
  const auto big = eval_recursive(EvalRequest(f, SchwartzBruhat::parse("0:-1", 1), {q(1, 3)}, ctx)).value;
  const auto unit = eval_recursive(EvalRequest(f, SchwartzBruhat::trivial(1), {q(1, 27)}, ctx)).value;
  CHECK(big == hist_reduce(unit.scaled(3)));
}

TEST_CASE("translation covariance") {
  std::mt19937_64 rng(43);
  const PrimeContext ctx(5);
  for (int i = 0; i < 20; ++i) {
    const auto f = oracle::random_map(rng, 2, 1, 3, 5, 0, 1);
    const Rational c = oracle::random_coefficient(rng, 5, -2, 1);
    const PolyMap g(2, {f[0] + Polynomial::constant(2, c)});
    const auto y = oracle::random_y(rng, 1, 5, 2);
    const auto ef = complex_value(eval_recursive(EvalRequest(f, SchwartzBruhat::trivial(2), y, ctx)).value);
    const auto eg = complex_value(eval_recursive(EvalRequest(g, SchwartzBruhat::trivial(2), y, ctx)).value);
    CHECK(std::abs(eg - oracle::psi(Rational(y[0] * c), 5) * ef) < 1e-12L);
  }
}

TEST_CASE("magnitude never exceeds the mass of phi") {
  std::mt19937_64 rng(44);
  const PrimeContext ctx(3);
  const auto phi = SchwartzBruhat::parse("1:1:2; 0:0:-1", 1);
  for (int i = 0; i < 30; ++i) {
    const auto f = oracle::random_map(rng, 1, 1, 4, 3, -1, 2);
    const auto y = oracle::random_y(rng, 1, 3, 1 + static_cast<unsigned>(rng() % 3));
    const auto mag = hist_magnitude(eval_recursive(EvalRequest(f, phi, y, ctx)).value);
    CHECK(mag.value <= phi.abs_mass(ctx).get_d() + mag.error);
  }
}

TEST_CASE("serial and parallel evaluation agree") {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 20; ++i) {
    const auto f = oracle::random_map(rng, 2, 2, 4, 3, -1, 2);
    const auto y = oracle::random_y(rng, 2, 3, 3);
    const EvalRequest req(f, SchwartzBruhat::trivial(2), y, PrimeContext(3, 1u << 24));
    const auto serial = eval_recursive(req, Parallelism{1});
    const auto wide = eval_recursive(req, Parallelism{8});
    CHECK(serial.value == wide.value);
    CHECK(serial.stats == wide.stats);
    CHECK(eval_naive(req, Parallelism{1}) == eval_naive(req, Parallelism{4}));
  }
}

TEST_CASE("prepared integrals sweep directions") {
  const PrimeContext ctx(5);
  const auto f = parse_polymap("x1^3 + 2*x2; x1*x2", 2);
  const PreparedIntegral prep(f, SchwartzBruhat::trivial(2), 2, ctx);
  for (std::uint64_t u0 : {1, 7, 24})
    for (std::uint64_t u1 : {0, 5, 13}) {
      const std::vector<std::uint64_t> u{u0, u1};
      const std::vector<Rational> y{q(static_cast<long>(u0), 25), q(static_cast<long>(u1), 25)};
      CHECK(prep.evaluate_direction(u).value == eval_naive(EvalRequest(f, SchwartzBruhat::trivial(2), y, ctx)));
    }
  CHECK_THROWS_AS(prep.evaluate(std::vector<Rational>{q(1, 125), q(0)}), PreconditionError);
}

TEST_CASE("series evaluation") {
  const PrimeContext ctx(3);
  const RestrictedSeries geometric{1, [](const Exponent& e) { return rational_power(3, e[0]); },
                                   [](unsigned d) { return static_cast<long>(d); }};
  const std::vector<RestrictedSeries> s{geometric};
  const std::vector<Rational> y{q(1, 3)};
  const auto r = eval_series(s, SchwartzBruhat::trivial(1), y, ctx);
  // oracle: the series summed to degree 12 and enumerated over x mod 3
  Polynomial partial(1);
  for (unsigned i = 0; i <= 12; ++i) partial.add_term({i}, rational_power(3, i));
  const auto expected = oracle::integral(PolyMap(1, {partial}), y, 3, 1);
  CHECK(std::abs(complex_value(r.value) - expected) < 1e-12L);
  CHECK(r.value == PhaseHistogram(3, 1, 1, {{1, 1}}));

  const RestrictedSeries one{1, [](const Exponent& e) { return Rational(e[0] == 0 ? 1 : 0); },
                             [](unsigned d) { return d == 0 ? 0L : 100L; }};
  const std::vector<RestrictedSeries> ones{one};
  const std::vector<Rational> y2{q(4, 25)};
  CHECK(eval_series(ones, SchwartzBruhat::trivial(1), y2, PrimeContext(5)).value ==
        PhaseHistogram(5, 2, 1, {{4, 1}}));

  const RestrictedSeries flat{1, [](const Exponent&) { return Rational(1); }, [](unsigned) { return 0L; }};
  const std::vector<RestrictedSeries> flats{flat};
  CHECK_THROWS_AS(eval_series(flats, SchwartzBruhat::trivial(1), y, ctx), PreconditionError);
}

TEST_CASE("request validation and budget") {
  CHECK_THROWS_AS(request("x1; x1^2", {q(1, 3)}, 3), PreconditionError);
  CHECK_THROWS_AS(EvalRequest(parse_polymap("x1", 1), SchwartzBruhat::trivial(2), {q(1)}, PrimeContext(3)),
                  PreconditionError);
  const auto req = request("x1/9 + x2", {q(1, 3)}, 3);
  CHECK(req.level() == 1);
  CHECK(req.precision() == 3);
  const EvalRequest tight(parse_polymap("x1^2 + x2^2", 2), SchwartzBruhat::trivial(2), {q(1, 81)},
                          PrimeContext(3, 1000));
  CHECK_THROWS_AS(eval_naive(tight), BudgetError);
  CHECK_NOTHROW(eval_recursive(tight));
}
