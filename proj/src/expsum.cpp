#include "padexp/expsum.hpp"

#include <cmath>

#include "padexp/errors.hpp"

namespace padexp {

int y_level(std::span<const Rational> y, const PrimeContext& ctx) {
  long m = 0;
  for (const auto& yj : y) {
    const Valuation v = valuation(yj, ctx);
    if (!v.is_infinite()) m = std::max(m, -v.value());
  }
  return static_cast<int>(m);
}

EvalRequest::EvalRequest(PolyMap f, SchwartzBruhat phi, std::vector<Rational> y, PrimeContext ctx)
    : f_(std::move(f)), phi_(std::move(phi)), y_(std::move(y)), ctx_(ctx) {
  if (y_.size() != f_.size())
    throw PreconditionError("y has " + std::to_string(y_.size()) + " components but the map has " +
                            std::to_string(f_.size()));
  if (phi_.variables() != f_.variables()) throw PreconditionError("phi and f have different variable counts");
  level_ = y_level(y_, ctx_);
  precision_ = level_;
  for (const auto& ball : phi_.terms()) {
    const long b = shift_substitute(f_, ball.center, ball.radius_exponent, ctx_).denominator_exponent(ctx_);
    precision_ = std::max(precision_, level_ + static_cast<int>(b));
  }
}

namespace {

Rational ball_scale(const Ball& ball, std::size_t n, int level, const PrimeContext& ctx) {
  const long dim = static_cast<long>(n);
  return ball.weight * rational_power(ctx.p(), -ball.radius_exponent * dim) * rational_power(ctx.p(), -level * dim);
}

}  // namespace

PhaseHistogram eval_naive(const EvalRequest& req, Parallelism par) {
  const auto& ctx = req.context();
  const std::size_t n = req.map().variables();
  const int m = req.level();
  const Rational lift = rational_power(ctx.p(), m);
  PhaseHistogram total = PhaseHistogram::zero(ctx.p());

  for (const auto& ball : req.phi().terms()) {
    const PolyMap local = shift_substitute(req.map(), ball.center, ball.radius_exponent, ctx);
    const ModularMap map(local, m, ctx);
    const int level = map.working_level();
    const long double points = std::pow(static_cast<long double>(ctx.p()), static_cast<long double>(level) * n);
    if (points > static_cast<long double>(ctx.naive_budget()))
      throw BudgetError("naive enumeration needs " + std::to_string(ctx.p()) + "^" +
                            std::to_string(static_cast<long>(level) * static_cast<long>(n)) + " points, budget is " +
                            std::to_string(ctx.naive_budget()),
                        points, static_cast<long double>(ctx.naive_budget()));

    const Modulus mod(ctx.p(), level);
    std::vector<std::uint64_t> weights;
    for (const auto& yj : req.y()) weights.push_back(mod.reduce(Rational(yj * lift)));

    const auto counts = par.serial() ? kernels::enumerate_phases_serial(map, weights)
                                     : kernels::enumerate_phases_omp(map, weights, par.workers);
    total = hist_add(total, counts.to_histogram(ctx.p(), level, ball_scale(ball, n, level, ctx)));
  }
  return hist_reduce(total);
}

PreparedIntegral::PreparedIntegral(const PolyMap& f, const SchwartzBruhat& phi, int m, const PrimeContext& ctx)
    : p_(ctx.p()), level_(m), r_(f.size()) {
  if (m < 0) throw PreconditionError("level must be >= 0");
  if (phi.variables() != f.variables()) throw PreconditionError("phi and f have different variable counts");
  const std::size_t n = f.variables();
  for (const auto& ball : phi.terms()) {
    const PolyMap local = shift_substitute(f, ball.center, ball.radius_exponent, ctx);
    const long b = local.denominator_exponent(ctx);
    const int precision = m + static_cast<int>(b);
    Modulus mod(ctx.p(), precision);
    // Counts are in units of p^{-precision * n}; they must fit in 62 bits.
    checked_power(ctx.p(), static_cast<std::uint64_t>(precision) * n);

    std::vector<unsigned> degrees(n, 0);
    for (const auto& g : local.components())
      for (std::size_t j = 0; j < n; ++j) degrees[j] = std::max(degrees[j], g.degree_in(j));
    PreparedBall prepared{mod, ball_scale(ball, n, precision, ctx), {}};
    const Rational lift = rational_power(ctx.p(), b);
    for (const auto& g : local.components())
      prepared.components.push_back(kernels::DenseModPoly::from_polynomial(g, lift, mod, degrees));
    balls_.push_back(std::move(prepared));
  }
}

EvalResult PreparedIntegral::evaluate(std::span<const Rational> y, Parallelism par) const {
  if (y.size() != r_) throw PreconditionError("y has the wrong number of components");
  const PrimeContext ctx(p_);
  if (y_level(y, ctx) > level_)
    throw PreconditionError("y has level " + std::to_string(y_level(y, ctx)) + " above the prepared level " +
                            std::to_string(level_));
  const Rational lift = rational_power(p_, level_);
  std::vector<std::vector<std::uint64_t>> weights;
  for (const auto& ball : balls_) {
    std::vector<std::uint64_t> w;
    for (const auto& yj : y) w.push_back(ball.mod.reduce(Rational(yj * lift)));
    weights.push_back(std::move(w));
  }
  return run(weights, par);
}

EvalResult PreparedIntegral::evaluate_direction(std::span<const std::uint64_t> u, Parallelism par) const {
  if (u.size() != r_) throw PreconditionError("direction has the wrong number of components");
  std::vector<std::vector<std::uint64_t>> weights;
  for (const auto& ball : balls_) {
    std::vector<std::uint64_t> w;
    for (std::uint64_t uj : u) w.push_back(uj % ball.mod.q());
    weights.push_back(std::move(w));
  }
  return run(weights, par);
}

EvalResult PreparedIntegral::run(const std::vector<std::vector<std::uint64_t>>& weights, Parallelism par) const {
  EvalResult out{PhaseHistogram::zero(p_), {}};
  for (std::size_t b = 0; b < balls_.size(); ++b) {
    const auto& ball = balls_[b];
    kernels::DenseModPoly g = ball.components.front().zero_like();
    for (std::size_t j = 0; j < r_; ++j) g.add_scaled(weights[b][j], ball.components[j]);
    const auto descent = par.serial() ? kernels::descend_serial(g) : kernels::descend_omp(g, par.workers);
    out.value = hist_add(out.value, descent.counts.to_histogram(p_, ball.mod.level(), ball.scale));
    out.stats += descent.stats;
  }
  out.value = hist_reduce(out.value);
  return out;
}

EvalResult eval_recursive(const EvalRequest& req, Parallelism par) {
  return PreparedIntegral(req.map(), req.phi(), req.level(), req.context()).evaluate(req.y(), par);
}

EvalResult eval_series(std::span<const RestrictedSeries> series, const SchwartzBruhat& phi,
                       std::span<const Rational> y, const PrimeContext& ctx, Parallelism par) {
  if (series.empty()) throw PreconditionError("no series given");
  const std::size_t n = series.front().variables;
  long b = 0;
  for (const auto& s : series) {
    if (s.variables != n) throw PreconditionError("series have different variable counts");
    if (!s.floor) throw PreconditionError("series without a valuation floor");
    b = std::max(b, -s.floor(0));
  }
  const int level = y_level(y, ctx) + static_cast<int>(b);
  std::vector<Polynomial> components;
  for (const auto& s : series) components.push_back(series_truncate(s, level, ctx));
  const EvalRequest req(PolyMap(n, std::move(components)), phi, std::vector<Rational>(y.begin(), y.end()), ctx);
  return eval_recursive(req, par);
}

}  // namespace padexp
