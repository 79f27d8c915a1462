#include "padexp/decay.hpp"

#include <omp.h>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "padexp/errors.hpp"
#include "padexp/expsum.hpp"

namespace padexp {

Strategy Strategy::parse(std::string_view text, std::uint64_t seed) {
  if (text == "exhaustive") return exhaustive();
  constexpr std::string_view prefix = "sample:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto digits = text.substr(prefix.size());
    std::uint64_t count = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
    if (ec == std::errc() && end == digits.data() + digits.size() && count > 0) return sample(count, seed);
    throw ParseError("bad sample count in strategy '" + std::string(text) + "'", prefix.size());
  }
  throw ParseError("unknown strategy '" + std::string(text) + "' (exhaustive or sample:N)", 0);
}

std::string Strategy::to_string() const {
  return kind == Kind::Exhaustive ? "exhaustive" : "sample:" + std::to_string(count);
}

namespace {

struct Best {
  double value = -1.0;
  double error = 0.0;
  std::vector<std::uint64_t> u;
  bool all_zero = true;
  std::uint64_t seen = 0;

  void offer(double v, double e, const std::vector<std::uint64_t>& dir) {
    if (v > value || (v == value && dir < u)) {
      value = v;
      error = e;
      u = dir;
    }
  }
  void merge(const Best& o) {
    if (o.seen == 0) return;
    offer(o.value, o.error, o.u);
    all_zero = all_zero && o.all_zero;
    seen += o.seen;
  }
};

bool primitive(const std::vector<std::uint64_t>& u, std::uint64_t p) {
  for (std::uint64_t x : u)
    if (x % p != 0) return true;
  return false;
}

// Direction i of the exhaustive sweep, component 1 most significant so that
// index order is lexicographic order.
void decode(std::uint64_t i, std::uint64_t q, std::vector<std::uint64_t>& u) {
  for (std::size_t j = u.size(); j-- > 0;) {
    u[j] = i % q;
    i /= q;
  }
}

template <class Direction>
Best scan(std::uint64_t count, std::size_t r, std::uint64_t p, const PreparedIntegral& prep, Parallelism par,
          Direction direction) {
  const Parallelism inner{1};
  auto visit = [&](std::uint64_t i, std::vector<std::uint64_t>& u, Best& best) {
    direction(i, u);
    if (!primitive(u, p)) return;
    const auto result = prep.evaluate_direction(u, inner);
    const Magnitude mag = hist_magnitude(result.value);
    best.all_zero = best.all_zero && hist_is_zero(result.value);
    ++best.seen;
    best.offer(mag.value, mag.error, u);
  };
  Best best;
  if (par.serial()) {
    std::vector<std::uint64_t> u(r);
    for (std::uint64_t i = 0; i < count; ++i) visit(i, u, best);
    return best;
  }
  const std::int64_t total = static_cast<std::int64_t>(count);
#pragma omp parallel num_threads(par.workers > 0 ? par.workers : omp_get_max_threads())
  {
    Best local;
    std::vector<std::uint64_t> u(r);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < total; ++i) visit(static_cast<std::uint64_t>(i), u, local);
#pragma omp critical(padexp_decay_merge)
    best.merge(local);
  }
  return best;
}

}  // namespace

DecayRecord sup_at_level(const PolyMap& f, const SchwartzBruhat& phi, int m, const Strategy& strategy,
                         const PrimeContext& ctx, Parallelism par) {
  if (m < 1) throw PreconditionError("decay levels start at 1");
  const std::size_t r = f.size();
  const std::uint64_t p = ctx.p();
  const PreparedIntegral prep(f, phi, m, ctx);
  const std::uint64_t q = checked_power(p, static_cast<std::uint64_t>(m));

  DecayRecord record;
  record.level = m;
  record.exhaustive = strategy.kind == Strategy::Kind::Exhaustive;
  Best best;
  if (record.exhaustive) {
    const long double cells = std::pow(static_cast<long double>(p), static_cast<long double>(m) * r);
    const auto budget = static_cast<long double>(ctx.naive_budget());
    if (cells > budget)
      throw BudgetError("exhaustive sweep at level " + std::to_string(m) + " needs " +
                            std::to_string(static_cast<unsigned long long>(cells)) + " directions, budget is " +
                            std::to_string(ctx.naive_budget()) + "; use a sample strategy",
                        cells, budget);
    best = scan(checked_power(q, r), r, p, prep, par,
                [q](std::uint64_t i, std::vector<std::uint64_t>& u) { decode(i, q, u); });
  } else {
    if (strategy.count == 0) throw PreconditionError("sample strategy needs at least one direction");
    std::mt19937_64 gen(strategy.seed);
    std::uniform_int_distribution<std::uint64_t> digit(0, q - 1);
    std::vector<std::vector<std::uint64_t>> sample;
    while (sample.size() < strategy.count) {
      std::vector<std::uint64_t> u(r);
      for (auto& x : u) x = digit(gen);
      if (primitive(u, p)) sample.push_back(std::move(u));
    }
    best = scan(sample.size(), r, p, prep, par,
                [&sample](std::uint64_t i, std::vector<std::uint64_t>& u) { u = sample[i]; });
  }
  record.sup = best.value;
  record.sup_error = best.error;
  record.argmax = best.u;
  record.exact_zero = best.all_zero;
  record.directions = best.seen;
  return record;
}

double envelope_ratio(const DecayRecord& record, const FitContext& fc) {
  if (fc.d_f == 0) throw PreconditionError("the envelope needs d(f) >= 1");
  const double m = record.level;
  return record.sup * std::pow(static_cast<double>(fc.p), m / fc.d_f) /
         std::pow(m, static_cast<double>(fc.variables) - 1.0);
}

FitResult fit_alpha(const std::vector<DecayRecord>& records, const FitContext& fc) {
  if (records.size() < 2) throw FitError(FitError::Kind::InsufficientData, "need at least two levels to fit");
  FitResult fit;
  fit.window_first = records.front().level;
  fit.window_last = records.front().level;
  std::vector<double> xs, ys;
  const double log_p = std::log(static_cast<double>(fc.p));
  for (const auto& rec : records) {
    fit.window_first = std::min(fit.window_first, rec.level);
    fit.window_last = std::max(fit.window_last, rec.level);
    if (rec.exact_zero || rec.sup <= 0.0) {
      fit.excluded.push_back(rec.level);
      continue;
    }
    xs.push_back(rec.level);
    ys.push_back(std::log(rec.sup) / log_p);
  }
  if (xs.empty()) throw FitError(FitError::Kind::ExactVanishing, "exact vanishing: every sup is exactly zero");
  if (xs.size() < 2) throw FitError(FitError::Kind::InsufficientData, "fewer than two nonzero levels");

  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw FitError(FitError::Kind::InsufficientData, "all usable records share one level");
  fit.alpha_hat = sxy / sxx;
  fit.intercept = my - fit.alpha_hat * mx;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.alpha_hat * xs[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss);

  if (fc.d_f > 0) {
    fit.bound_exponent = -1.0 / fc.d_f;
    double c = 0;
    for (const auto& rec : records) c = std::max(c, envelope_ratio(rec, fc));
    fit.c_hat = c;
  } else {
    fit.warnings.push_back("d(f) = 0: f is constant and has no degree bound");
  }
  if (!fc.affinely_independent)
    fit.warnings.push_back("hypothesis fails: 1, f_1, ..., f_r are affinely dependent");
  if (!fit.excluded.empty())
    fit.warnings.push_back(std::to_string(fit.excluded.size()) + " level(s) vanish exactly and were left out of the fit");
  return fit;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "CONSISTENT";
    case Verdict::Inconsistent: return "INCONSISTENT";
    case Verdict::Vacuous: return "VACUOUS";
    case Verdict::Insufficient: return "INSUFFICIENT";
  }
  return "?";
}

BoundReport bound_report(const PolyMap& f, const std::vector<DecayRecord>& records, const PrimeContext& ctx,
                         double epsilon) {
  const DegreeData dd = degree_data(f, ctx);
  BoundReport report;
  report.d_f = dd.d_max;
  report.e_orders = dd.e_orders;
  report.affinely_independent = check_affine_independence(f);
  report.epsilon = epsilon;
  if (!report.affinely_independent)
    report.banner = "HYPOTHESIS FAILED: 1, f_1, ..., f_r are affinely dependent; the degree bound is not claimed";
  const FitContext fc{ctx.p(), f.variables(), dd.d_max, report.affinely_independent};

  std::optional<double> running;
  for (const auto& rec : records) {
    BoundRow row{rec.level, rec.sup, {}, {}};
    if (fc.d_f > 0) {
      row.ratio = envelope_ratio(rec, fc);
      running = std::max(running.value_or(0.0), *row.ratio);
      row.c_running = running;
    }
    report.rows.push_back(row);
  }
  report.c_hat = running;

  const bool all_zero =
      !records.empty() && std::all_of(records.begin(), records.end(), [](const DecayRecord& r) { return r.exact_zero; });
  if (all_zero) {
    report.verdict = Verdict::Vacuous;
    report.statement = "every sup vanishes exactly; the bound holds with any constant";
    return report;
  }
  try {
    report.fit = fit_alpha(records, fc);
  } catch (const FitError& e) {
    report.verdict = Verdict::Insufficient;
    report.statement = e.what();
    return report;
  }
  if (fc.d_f == 0) {
    report.verdict = Verdict::Inconsistent;
    report.statement = "f is constant; no decay is possible";
    return report;
  }
  const double bound = -1.0 / fc.d_f;
  report.verdict = report.fit->alpha_hat <= bound + epsilon ? Verdict::Consistent : Verdict::Inconsistent;
  std::ostringstream s;
  s.precision(12);
  s << "all " << records.size() << " levels satisfy sup <= c * m^" << (f.variables() - 1) << " * p^(-m/" << fc.d_f
    << ") with c = c_hat = " << *report.c_hat;
  report.statement = s.str();
  return report;
}

}  // namespace padexp
