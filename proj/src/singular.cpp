#include "padexp/singular.hpp"

#include <algorithm>
#include <cmath>

#include "padexp/errors.hpp"
#include "padexp/expsum.hpp"

namespace padexp {

std::size_t DensityTable::index(std::span<const std::uint64_t> residues) const {
  std::size_t key = 0;
  for (std::uint64_t v : residues) key = key * modulus + v % modulus;
  return key;
}

std::vector<std::uint64_t> DensityTable::residues(std::size_t index) const {
  std::vector<std::uint64_t> out(components);
  for (std::size_t i = components; i-- > 0;) {
    out[i] = index % modulus;
    index /= modulus;
  }
  return out;
}

std::vector<Rational> DensityTable::target(std::size_t index) const {
  const Rational unit = rational_power(p, -shift);
  std::vector<Rational> out;
  for (std::uint64_t v : residues(index)) out.emplace_back(Rational(Integer(static_cast<unsigned long>(v))) * unit);
  return out;
}

Rational DensityTable::density(std::size_t index) const {
  const long exponent = static_cast<long>(level) * static_cast<long>(components) -
                        static_cast<long>(working_level()) * static_cast<long>(variables);
  return Rational(Integer(static_cast<long>(counts[index]))) * rational_power(p, exponent);
}

Integer DensityTable::total() const {
  Integer sum = 0;
  for (std::int64_t c : counts) sum += static_cast<long>(c);
  return sum;
}

namespace {

long double power_estimate(std::uint64_t p, long e) {
  return std::pow(static_cast<long double>(p), static_cast<long double>(e));
}

std::vector<unsigned> layout_degrees(const PolyMap& f) {
  std::vector<unsigned> degrees(f.variables(), 0);
  for (const auto& g : f.components())
    for (std::size_t j = 0; j < degrees.size(); ++j) degrees[j] = std::max(degrees[j], g.degree_in(j));
  return degrees;
}

std::vector<kernels::DenseModPoly> dense_components(const PolyMap& f, long shift, const Modulus& mod) {
  const auto degrees = layout_degrees(f);
  const Rational lift = rational_power(mod.p(), shift);
  std::vector<kernels::DenseModPoly> out;
  for (const auto& g : f.components()) out.push_back(kernels::DenseModPoly::from_polynomial(g, lift, mod, degrees));
  return out;
}

}  // namespace

DensityTable count_fibers(const PolyMap& f, int m, const PrimeContext& ctx, CountMethod method, Parallelism par) {
  if (m < 1) throw PreconditionError("fiber level must be >= 1");
  const long shift = f.denominator_exponent(ctx);
  const int level = m + static_cast<int>(shift);
  const auto budget = static_cast<long double>(ctx.naive_budget());
  const long double cells = power_estimate(ctx.p(), static_cast<long>(level) * static_cast<long>(f.size()));
  if (cells > budget)
    throw BudgetError("fiber table needs " + std::to_string(static_cast<unsigned long long>(cells)) +
                          " cells, budget is " + std::to_string(ctx.naive_budget()),
                      cells, budget);
  const long double points = power_estimate(ctx.p(), static_cast<long>(level) * static_cast<long>(f.variables()));
  if (method == CountMethod::Naive && points > budget)
    throw BudgetError("naive fiber count needs " + std::to_string(static_cast<unsigned long long>(points)) +
                          " points, budget is " + std::to_string(ctx.naive_budget()),
                      points, budget);
  const bool naive = method == CountMethod::Naive || (method == CountMethod::Auto && points <= budget);

  const Modulus mod(ctx.p(), level);
  DensityTable table{ctx.p(), m, shift, f.variables(), f.size(), mod.q(), {}};
  if (naive) {
    const ModularMap map(f, m, ctx);
    table.counts = par.serial() ? kernels::fiber_table_enumerate_serial(map)
                                : kernels::fiber_table_enumerate_omp(map, par.workers);
  } else {
    const auto comps = dense_components(f, shift, mod);
    table.counts = par.serial() ? kernels::fiber_table_descend_serial(comps)
                                : kernels::fiber_table_descend_omp(comps, par.workers);
  }
  return table;
}

FourierCheck fourier_check(const PolyMap& f, std::span<const Rational> y, int m, const PrimeContext& ctx,
                           Parallelism par) {
  if (y.size() != f.size()) throw PreconditionError("y must have one entry per component");
  for (const auto& yj : y) {
    const Valuation v = valuation(yj, ctx);
    if (!v.is_infinite() && v.value() < -m)
      throw PreconditionError("y has level " + std::to_string(-v.value()) + ", above the fiber level " +
                              std::to_string(m));
  }
  const std::size_t n = f.variables();
  FourierCheck out{eval_naive(EvalRequest(f, SchwartzBruhat::trivial(n), {y.begin(), y.end()}, ctx), par),
                   PhaseHistogram::zero(ctx.p()), PhaseHistogram::zero(ctx.p()), false};

  const DensityTable table = count_fibers(f, m, ctx, CountMethod::Auto, par);
  const int level = table.working_level();
  PhaseHistogram transform(ctx.p(), level, rational_power(ctx.p(), -static_cast<long>(level) * static_cast<long>(n)));
  for (std::size_t idx = 0; idx < table.cells(); ++idx) {
    const std::int64_t c = table.counts[idx];
    if (c == 0) continue;
    const auto z = table.target(idx);
    Rational pairing = 0;
    for (std::size_t j = 0; j < z.size(); ++j) pairing += y[j] * z[j];
    const PhaseFraction phase = fractional_part(pairing, ctx);
    const std::uint64_t lift = checked_power(ctx.p(), static_cast<std::uint64_t>(level - phase.level));
    transform.add(phase.numerator * lift, c);
  }
  out.transform = hist_reduce(transform);
  out.residual = hist_reduce(hist_subtract(out.integral, out.transform));
  out.zero = hist_is_zero(out.residual);
  return out;
}

std::vector<Valuation> elementary_orders(std::vector<std::vector<Rational>> a, const PrimeContext& ctx) {
  std::vector<Valuation> out;
  std::size_t cols = a.empty() ? 0 : a.front().size();
  std::vector<bool> col_live(cols, true);
  while (!a.empty() && out.size() < cols) {
    std::size_t pr = 0, pc = 0;
    Valuation best;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        if (!col_live[j] || a[i][j] == 0) continue;
        const Valuation v = valuation(a[i][j], ctx);
        if (v < best) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    if (best.is_infinite()) break;
    out.push_back(best);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == pr || a[i][pc] == 0) continue;
      const Rational factor = a[i][pc] / a[pr][pc];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= factor * a[pr][j];
    }
    a.erase(a.begin() + static_cast<std::ptrdiff_t>(pr));
    col_live[pc] = false;
  }
  const std::size_t rank_bound = std::min(out.size() + a.size(), cols);
  while (out.size() < rank_bound) out.push_back(Valuation::infinity());
  return out;
}

StabilizationReport stabilization_probe(const PolyMap& f, std::span<const Rational> z, int first, int last,
                                        const PrimeContext& ctx, Parallelism par) {
  if (first < 1 || last < first) throw PreconditionError("level window must satisfy 1 <= m0 <= m1");
  if (z.size() != f.size()) throw PreconditionError("z must have one entry per component");
  const long shift = f.denominator_exponent(ctx);
  for (const auto& zj : z) {
    const Valuation v = valuation(zj, ctx);
    if (!v.is_infinite() && v.value() < -shift) throw PreconditionError("z is not a residue of the scaled map");
  }
  const std::size_t n = f.variables();
  const std::size_t r = f.size();
  const Rational lift = rational_power(ctx.p(), shift);

  StabilizationReport out;
  out.first = first;
  out.last = last;
  std::vector<std::vector<std::uint64_t>> preimages;
  for (int m = first; m <= last; ++m) {
    const int level = m + static_cast<int>(shift);
    const Modulus mod(ctx.p(), level);
    const auto comps = dense_components(f, shift, mod);
    std::vector<std::uint64_t> target;
    for (const auto& zj : z) target.push_back(mod.reduce(Rational(zj * lift)));
    const std::size_t keep = m == last ? kJacobianSamples : 0;
    auto hit = par.serial() ? kernels::count_target_serial(comps, target, keep)
                            : kernels::count_target_omp(comps, target, keep, par.workers);
    out.counts.push_back(hit.count);
    out.densities.push_back(Rational(Integer(static_cast<long>(hit.count))) *
                            rational_power(ctx.p(), static_cast<long>(m) * static_cast<long>(r) -
                                                        static_cast<long>(level) * static_cast<long>(n)));
    if (m == last) preimages = std::move(hit.preimages);
  }

  std::size_t run = out.densities.size() - 1;
  while (run > 0 && out.densities[run - 1] == out.densities.back()) --run;
  out.constant_from = first + static_cast<int>(run);
  out.stable = last - out.constant_from >= 2;

  for (auto& x : preimages) {
    std::vector<Rational> point;
    for (std::uint64_t v : x) point.emplace_back(Integer(static_cast<unsigned long>(v)));
    std::vector<std::vector<Rational>> jacobian(r, std::vector<Rational>(n));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n; ++j) jacobian[i][j] = f[i].derivative(j).evaluate(point);
    JacobianSample sample{std::move(x), elementary_orders(std::move(jacobian), ctx), 0, 0};
    for (const auto& v : sample.orders) {
      if (!v.is_infinite() && v.value() < last) ++sample.rank;
      if (!v.is_infinite() && v.value() == 0) ++sample.unit_rank;
    }
    out.samples.push_back(std::move(sample));
  }
  out.full_rank = !out.samples.empty() &&
                  std::all_of(out.samples.begin(), out.samples.end(),
                              [r](const JacobianSample& s) { return s.rank == static_cast<int>(r); });
  return out;
}

}  // namespace padexp
