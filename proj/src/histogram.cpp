#include "padexp/histogram.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "padexp/errors.hpp"
#include "padexp/modular.hpp"

namespace padexp {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out))
    throw BudgetError("histogram count overflow", 0, 0);
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw BudgetError("histogram count overflow", 0, 0);
  return out;
}

std::int64_t to_int64(const Integer& x) {
  if (!x.fits_slong_p()) throw BudgetError("histogram scale multiplier overflow", 0, 0);
  return x.get_si();
}

}  // namespace

PhaseHistogram::PhaseHistogram(std::uint64_t p, int level, Rational scale)
    : p_(p), level_(level), modulus_(checked_power(p, static_cast<std::uint64_t>(level))),
      scale_(std::move(scale)) {
  if (level < 0) throw PreconditionError("histogram level must be >= 0");
  scale_.canonicalize();
}

PhaseHistogram::PhaseHistogram(std::uint64_t p, int level, Rational scale, Counts counts)
    : PhaseHistogram(p, level, std::move(scale)) {
  for (const auto& [k, c] : counts) add(k, c);
}

void PhaseHistogram::add(std::uint64_t k, std::int64_t w) {
  if (k >= modulus_) throw PreconditionError("phase class out of range for histogram level");
  if (w == 0) return;
  auto [it, inserted] = counts_.try_emplace(k, w);
  if (!inserted) {
    it->second = checked_add(it->second, w);
    if (it->second == 0) counts_.erase(it);
  }
}

PhaseHistogram PhaseHistogram::lifted_to(int level) const {
  if (level < level_) throw PreconditionError("cannot lift a histogram to a coarser level");
  PhaseHistogram out(p_, level, scale_);
  const std::uint64_t factor = checked_power(p_, static_cast<std::uint64_t>(level - level_));
  for (const auto& [k, c] : counts_) out.counts_.emplace(k * factor, c);
  return out;
}

PhaseHistogram PhaseHistogram::scaled(const Rational& factor) const {
  PhaseHistogram out = *this;
  out.scale_ *= factor;
  return out;
}

bool operator==(const PhaseHistogram& a, const PhaseHistogram& b) {
  return a.p_ == b.p_ && a.level_ == b.level_ && a.scale_ == b.scale_ && a.counts_ == b.counts_;
}

PhaseHistogram hist_accumulate(const PhaseHistogram& h, const PhaseFraction& phase, std::int64_t w) {
  const int level = std::max(h.level(), phase.level);
  PhaseHistogram out = h.lifted_to(level);
  const std::uint64_t factor = checked_power(h.prime(), static_cast<std::uint64_t>(level - phase.level));
  out.add(phase.numerator * factor, w);
  return out;
}

PhaseHistogram hist_reduce(const PhaseHistogram& h) {
  const std::uint64_t p = h.prime();
  if (h.scale() == 0 || h.counts().empty()) return PhaseHistogram::zero(p);

  PhaseHistogram::Counts counts = h.counts();
  int level = h.level();
  while (level > 0) {
    const std::uint64_t period = checked_power(p, static_cast<std::uint64_t>(level - 1));
    const std::uint64_t top = (p - 1) * period;
    std::vector<std::pair<std::uint64_t, std::int64_t>> pivots(counts.lower_bound(top), counts.end());
    for (const auto& [k, v] : pivots) {
      const std::uint64_t j = k - top;
      for (std::uint64_t t = 0; t < p; ++t) {
        auto& slot = counts[j + t * period];
        slot = checked_add(slot, -v);
      }
    }
    std::erase_if(counts, [](const auto& kv) { return kv.second == 0; });
    if (counts.empty()) return PhaseHistogram::zero(p);

    const bool periodic = std::all_of(counts.begin(), counts.end(),
                                      [p](const auto& kv) { return kv.first % p == 0; });
    if (!periodic) break;
    PhaseHistogram::Counts coarse;
    for (const auto& [k, v] : counts) coarse.emplace(k / p, v);
    counts.swap(coarse);
    --level;
  }

  std::int64_t g = 0;
  for (const auto& [k, v] : counts) g = std::gcd(g, v < 0 ? -v : v);
  Rational scale = h.scale() * Rational(Integer(static_cast<long>(g)));
  if (scale < 0) {
    g = -g;
    scale = -scale;
  }
  for (auto& [k, v] : counts) v /= g;
  PhaseHistogram out(p, level, scale);
  for (const auto& [k, v] : counts) out.add(k, v);
  return out;
}

bool hist_is_zero(const PhaseHistogram& h) {
  return hist_reduce(h).counts().empty();
}

PhaseHistogram hist_add(const PhaseHistogram& a, const PhaseHistogram& b) {
  if (a.prime() != b.prime()) throw PreconditionError("histograms over different primes");
  if (b.scale() == 0 || b.counts().empty()) return a;
  if (a.scale() == 0 || a.counts().empty()) return b;

  const int level = std::max(a.level(), b.level());
  const PhaseHistogram la = a.lifted_to(level);
  const PhaseHistogram lb = b.lifted_to(level);

  Integer num_gcd, den_lcm;
  mpz_gcd(num_gcd.get_mpz_t(), a.scale().get_num_mpz_t(), b.scale().get_num_mpz_t());
  mpz_lcm(den_lcm.get_mpz_t(), a.scale().get_den_mpz_t(), b.scale().get_den_mpz_t());
  Rational common(num_gcd, den_lcm);
  common.canonicalize();
  const Rational ma = a.scale() / common;
  const Rational mb = b.scale() / common;
  const std::int64_t fa = to_int64(ma.get_num());
  const std::int64_t fb = to_int64(mb.get_num());

  PhaseHistogram out(a.prime(), level, common);
  for (const auto& [k, c] : la.counts()) out.add(k, checked_mul(c, fa));
  for (const auto& [k, c] : lb.counts()) out.add(k, checked_mul(c, fb));
  return out;
}

PhaseHistogram hist_subtract(const PhaseHistogram& a, const PhaseHistogram& b) {
  return hist_add(a, b.scaled(-1));
}

Magnitude hist_magnitude(const PhaseHistogram& h) {
  if (h.scale() == 0 || h.counts().empty()) return {};

  // Neumaier-compensated sums of the real and imaginary parts.
  double re = 0, re_c = 0, im = 0, im_c = 0, abs_sum = 0;
  auto accumulate = [](double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  };

  const std::uint64_t q = h.modulus();
  for (const auto& [k, c] : h.counts()) {
    // Fold k into (-q/2, q/2] exactly so the angle lies in (-pi, pi].
    const double signed_k = k > q / 2 ? -static_cast<double>(q - k) : static_cast<double>(k);
    const double angle = 2.0 * std::numbers::pi * (signed_k / static_cast<double>(q));
    const double weight = static_cast<double>(c);
    accumulate(re, re_c, weight * std::cos(angle));
    accumulate(im, im_c, weight * std::sin(angle));
    abs_sum += std::fabs(weight);
  }
  const double s = std::fabs(h.scale().get_d());
  Magnitude out;
  out.value = s * std::hypot(re + re_c, im + im_c);
  out.error = s * abs_sum * DBL_EPSILON * Magnitude::kMagnitudeErrorConstant;
  return out;
}

}  // namespace padexp
