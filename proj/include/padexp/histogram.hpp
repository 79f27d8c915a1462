#pragma once

#include <cstdint>
#include <map>

#include "padexp/padic.hpp"

namespace padexp {

/// Exact element of Q(zeta_{p^M}) written as scale * sum_k counts[k] * zeta^k,
/// zeta = exp(2 pi i / p^M). Counts are sparse and ordered by class.
///
/// Canonical (reduced) form, as produced by hist_reduce:
///  - within every orbit {j + t p^{M-1} : 0 <= t < p} the class with
///    t = p - 1 has count 0, so the remaining classes form a Z-basis;
///  - the level is minimal (not every class is divisible by p);
///  - the counts are coprime, the gcd being folded into the scale, and the
///    scale is positive;
///  - zero is level 0, no counts, scale 0.
/// Two reduced histograms are equal iff they represent the same number.
class PhaseHistogram {
 public:
  using Counts = std::map<std::uint64_t, std::int64_t>;

  explicit PhaseHistogram(std::uint64_t p, int level = 0, Rational scale = 1);
  PhaseHistogram(std::uint64_t p, int level, Rational scale, Counts counts);

  static PhaseHistogram zero(std::uint64_t p) { return PhaseHistogram(p, 0, 0); }

  std::uint64_t prime() const { return p_; }
  int level() const { return level_; }
  std::uint64_t modulus() const { return modulus_; }
  const Rational& scale() const { return scale_; }
  const Counts& counts() const { return counts_; }

  /// Adds w to the count of class k (k < p^level).
  void add(std::uint64_t k, std::int64_t w);

  /// Same value at a finer level (class k -> k p^{level'-level}).
  PhaseHistogram lifted_to(int level) const;

  /// Same value with scale multiplied by `factor`.
  PhaseHistogram scaled(const Rational& factor) const;

  /// Structural equality (compare reduced forms for value equality).
  friend bool operator==(const PhaseHistogram& a, const PhaseHistogram& b);

 private:
  std::uint64_t p_;
  int level_;
  std::uint64_t modulus_;
  Rational scale_;
  Counts counts_;
};

/// Adds w copies of psi(phase) (at the histogram's scale), lifting the level
/// if the phase is finer.
PhaseHistogram hist_accumulate(const PhaseHistogram& h, const PhaseFraction& phase, std::int64_t w);

/// Canonical form; see PhaseHistogram. Idempotent.
PhaseHistogram hist_reduce(const PhaseHistogram& h);

bool hist_is_zero(const PhaseHistogram& h);

/// Value sum a + b, brought to a common level and a common scale.
PhaseHistogram hist_add(const PhaseHistogram& a, const PhaseHistogram& b);
PhaseHistogram hist_subtract(const PhaseHistogram& a, const PhaseHistogram& b);

/// |value| in double precision.
///
/// The sum is accumulated with Neumaier compensation from angles reduced
/// exactly in integer arithmetic, so the absolute error is at most
/// |s| * sum|c_k| * eps * kMagnitudeErrorConstant (eps = DBL_EPSILON).
struct Magnitude {
  static constexpr double kMagnitudeErrorConstant = 16.0;

  double value = 0.0;
  double error = 0.0;
};

Magnitude hist_magnitude(const PhaseHistogram& h);

}  // namespace padexp
