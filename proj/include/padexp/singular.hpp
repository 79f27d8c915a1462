#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "padexp/histogram.hpp"
#include "padexp/kernels.hpp"
#include "padexp/polymap.hpp"

namespace padexp {

/// Fiber counts of f at level m.
///
/// Cells are indexed by Z in (Z/p^{m+B})^r, component 1 most significant,
/// where Z = p^B z and B is the denominator exponent of f; for integral f
/// this is just z mod p^m. counts[i] is the number of x mod p^{m+B} with
/// p^B f(x) = Z, i.e. N_m(z) in units of the enumeration level.
struct DensityTable {
  std::uint64_t p = 0;
  int level = 0;        // m
  long shift = 0;       // B
  std::size_t variables = 0;
  std::size_t components = 0;
  std::uint64_t modulus = 1;  // p^{m+B}
  std::vector<std::int64_t> counts;

  int working_level() const { return level + static_cast<int>(shift); }
  std::size_t cells() const { return counts.size(); }

  std::size_t index(std::span<const std::uint64_t> residues) const;
  std::vector<std::uint64_t> residues(std::size_t index) const;
  /// z_i = Z_i / p^B.
  std::vector<Rational> target(std::size_t index) const;
  /// F_m(z) = N p^{m r - (m+B) n}.
  Rational density(std::size_t index) const;
  Integer total() const;
};

enum class CountMethod { Auto, Naive, Recursive };

/// Throws BudgetError when the table (p^{(m+B) r} cells) or, for the naive
/// method, the enumeration exceeds ctx.naive_budget(). Auto enumerates when
/// that fits the budget and refines balls otherwise.
DensityTable count_fibers(const PolyMap& f, int m, const PrimeContext& ctx, CountMethod method = CountMethod::Auto,
                          Parallelism par = {});

struct FourierCheck {
  PhaseHistogram integral;   // E_f(y), enumerated
  PhaseHistogram transform;  // sum_z N_m(z) p^{-mn} psi(y . z)
  PhaseHistogram residual;   // reduced difference
  bool zero = false;
};

/// Refuses (PreconditionError) when some v(y_j) < -m.
FourierCheck fourier_check(const PolyMap& f, std::span<const Rational> y, int m, const PrimeContext& ctx,
                           Parallelism par = {});

/// Elementary divisor orders of a rational matrix over Z_p, ascending.
/// Zero pivots are reported as Valuation::infinity().
std::vector<Valuation> elementary_orders(std::vector<std::vector<Rational>> matrix, const PrimeContext& ctx);

struct JacobianSample {
  std::vector<std::uint64_t> point;  // representative mod p^{m1+B}
  std::vector<Valuation> orders;
  int rank = 0;       // orders below m1
  int unit_rank = 0;  // orders equal to 0
};

struct StabilizationReport {
  int first = 0;
  int last = 0;
  std::vector<std::int64_t> counts;  // N_m(z), m = first..last
  std::vector<Rational> densities;   // F_m(z)
  /// Start of the final constant run of F.
  int constant_from = 0;
  /// The final constant run covers at least three levels.
  bool stable = false;
  std::vector<JacobianSample> samples;  // preimages at level `last`
  /// Every sample has Jacobian rank r.
  bool full_rank = false;
};

inline constexpr std::size_t kJacobianSamples = 8;

StabilizationReport stabilization_probe(const PolyMap& f, std::span<const Rational> z, int first, int last,
                                        const PrimeContext& ctx, Parallelism par = {});

}  // namespace padexp
