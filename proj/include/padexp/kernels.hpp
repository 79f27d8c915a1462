#pragma once

// Inner loops of the evaluators. Every kernel exists twice: a serial
// reference (`*_serial`) and an OpenMP version (`*_omp`). Both accumulate
// exact integers, so their results are identical for any worker count; the
// tests hold them to that and bench/ compares their speed.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "padexp/histogram.hpp"
#include "padexp/modular.hpp"
#include "padexp/polymap.hpp"

namespace padexp {

/// workers == 1 selects the serial reference kernels; 0 means the OpenMP
/// default team size.
struct Parallelism {
  int workers = 0;

  bool serial() const { return workers == 1; }
};

namespace kernels {

/// Integer counts per phase class k in [0, q).
///
/// Storage starts sparse and switches to a dense array once more than
/// kLoadFactor * q classes are occupied (only for q <= kDenseLimit); moduli
/// up to kAlwaysDense are dense from the start.
class PhaseAccumulator {
 public:
  static constexpr std::uint64_t kAlwaysDense = std::uint64_t{1} << 12;
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 24;
  static constexpr double kLoadFactor = 0.125;

  explicit PhaseAccumulator(std::uint64_t q);

  void add(std::uint64_t k, std::int64_t w);
  void merge(const PhaseAccumulator& other);

  bool is_dense() const { return !dense_.empty(); }
  std::uint64_t modulus() const { return q_; }

  PhaseHistogram to_histogram(std::uint64_t p, int level, const Rational& scale) const;

 private:
  void densify();

  std::uint64_t q_;
  std::vector<std::int64_t> dense_;
  std::unordered_map<std::uint64_t, std::int64_t> sparse_;
};

struct PruningStats {
  std::uint64_t p1 = 0;      // balls closed by the constant rule
  std::uint64_t p2 = 0;      // balls closed by the oscillation rule
  std::uint64_t splits = 0;  // balls refined into p^n children
  std::uint64_t leaves = 0;  // points enumerated on the last digit layer

  PruningStats& operator+=(const PruningStats& o) {
    p1 += o.p1;
    p2 += o.p2;
    splits += o.splits;
    leaves += o.leaves;
    return *this;
  }
  friend bool operator==(const PruningStats&, const PruningStats&) = default;
};

/// Polynomial with coefficients in Z/p^L stored densely over the box of
/// per-variable degrees, with variable 0 varying fastest.
class DenseModPoly {
 public:
  enum class Shape {
    Constant,     // every nonconstant coefficient vanishes
    Oscillating,  // nonlinear part vanishes, some linear coefficient does not
    General,
  };

  DenseModPoly(std::vector<unsigned> degrees, const Modulus& mod);

  /// Reduces scale * g, whose coefficients must be p-integral. `degrees`
  /// must dominate the per-variable degrees of g.
  static DenseModPoly from_polynomial(const Polynomial& g, const Rational& scale, const Modulus& mod,
                                      std::vector<unsigned> degrees);

  /// The zero polynomial on the same layout.
  DenseModPoly zero_like() const {
    DenseModPoly out = *this;
    std::fill(out.coeffs_.begin(), out.coeffs_.end(), 0);
    return out;
  }

  std::size_t variables() const { return layout_->degrees.size(); }
  std::size_t size() const { return coeffs_.size(); }
  const Modulus& modulus() const { return layout_->mod; }
  const std::vector<unsigned>& degrees() const { return layout_->degrees; }

  std::uint64_t constant() const { return coeffs_[0]; }
  std::uint64_t coefficient(std::size_t flat) const { return coeffs_[flat]; }
  std::uint64_t coefficient(std::span<const unsigned> exponent) const;

  Shape classify() const;
  /// Minimal p-adic order of the nonconstant coefficients (L if none).
  int nonconstant_order() const;

  /// this += a * other (same layout).
  void add_scaled(std::uint64_t a, const DenseModPoly& other);

  /// In place: x_j -> digit + p x_j.
  void shift_variable(std::size_t j, std::uint64_t digit);

  /// Value at the integer point x (entries reduced mod q).
  std::uint64_t evaluate(std::span<const std::uint64_t> x) const;

 private:
  struct Layout {
    std::vector<unsigned> degrees;
    std::vector<std::size_t> strides;
    std::vector<std::uint8_t> total;  // total degree, capped at 2
    std::vector<std::uint64_t> p_powers;
    Modulus mod;
  };

  std::shared_ptr<const Layout> layout_;
  std::vector<std::uint64_t> coeffs_;
};

/// Counts of sum_j weights[j] * F_j(t) mod q over t in (Z/q)^n, q = map.modulus().
PhaseAccumulator enumerate_phases_serial(const ModularMap& map, std::span<const std::uint64_t> weights);
PhaseAccumulator enumerate_phases_omp(const ModularMap& map, std::span<const std::uint64_t> weights, int workers);

struct DescentResult {
  PhaseAccumulator counts;
  PruningStats stats;
};

/// Pruned digit-by-digit refinement of Z_p^n for psi(G(t) / p^L), G given mod
/// p^L. Counts are in units of p^{-Ln}.
DescentResult descend_serial(const DenseModPoly& g);
DescentResult descend_omp(const DenseModPoly& g, int workers);

/// Fiber table of F = (F_1..F_r) over t in (Z/q)^n: entry at the mixed-radix
/// index of (F_1(t), ..., F_r(t)) mod q, component 1 most significant.
std::vector<std::int64_t> fiber_table_enumerate_serial(const ModularMap& map);
std::vector<std::int64_t> fiber_table_enumerate_omp(const ModularMap& map, int workers);

/// Same table via ball refinement; components share one layout.
std::vector<std::int64_t> fiber_table_descend_serial(std::span<const DenseModPoly> components);
std::vector<std::int64_t> fiber_table_descend_omp(std::span<const DenseModPoly> components, int workers);

struct TargetCount {
  std::int64_t count = 0;                              // points of (Z/q)^n hitting the target
  std::vector<std::vector<std::uint64_t>> preimages;  // first few, in digit order
};

/// #{t mod q : F(t) = target mod q}, pruning balls whose image provably
/// misses the target.
TargetCount count_target_serial(std::span<const DenseModPoly> components, std::span<const std::uint64_t> target,
                                std::size_t max_preimages);
TargetCount count_target_omp(std::span<const DenseModPoly> components, std::span<const std::uint64_t> target,
                             std::size_t max_preimages, int workers);

}  // namespace kernels
}  // namespace padexp
