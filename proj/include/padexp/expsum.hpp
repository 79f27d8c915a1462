#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "padexp/histogram.hpp"
#include "padexp/kernels.hpp"
#include "padexp/polymap.hpp"

namespace padexp {

using kernels::PruningStats;

/// Level of y: m = max(0, max_j -v(y_j)), so |y| = p^m when m > 0.
int y_level(std::span<const Rational> y, const PrimeContext& ctx);

/// Input to E_{phi,f}(y) = int phi(x) psi(y . f(x)) |dx|.
class EvalRequest {
 public:
  EvalRequest(PolyMap f, SchwartzBruhat phi, std::vector<Rational> y, PrimeContext ctx);

  const PolyMap& map() const { return f_; }
  const SchwartzBruhat& phi() const { return phi_; }
  const std::vector<Rational>& y() const { return y_; }
  const PrimeContext& context() const { return ctx_; }

  /// m, the level of y.
  int level() const { return level_; }
  /// m + B, maximised over the balls of phi after substitution.
  int precision() const { return precision_; }

 private:
  PolyMap f_;
  SchwartzBruhat phi_;
  std::vector<Rational> y_;
  PrimeContext ctx_;
  int level_;
  int precision_;
};

struct EvalResult {
  PhaseHistogram value;  // reduced
  PruningStats stats;
};

/// Direct enumeration of every ball of phi over (Z/p^{m+B})^n. Throws
/// BudgetError when a ball needs more than ctx.naive_budget() points.
PhaseHistogram eval_naive(const EvalRequest& req, Parallelism par = {});

/// Pruned refinement; exactly equal to eval_naive on reduced histograms.
EvalResult eval_recursive(const EvalRequest& req, Parallelism par = {});

/// Truncates each series at level m + B and evaluates the polynomial map.
EvalResult eval_series(std::span<const RestrictedSeries> series, const SchwartzBruhat& phi,
                       std::span<const Rational> y, const PrimeContext& ctx, Parallelism par = {});

/// f and phi prepared once for many evaluations at a fixed level m, e.g. all
/// directions y = u / p^m of a decay sweep.
class PreparedIntegral {
 public:
  PreparedIntegral(const PolyMap& f, const SchwartzBruhat& phi, int m, const PrimeContext& ctx);

  int level() const { return level_; }
  std::size_t components() const { return r_; }

  /// y with level <= m.
  EvalResult evaluate(std::span<const Rational> y, Parallelism par = {}) const;
  /// y = u / p^m for integer u.
  EvalResult evaluate_direction(std::span<const std::uint64_t> u, Parallelism par = {}) const;

 private:
  struct PreparedBall {
    Modulus mod;
    Rational scale;  // weight * p^{-kn} * p^{-(m+B) n}
    std::vector<kernels::DenseModPoly> components;  // p^B f_j(a + p^k t) mod p^{m+B}
  };

  EvalResult run(const std::vector<std::vector<std::uint64_t>>& weights, Parallelism par) const;

  std::uint64_t p_;
  int level_;
  std::size_t r_;
  std::vector<PreparedBall> balls_;
};

}  // namespace padexp
