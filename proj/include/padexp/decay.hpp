#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padexp/kernels.hpp"
#include "padexp/polymap.hpp"

namespace padexp {

/// How directions u (y = u / p^m, some u_j a unit) are chosen at a level.
struct Strategy {
  enum class Kind { Exhaustive, Sample };

  Kind kind = Kind::Exhaustive;
  std::uint64_t count = 0;  // samples
  std::uint64_t seed = 0;

  static Strategy exhaustive() { return {}; }
  static Strategy sample(std::uint64_t count, std::uint64_t seed) { return {Kind::Sample, count, seed}; }

  /// "exhaustive" or "sample:N".
  static Strategy parse(std::string_view text, std::uint64_t seed);
  std::string to_string() const;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct DecayRecord {
  int level = 0;
  double sup = 0.0;
  double sup_error = 0.0;
  std::vector<std::uint64_t> argmax;
  bool exhaustive = true;
  /// Every evaluated direction gave the exact zero.
  bool exact_zero = false;
  std::uint64_t directions = 0;
};

/// Max of |E_{phi,f}(u / p^m)| over primitive u. Exhaustive sweeps need
/// p^{m r} <= ctx.naive_budget(). Ties go to the lexicographically smallest u.
DecayRecord sup_at_level(const PolyMap& f, const SchwartzBruhat& phi, int m, const Strategy& strategy,
                         const PrimeContext& ctx, Parallelism par = {});

struct FitContext {
  std::uint64_t p = 2;
  std::size_t variables = 1;
  unsigned d_f = 0;
  bool affinely_independent = true;
};

struct FitResult {
  double alpha_hat = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int window_first = 0;
  int window_last = 0;
  std::vector<int> excluded;  // levels with an exactly vanishing sup
  std::optional<double> bound_exponent;  // -1/d(f)
  std::optional<double> c_hat;
  std::vector<std::string> warnings;
};

/// Least-squares slope of log_p(sup) against m. Throws FitError when fewer
/// than two records are usable or every record vanishes exactly.
FitResult fit_alpha(const std::vector<DecayRecord>& records, const FitContext& fc);

/// sup * p^{m/d} / m^{n-1}.
double envelope_ratio(const DecayRecord& record, const FitContext& fc);

enum class Verdict { Consistent, Inconsistent, Vacuous, Insufficient };

std::string to_string(Verdict v);

inline constexpr double kDefaultEpsilon = 0.1;

struct BoundRow {
  int level = 0;
  double sup = 0.0;
  std::optional<double> ratio;
  std::optional<double> c_running;
};

struct BoundReport {
  unsigned d_f = 0;
  std::vector<Valuation> e_orders;
  bool affinely_independent = true;
  std::optional<std::string> banner;
  std::vector<BoundRow> rows;
  std::optional<FitResult> fit;
  std::optional<double> c_hat;
  double epsilon = kDefaultEpsilon;
  Verdict verdict = Verdict::Insufficient;
  std::string statement;
};

/// Compares the data with the degree bound (-v(y))^{n-1} |y|^{-1/d(f)}.
BoundReport bound_report(const PolyMap& f, const std::vector<DecayRecord>& records, const PrimeContext& ctx,
                         double epsilon = kDefaultEpsilon);

}  // namespace padexp
