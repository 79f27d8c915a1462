#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padexp/io.hpp"

namespace padexp {

/// Everything needed to reproduce a run; echoed as "request" in the output.
/// The worker count is deliberately not part of it.
struct RunConfig {
  std::string command;
  std::uint64_t prime = 0;
  std::string map;
  std::size_t variables = 0;
  std::string phi = "triv";
  std::vector<std::string> y;
  std::vector<std::string> z;
  std::optional<int> level;
  std::optional<std::pair<int, int>> levels;
  std::string strategy = "exhaustive";
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  std::uint64_t budget = PrimeContext::kDefaultNaiveBudget;
  std::string method = "auto";
  std::string format = "json";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

Json config_to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j);

/// "m0..m1" with m0 <= m1.
std::pair<int, int> parse_levels(std::string_view text);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kParse = 2;
inline constexpr int kBudget = 3;
inline constexpr int kPrecondition = 4;
inline constexpr int kResidual = 5;
}  // namespace exit_code

/// Default budget when --budget is absent.
inline constexpr const char* kBudgetEnv = "PADEXP_BUDGET";

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace padexp
