// Serial reference kernels.

#include "kernels_internal.hpp"
#include "padexp/errors.hpp"

namespace padexp::kernels {

PhaseAccumulator enumerate_phases_serial(const ModularMap& map, std::span<const std::uint64_t> weights) {
  const std::uint64_t q = map.modulus();
  const std::size_t n = map.variables();
  PhaseAccumulator acc(q);
  std::vector<std::uint64_t> t(n, 0), values(map.size());
  while (true) {
    map.evaluate(t, values);
    unsigned __int128 phase = 0;
    for (std::size_t j = 0; j < values.size(); ++j) phase += static_cast<unsigned __int128>(weights[j]) * values[j] % q;
    acc.add(static_cast<std::uint64_t>(phase % q), 1);
    std::size_t j = 0;
    while (j < n && ++t[j] == q) {
      t[j] = 0;
      ++j;
    }
    if (j == n) break;
  }
  return acc;
}

DescentResult descend_serial(const DenseModPoly& g) {
  const auto& mod = g.modulus();
  const auto weights = detail::depth_weights(mod.p(), mod.level(), g.variables());
  DescentResult out{PhaseAccumulator(mod.q()), {}};
  detail::descend_node(g, 0, weights, out.counts, out.stats);
  return out;
}

std::vector<std::int64_t> fiber_table_enumerate_serial(const ModularMap& map) {
  const std::uint64_t q = map.modulus();
  const std::size_t n = map.variables();
  const std::uint64_t cells = checked_power(q, map.size());
  std::vector<std::int64_t> table(cells, 0);
  std::vector<std::uint64_t> t(n, 0), values(map.size());
  while (true) {
    map.evaluate(t, values);
    ++table[detail::fiber_key(values, q)];
    std::size_t j = 0;
    while (j < n && ++t[j] == q) {
      t[j] = 0;
      ++j;
    }
    if (j == n) break;
  }
  return table;
}

std::vector<std::int64_t> fiber_table_descend_serial(std::span<const DenseModPoly> components) {
  const auto& mod = components.front().modulus();
  const std::size_t n = components.front().variables();
  const auto weights = detail::depth_weights(mod.p(), mod.level(), n);
  std::vector<std::int64_t> table(checked_power(mod.q(), components.size()), 0);
  detail::Bundle root{{components.begin(), components.end()}};
  detail::fiber_node(root, 0, weights, [&](std::uint64_t key, std::int64_t w) { table[key] += w; });
  return table;
}

TargetCount count_target_serial(std::span<const DenseModPoly> components, std::span<const std::uint64_t> target,
                                std::size_t max_preimages) {
  const auto& mod = components.front().modulus();
  const std::size_t n = components.front().variables();
  const auto weights = detail::depth_weights(mod.p(), mod.level(), n);
  TargetCount out;
  detail::TargetNode root{detail::Bundle{{components.begin(), components.end()}}, std::vector<std::uint64_t>(n, 0), 0};
  detail::target_node(root, target, weights, max_preimages, out);
  return out;
}

}  // namespace padexp::kernels
