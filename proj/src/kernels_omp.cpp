// OpenMP kernels. Each one splits the work into independent pieces (index
// blocks or the top layers of the ball tree), accumulates exact integers per
// thread and merges them; integer addition makes the merge order irrelevant.

#include <omp.h>

#include <algorithm>
#include <optional>

#include "kernels_internal.hpp"
#include "padexp/errors.hpp"

namespace padexp::kernels {

namespace {

constexpr std::uint64_t kBlock = 4096;
constexpr std::size_t kFrontierPerThread = 16;

int team_size(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

void decode(std::uint64_t index, std::uint64_t q, std::vector<std::uint64_t>& t) {
  for (auto& digit : t) {
    digit = index % q;
    index /= q;
  }
}

void advance(std::vector<std::uint64_t>& t, std::uint64_t q) {
  for (auto& digit : t) {
    if (++digit < q) return;
    digit = 0;
  }
}

}  // namespace

PhaseAccumulator enumerate_phases_omp(const ModularMap& map, std::span<const std::uint64_t> weights, int workers) {
  const std::uint64_t q = map.modulus();
  const std::size_t n = map.variables();
  const std::uint64_t total = checked_power(q, n);
  const std::int64_t blocks = static_cast<std::int64_t>((total + kBlock - 1) / kBlock);
  PhaseAccumulator acc(q);

#pragma omp parallel num_threads(team_size(workers))
  {
    PhaseAccumulator local(q);
    std::vector<std::uint64_t> t(n), values(map.size());
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
      const std::uint64_t start = static_cast<std::uint64_t>(b) * kBlock;
      const std::uint64_t end = std::min(total, start + kBlock);
      decode(start, q, t);
      for (std::uint64_t i = start; i < end; ++i) {
        map.evaluate(t, values);
        unsigned __int128 phase = 0;
        for (std::size_t j = 0; j < values.size(); ++j)
          phase += static_cast<unsigned __int128>(weights[j]) * values[j] % q;
        local.add(static_cast<std::uint64_t>(phase % q), 1);
        advance(t, q);
      }
    }
#pragma omp critical(padexp_enumerate_merge)
    acc.merge(local);
  }
  return acc;
}

DescentResult descend_omp(const DenseModPoly& g, int workers) {
  const auto& mod = g.modulus();
  const int level = mod.level();
  const std::size_t n = g.variables();
  const auto weights = detail::depth_weights(mod.p(), level, n);
  const int threads = team_size(workers);
  DescentResult out{PhaseAccumulator(mod.q()), {}};

  struct Item {
    DenseModPoly poly;
    int depth;
  };
  std::vector<Item> frontier{{g, 0}};
  std::vector<std::uint64_t> digits(n);
  while (!frontier.empty() && frontier.size() < kFrontierPerThread * static_cast<std::size_t>(threads)) {
    std::vector<Item> next;
    for (const auto& item : frontier) {
      if (item.poly.classify() != DenseModPoly::Shape::General || item.depth + 1 >= level) {
        detail::descend_node(item.poly, item.depth, weights, out.counts, out.stats);
        continue;
      }
      ++out.stats.splits;
      detail::for_each_child(item.poly, 0, n, mod.p(), digits,
                             [&](const DenseModPoly& child, const std::vector<std::uint64_t>&) {
                               next.push_back({child, item.depth + 1});
                             });
    }
    frontier.swap(next);
  }

  const std::int64_t count = static_cast<std::int64_t>(frontier.size());
#pragma omp parallel num_threads(threads)
  {
    PhaseAccumulator local(mod.q());
    PruningStats stats;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto& item = frontier[static_cast<std::size_t>(i)];
      detail::descend_node(item.poly, item.depth, weights, local, stats);
    }
#pragma omp critical(padexp_descend_merge)
    {
      out.counts.merge(local);
      out.stats += stats;
    }
  }
  return out;
}

std::vector<std::int64_t> fiber_table_enumerate_omp(const ModularMap& map, int workers) {
  const std::uint64_t q = map.modulus();
  const std::size_t n = map.variables();
  const std::uint64_t total = checked_power(q, n);
  std::vector<std::int64_t> table(checked_power(q, map.size()), 0);
  const std::int64_t blocks = static_cast<std::int64_t>((total + kBlock - 1) / kBlock);

#pragma omp parallel num_threads(team_size(workers))
  {
    std::vector<std::uint64_t> t(n), values(map.size());
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
      const std::uint64_t start = static_cast<std::uint64_t>(b) * kBlock;
      const std::uint64_t end = std::min(total, start + kBlock);
      decode(start, q, t);
      for (std::uint64_t i = start; i < end; ++i) {
        map.evaluate(t, values);
        const std::uint64_t key = detail::fiber_key(values, q);
#pragma omp atomic
        table[key] += 1;
        advance(t, q);
      }
    }
  }
  return table;
}

std::vector<std::int64_t> fiber_table_descend_omp(std::span<const DenseModPoly> components, int workers) {
  const auto& mod = components.front().modulus();
  const int level = mod.level();
  const std::size_t n = components.front().variables();
  const auto weights = detail::depth_weights(mod.p(), level, n);
  const int threads = team_size(workers);
  std::vector<std::int64_t> table(checked_power(mod.q(), components.size()), 0);
  auto add = [&table](std::uint64_t key, std::int64_t w) {
#pragma omp atomic
    table[key] += w;
  };

  struct Item {
    detail::Bundle bundle;
    int depth;
  };
  auto closes = [&](const Item& item) {
    if (item.depth + 1 >= level) return true;
    return std::all_of(item.bundle.polys.begin(), item.bundle.polys.end(),
                       [](const DenseModPoly& g) { return g.classify() == DenseModPoly::Shape::Constant; });
  };
  std::vector<Item> frontier{{detail::Bundle{{components.begin(), components.end()}}, 0}};
  std::vector<std::uint64_t> digits(n);
  while (!frontier.empty() && frontier.size() < kFrontierPerThread * static_cast<std::size_t>(threads)) {
    std::vector<Item> next;
    for (const auto& item : frontier) {
      if (closes(item)) {
        detail::fiber_node(item.bundle, item.depth, weights, add);
        continue;
      }
      detail::for_each_child(item.bundle, 0, n, mod.p(), digits,
                             [&](const detail::Bundle& child, const std::vector<std::uint64_t>&) {
                               next.push_back({child, item.depth + 1});
                             });
    }
    frontier.swap(next);
  }

  const std::int64_t count = static_cast<std::int64_t>(frontier.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& item = frontier[static_cast<std::size_t>(i)];
    detail::fiber_node(item.bundle, item.depth, weights, add);
  }
  return table;
}

TargetCount count_target_omp(std::span<const DenseModPoly> components, std::span<const std::uint64_t> target,
                             std::size_t max_preimages, int workers) {
  const auto& mod = components.front().modulus();
  const int level = mod.level();
  const std::size_t n = components.front().variables();
  const auto weights = detail::depth_weights(mod.p(), level, n);
  const int threads = team_size(workers);

  // Items stay in digit order so that the concatenated preimage lists match
  // the serial depth-first order.
  struct Item {
    std::optional<detail::TargetNode> node;
    TargetCount done;
  };
  auto splits = [&](const detail::TargetNode& node) {
    if (node.depth + 1 >= level) return false;
    bool constant = true;
    for (std::size_t i = 0; i < node.bundle.polys.size(); ++i) {
      const auto& g = node.bundle.polys[i];
      const int order = g.nonconstant_order();
      if (mod.order(mod.sub(g.constant(), target[i])) < order) return false;
      if (order < level) constant = false;
    }
    return !constant;
  };

  std::vector<Item> items;
  items.push_back({detail::TargetNode{detail::Bundle{{components.begin(), components.end()}},
                                      std::vector<std::uint64_t>(n, 0), 0},
                   {}});
  std::vector<std::uint64_t> digits(n);
  while (true) {
    std::size_t open = 0;
    for (const auto& it : items) open += it.node.has_value();
    if (open == 0 || open >= kFrontierPerThread * static_cast<std::size_t>(threads)) break;
    std::vector<Item> next;
    bool grew = false;
    for (auto& it : items) {
      if (!it.node) {
        next.push_back(std::move(it));
        continue;
      }
      const auto& node = *it.node;
      if (!splits(node)) {
        next.push_back(std::move(it));
        continue;
      }
      grew = true;
      const std::uint64_t step = checked_power(mod.p(), static_cast<std::uint64_t>(node.depth)) % mod.q();
      detail::for_each_child(node.bundle, 0, n, mod.p(), digits,
                             [&](const detail::Bundle& child, const std::vector<std::uint64_t>& d) {
                               std::vector<std::uint64_t> c = node.center;
                               for (std::size_t j = 0; j < n; ++j) c[j] = mod.add(c[j], mod.mul(step, d[j]));
                               next.push_back({detail::TargetNode{child, std::move(c), node.depth + 1}, {}});
                             });
    }
    items.swap(next);
    if (!grew) break;
  }

  const std::int64_t count = static_cast<std::int64_t>(items.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    auto& it = items[static_cast<std::size_t>(i)];
    if (it.node) detail::target_node(*it.node, target, weights, max_preimages, it.done);
  }

  TargetCount out;
  for (auto& it : items) {
    out.count += it.done.count;
    for (auto& x : it.done.preimages) {
      if (out.preimages.size() >= max_preimages) break;
      out.preimages.push_back(std::move(x));
    }
  }
  return out;
}

}  // namespace padexp::kernels
