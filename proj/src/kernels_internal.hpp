#pragma once

// Shared node logic for the serial and OpenMP kernels.

#include <cstdint>
#include <vector>

#include "padexp/kernels.hpp"

namespace padexp::kernels::detail {

/// weights[k] = p^{(L-k) n}: points of (Z/p^L)^n in a ball of depth k.
std::vector<std::int64_t> depth_weights(std::uint64_t p, int level, std::size_t n);

/// Several polynomials refined together (the components of a map).
struct Bundle {
  std::vector<DenseModPoly> polys;

  void shift_variable(std::size_t j, std::uint64_t digit) {
    for (auto& g : polys) g.shift_variable(j, digit);
  }
};

/// Calls fn(child, digits) for the p^n children of `node` in digit order
/// (variable 1 slowest).
template <class Node, class Fn>
void for_each_child(const Node& node, std::size_t j, std::size_t n, std::uint64_t p,
                    std::vector<std::uint64_t>& digits, Fn&& fn) {
  if (j == n) {
    fn(node, digits);
    return;
  }
  for (std::uint64_t d = 0; d < p; ++d) {
    Node child = node;
    child.shift_variable(j, d);
    digits[j] = d;
    for_each_child(child, j + 1, n, p, digits, fn);
  }
}

/// Calls fn(digits) for every digit vector in [0, p)^n in the same order.
template <class Fn>
void for_each_digit_vector(std::size_t n, std::uint64_t p, Fn&& fn) {
  std::vector<std::uint64_t> digits(n, 0);
  while (true) {
    fn(digits);
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (++digits[j] < p) break;
      digits[j] = 0;
      if (j == 0) return;
    }
    if (n == 0) return;
  }
}

void descend_node(const DenseModPoly& node, int depth, const std::vector<std::int64_t>& weights,
                  PhaseAccumulator& acc, PruningStats& stats);

std::uint64_t fiber_key(std::span<const std::uint64_t> values, std::uint64_t q);

/// `add(key, weight)` receives every closed ball.
template <class Add>
void fiber_node(const Bundle& node, int depth, const std::vector<std::int64_t>& weights, Add&& add) {
  const auto& first = node.polys.front();
  const std::uint64_t q = first.modulus().q();
  const int level = first.modulus().level();
  const std::size_t n = first.variables();
  const std::size_t r = node.polys.size();
  std::vector<std::uint64_t> values(r);

  bool constant = true;
  for (const auto& g : node.polys)
    if (g.classify() != DenseModPoly::Shape::Constant) {
      constant = false;
      break;
    }
  if (constant) {
    for (std::size_t i = 0; i < r; ++i) values[i] = node.polys[i].constant();
    add(fiber_key(values, q), weights[depth]);
    return;
  }
  if (depth + 1 >= level) {
    for_each_digit_vector(n, first.modulus().p(), [&](const std::vector<std::uint64_t>& d) {
      for (std::size_t i = 0; i < r; ++i) values[i] = node.polys[i].evaluate(d);
      add(fiber_key(values, q), weights[depth + 1]);
    });
    return;
  }
  std::vector<std::uint64_t> digits(n);
  for_each_child(node, 0, n, first.modulus().p(), digits,
                 [&](const Bundle& child, const std::vector<std::uint64_t>&) { fiber_node(child, depth + 1, weights, add); });
}

struct TargetNode {
  Bundle bundle;
  std::vector<std::uint64_t> center;
  int depth = 0;
};

void target_node(const TargetNode& node, std::span<const std::uint64_t> target,
                 const std::vector<std::int64_t>& weights, std::size_t max_preimages, TargetCount& out);

}  // namespace padexp::kernels::detail
