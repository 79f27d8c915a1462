#include <algorithm>

#include "kernels_internal.hpp"
#include "padexp/errors.hpp"

namespace padexp::kernels {

// --- PhaseAccumulator -----------------------------------------------------------

PhaseAccumulator::PhaseAccumulator(std::uint64_t q) : q_(q) {
  if (q_ <= kAlwaysDense) dense_.assign(q_, 0);
}

void PhaseAccumulator::densify() {
  dense_.assign(q_, 0);
  for (const auto& [k, c] : sparse_) dense_[k] += c;
  sparse_.clear();
}

void PhaseAccumulator::add(std::uint64_t k, std::int64_t w) {
  if (!dense_.empty()) {
    dense_[k] += w;
    return;
  }
  sparse_[k] += w;
  if (q_ <= kDenseLimit && static_cast<double>(sparse_.size()) > kLoadFactor * static_cast<double>(q_)) densify();
}

void PhaseAccumulator::merge(const PhaseAccumulator& other) {
  if (!other.dense_.empty()) {
    for (std::uint64_t k = 0; k < other.q_; ++k)
      if (other.dense_[k] != 0) add(k, other.dense_[k]);
  } else {
    for (const auto& [k, c] : other.sparse_)
      if (c != 0) add(k, c);
  }
}

PhaseHistogram PhaseAccumulator::to_histogram(std::uint64_t p, int level, const Rational& scale) const {
  PhaseHistogram::Counts counts;
  if (!dense_.empty()) {
    for (std::uint64_t k = 0; k < q_; ++k)
      if (dense_[k] != 0) counts.emplace(k, dense_[k]);
  } else {
    for (const auto& [k, c] : sparse_)
      if (c != 0) counts.emplace(k, c);
  }
  return PhaseHistogram(p, level, scale, std::move(counts));
}

// --- DenseModPoly -----------------------------------------------------------------

DenseModPoly::DenseModPoly(std::vector<unsigned> degrees, const Modulus& mod) {
  auto layout = std::make_shared<Layout>(Layout{std::move(degrees), {}, {}, {}, mod});
  std::size_t size = 1;
  unsigned max_degree = 0;
  for (unsigned d : layout->degrees) {
    layout->strides.push_back(size);
    size *= d + 1;
    max_degree = std::max(max_degree, d);
    if (size > (std::size_t{1} << 24)) throw BudgetError("dense polynomial layout too large", static_cast<long double>(size), 1 << 24);
  }
  layout->total.assign(size, 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    unsigned total = 0;
    std::size_t rest = idx;
    for (unsigned d : layout->degrees) {
      total += static_cast<unsigned>(rest % (d + 1));
      rest /= d + 1;
    }
    layout->total[idx] = static_cast<std::uint8_t>(std::min(total, 2u));
  }
  layout->p_powers.assign(max_degree + 1, 0);
  layout->p_powers[0] = 1 % mod.q();
  for (unsigned i = 1; i <= max_degree; ++i) layout->p_powers[i] = mod.mul(layout->p_powers[i - 1], mod.p() % mod.q());
  coeffs_.assign(size, 0);
  layout_ = std::move(layout);
}

DenseModPoly DenseModPoly::from_polynomial(const Polynomial& g, const Rational& scale, const Modulus& mod,
                                           std::vector<unsigned> degrees) {
  if (degrees.size() != g.variables()) throw PreconditionError("layout dimension does not match polynomial");
  DenseModPoly out(std::move(degrees), mod);
  const auto& layout = *out.layout_;
  for (const auto& [e, c] : g.terms()) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] > layout.degrees[j]) throw PreconditionError("polynomial exceeds dense layout degree");
      flat += e[j] * layout.strides[j];
    }
    out.coeffs_[flat] = mod.add(out.coeffs_[flat], mod.reduce(Rational(c * scale)));
  }
  return out;
}

std::uint64_t DenseModPoly::coefficient(std::span<const unsigned> exponent) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < exponent.size(); ++j) {
    if (exponent[j] > layout_->degrees[j]) return 0;
    flat += exponent[j] * layout_->strides[j];
  }
  return coeffs_[flat];
}

DenseModPoly::Shape DenseModPoly::classify() const {
  const auto& total = layout_->total;
  bool linear = false;
  for (std::size_t idx = 1; idx < coeffs_.size(); ++idx) {
    if (coeffs_[idx] == 0) continue;
    if (total[idx] >= 2) return Shape::General;
    linear = true;
  }
  return linear ? Shape::Oscillating : Shape::Constant;
}

int DenseModPoly::nonconstant_order() const {
  const auto& mod = layout_->mod;
  int order = mod.level();
  for (std::size_t idx = 1; idx < coeffs_.size() && order > 0; ++idx)
    if (coeffs_[idx] != 0) order = std::min(order, mod.order(coeffs_[idx]));
  return order;
}

void DenseModPoly::add_scaled(std::uint64_t a, const DenseModPoly& other) {
  if (other.coeffs_.size() != coeffs_.size()) throw PreconditionError("layout mismatch in add_scaled");
  const auto& mod = layout_->mod;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] = mod.add(coeffs_[i], mod.mul(a, other.coeffs_[i]));
}

void DenseModPoly::shift_variable(std::size_t j, std::uint64_t digit) {
  const auto& layout = *layout_;
  const unsigned degree = layout.degrees[j];
  if (degree == 0) return;
  const auto& mod = layout.mod;
  const std::size_t stride = layout.strides[j];
  const std::size_t block = stride * (degree + 1);
  std::uint64_t* c = coeffs_.data();
  for (std::size_t outer = 0; outer < coeffs_.size(); outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      std::uint64_t* fiber = c + outer + inner;
      if (digit != 0) {
        // Taylor shift by repeated synthetic division.
        for (unsigned i = 0; i < degree; ++i)
          for (unsigned k = degree; k-- > i;)
            fiber[k * stride] = mod.add(fiber[k * stride], mod.mul(digit, fiber[(k + 1) * stride]));
      }
      for (unsigned i = 1; i <= degree; ++i) fiber[i * stride] = mod.mul(fiber[i * stride], layout.p_powers[i]);
    }
  }
}

std::uint64_t DenseModPoly::evaluate(std::span<const std::uint64_t> x) const {
  const auto& layout = *layout_;
  const auto& mod = layout.mod;
  const std::size_t n = layout.degrees.size();
  std::uint64_t acc = 0;
  std::vector<std::uint64_t> e(n, 0);
  std::vector<std::uint64_t> xr(n);
  for (std::size_t j = 0; j < n; ++j) xr[j] = x[j] % mod.q();
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    if (idx > 0) {
      std::size_t j = 0;
      while (++e[j] > layout.degrees[j]) {
        e[j] = 0;
        ++j;
      }
    }
    if (coeffs_[idx] == 0) continue;
    std::uint64_t v = coeffs_[idx];
    for (std::size_t j = 0; j < n; ++j)
      for (std::uint64_t t = 0; t < e[j]; ++t) v = mod.mul(v, xr[j]);
    acc = mod.add(acc, v);
  }
  return acc;
}

namespace detail {

std::vector<std::int64_t> depth_weights(std::uint64_t p, int level, std::size_t n) {
  const std::uint64_t top = checked_power(p, static_cast<std::uint64_t>(level) * n);
  std::vector<std::int64_t> weights(static_cast<std::size_t>(level) + 1);
  std::uint64_t w = top;
  const std::uint64_t step = checked_power(p, n);
  for (int k = 0; k <= level; ++k) {
    weights[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(w);
    w /= step;
  }
  return weights;
}

void descend_node(const DenseModPoly& node, int depth, const std::vector<std::int64_t>& weights,
                  PhaseAccumulator& acc, PruningStats& stats) {
  switch (node.classify()) {
    case DenseModPoly::Shape::Constant:
      ++stats.p1;
      acc.add(node.constant(), weights[static_cast<std::size_t>(depth)]);
      return;
    case DenseModPoly::Shape::Oscillating:
      ++stats.p2;
      return;
    case DenseModPoly::Shape::General:
      break;
  }
  const std::size_t n = node.variables();
  const std::uint64_t p = node.modulus().p();
  if (depth + 1 >= node.modulus().level()) {
    const std::int64_t w = weights[static_cast<std::size_t>(depth) + 1];
    for_each_digit_vector(n, p, [&](const std::vector<std::uint64_t>& d) {
      acc.add(node.evaluate(d), w);
      ++stats.leaves;
    });
    return;
  }
  ++stats.splits;
  std::vector<std::uint64_t> digits(n);
  for_each_child(node, 0, n, p, digits, [&](const DenseModPoly& child, const std::vector<std::uint64_t>&) {
    descend_node(child, depth + 1, weights, acc, stats);
  });
}

std::uint64_t fiber_key(std::span<const std::uint64_t> values, std::uint64_t q) {
  std::uint64_t key = 0;
  for (std::uint64_t v : values) key = key * q + v;
  return key;
}

void target_node(const TargetNode& node, std::span<const std::uint64_t> target,
                 const std::vector<std::int64_t>& weights, std::size_t max_preimages, TargetCount& out) {
  const auto& first = node.bundle.polys.front();
  const auto& mod = first.modulus();
  const int level = mod.level();
  const std::size_t n = first.variables();
  const std::uint64_t p = mod.p();

  bool constant = true;
  for (std::size_t i = 0; i < node.bundle.polys.size(); ++i) {
    const auto& g = node.bundle.polys[i];
    const int order = g.nonconstant_order();
    // On this ball g = constant mod p^order; the target must agree there.
    const std::uint64_t gap = mod.sub(g.constant(), target[i]);
    if (mod.order(gap) < order) return;
    if (order < level) constant = false;
  }
  auto record = [&](std::vector<std::uint64_t> point, std::int64_t weight) {
    out.count += weight;
    if (out.preimages.size() < max_preimages) out.preimages.push_back(std::move(point));
  };
  if (constant) {
    record(node.center, weights[static_cast<std::size_t>(node.depth)]);
    return;
  }
  const std::uint64_t step = checked_power(p, static_cast<std::uint64_t>(node.depth));
  auto child_center = [&](const std::vector<std::uint64_t>& d) {
    std::vector<std::uint64_t> c = node.center;
    for (std::size_t j = 0; j < n; ++j) c[j] = mod.add(c[j], mod.mul(step % mod.q(), d[j]));
    return c;
  };
  if (node.depth + 1 >= level) {
    const std::int64_t w = weights[static_cast<std::size_t>(node.depth) + 1];
    for_each_digit_vector(n, p, [&](const std::vector<std::uint64_t>& d) {
      for (std::size_t i = 0; i < node.bundle.polys.size(); ++i)
        if (node.bundle.polys[i].evaluate(d) != target[i]) return;
      record(child_center(d), w);
    });
    return;
  }
  std::vector<std::uint64_t> digits(n);
  for_each_child(node.bundle, 0, n, p, digits, [&](const Bundle& child, const std::vector<std::uint64_t>& d) {
    target_node(TargetNode{child, child_center(d), node.depth + 1}, target, weights, max_preimages, out);
  });
}

}  // namespace detail
}  // namespace padexp::kernels
