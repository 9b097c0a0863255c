#pragma once

#include <utility>
#include <vector>

#include "levi/errors.hpp"
#include "levi/integrators.hpp"
#include "levi/model.hpp"
#include "levi/phase.hpp"
#include "levi/rational.hpp"

namespace levi {

/// Order-2n multi-product expansion table: subdivision counts k_i = i and
/// exact rational weights c_i with
///   sum c_i = 1,   sum c_i k_i^{-2j} = 0  for j = 1..n-1.
struct MPETable {
  std::vector<int> k;
  std::vector<Rational> c;
  std::vector<double> c_double;

  int terms() const { return static_cast<int>(k.size()); }
  int order() const { return 2 * terms(); }

  Rational weight_sum() const {
    Rational s;
    for (const auto& ci : c) s = s + ci;
    return s;
  }

  /// Exact value of sum c_i k_i^{-2j}.
  Rational order_condition(int j) const {
    Rational s;
    for (int i = 0; i < terms(); ++i) {
      Rational kpow(1);
      for (int m = 0; m < 2 * j; ++m) kpow = kpow * Rational(k[i]);
      s = s + c[i] / kpow;
    }
    return s;
  }
};

/// Closed-form extrapolation weights c_i = prod_{j != i} k_i^2/(k_i^2-k_j^2)
/// with k_i = i, valid for 1 <= n <= 8 (exact in 128-bit rationals).
inline MPETable mpe_coefficients(int n) {
  if (n < 1 || n > 8)
    throw OverflowError("mpe_coefficients: supported orders are n = 1..8");
  MPETable t;
  t.k.resize(n);
  for (int i = 0; i < n; ++i) t.k[i] = i + 1;
  for (int i = 1; i <= n; ++i) {
    Rational ci(1);
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      ci = ci * Rational(i * i, i * i - j * j);
    }
    t.c.push_back(ci);
    t.c_double.push_back(ci.to_double());
  }
  return t;
}

namespace detail {

/// Linear combination sum_i c_i x_i of states sharing the start point,
/// evaluated about the last product as base + sum_i c_i (x_i - base),
/// which is the same value given sum c_i = 1. Differences between products
/// are O(h^3), so the combination is exact wherever the products agree; in
/// particular p6 conservation and the h = 0 identity survive the
/// combination bit-for-bit. Products are summed in fixed index order.
inline PhaseState combine_products(const std::vector<PhaseState>& products,
                                   const std::vector<double>& weights,
                                   double t_out) {
  const std::size_t n = products.size();
  PhaseState out = products[n - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.q += weights[i] * (products[i].q - products[n - 1].q);
    out.p += weights[i] * (products[i].p - products[n - 1].p);
  }
  out.t = t_out;
  return out;
}

} // namespace detail

/// 2n-th order multi-product step: sum_i c_i T2^{k_i}(h/k_i), every product
/// starting from the same input state. `kernel` is any symmetric
/// second-order one-step map (state, h) -> state. A singularity inside any
/// product aborts the whole step.
template <typename Kernel>
PhaseState mpe_step(Kernel&& kernel, const PhaseState& s, double h,
                    const MPETable& table) {
  if (table.terms() < 1) throw ValidationError("mpe_step: empty table");
  std::vector<PhaseState> products;
  products.reserve(table.terms());
  for (int i = 0; i < table.terms(); ++i) {
    const int k = table.k[i];
    const double sub_h = h / k;
    PhaseState x = s;
    for (int m = 0; m < k; ++m) x = kernel(x, sub_h);
    products.push_back(x);
  }
  return detail::combine_products(products, table.c_double, s.t + h);
}

/// Two-term Richardson extrapolation of the kernel,
/// (k^2 T2^k(h/k) - T2(h)) / (k^2 - 1); third-order for a symmetric
/// second-order kernel. k = 2 reproduces the n = 2 multi-product table.
template <typename Kernel>
PhaseState richardson3_step(Kernel&& kernel, const PhaseState& s, double h,
                            int k) {
  if (k < 2) throw ValidationError("richardson3_step: k must be >= 2");
  const double k2 = static_cast<double>(k) * k;
  std::vector<PhaseState> products;
  products.push_back(kernel(s, h));
  PhaseState fine = s;
  for (int m = 0; m < k; ++m) fine = kernel(fine, h / k);
  products.push_back(fine);
  return detail::combine_products(products, {-1.0 / (k2 - 1.0), k2 / (k2 - 1.0)},
                                  s.t + h);
}

/// Iterative multi-product step for a non-separable Hamiltonian: each sweep
/// evaluates the full combination with every kernel application run as a
/// frozen-gradient velocity-Verlet sweep against the current outer iterate,
/// then the iterate is replaced by the combined result. Stopping rule and
/// initialization as in verlet_step.
template <HamiltonianModel M>
StepReport iterative_mpe_step(const M& model, const PhaseState& s, double h,
                              const MPETable& table,
                              const IterationConfig& cfg = {}) {
  cfg.validate();
  if (table.terms() < 1)
    throw ValidationError("iterative_mpe_step: empty table");

  PhaseState prev = detail::initial_iterate(model, s, h, cfg.init);
  StepReport rep;
  for (int i = 1; i <= cfg.max_iters; ++i) {
    const Vec6 p_frozen = prev.p;
    auto kernel = [&model, &p_frozen](const PhaseState& x, double sub_h) {
      return detail::vv_sweep(model, x, sub_h, p_frozen);
    };
    const PhaseState cur = mpe_step(kernel, s, h, table);
    rep.iterations_used = i;
    rep.final_residual = detail::iterate_residual(cur, prev);
    prev = cur;
    if (rep.final_residual <= cfg.tol) break;
  }
  rep.new_state = prev;
  return rep;
}

} // namespace levi
