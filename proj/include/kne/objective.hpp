#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "kne/kernels.hpp"
#include "kne/model.hpp"

namespace kne {

// Negative-sampling loss of one center-context pair:
//   (1 - Kc(A_u, B_v))^2 + sum_r Kc(A_{u_r}, B_v)^2,   Kc = sum_i c_i K_i.
// Context and negative rows come from A, the center row from B.
// Regularization is not included.
template <typename T>
T pair_loss(const BasicEmbeddingModel<T>& m, const KernelBank& bank, NodeId center, NodeId context,
            std::span<const NodeId> negatives) {
  const auto bv = m.b(center);
  const T pos = T(1) - combined_value<T>(bank, m.c(), m.a(context), bv);
  T loss = pos * pos;
  for (NodeId x : negatives) {
    const T s = combined_value<T>(bank, m.c(), m.a(x), bv);
    loss += s * s;
  }
  return loss;
}

// pair_loss plus the regularizer restricted to the rows a single update
// touches: lambda/2 (sum over distinct A rows |A_x|^2 + |B_v|^2) + beta/2 |c|^2.
// Its gradient is what compute_pair_gradients returns.
template <typename T>
T regularized_pair_objective(const BasicEmbeddingModel<T>& m, const KernelBank& bank, NodeId center,
                             NodeId context, std::span<const NodeId> negatives, T lambda, T beta) {
  std::vector<NodeId> rows{context};
  for (NodeId x : negatives) {
    if (std::find(rows.begin(), rows.end(), x) == rows.end()) rows.push_back(x);
  }
  auto sq = [](std::span<const T> v) {
    T acc = 0;
    for (T x : v) acc += x * x;
    return acc;
  };
  T reg = sq(m.b(center));
  for (NodeId x : rows) reg += sq(m.a(x));
  return pair_loss(m, bank, center, context, negatives) + lambda / 2 * reg + beta / 2 * sq(m.c());
}

template <typename T>
struct PairGradients {
  std::vector<NodeId> rows;  // distinct A rows, context first
  std::vector<T> grad_a;     // rows.size() x dim, row-major
  std::vector<T> grad_b;     // gradient for B_center
  std::vector<T> grad_c;     // one entry per kernel
  T loss = 0;                // pair_loss at the evaluation point

  std::span<const T> a_row(std::size_t slot, std::size_t dim) const {
    return std::span<const T>(grad_a).subspan(slot * dim, dim);
  }
  CombinedEval<T> scratch;
};

// Gradients of regularized_pair_objective with respect to every touched A row,
// B_center and c, evaluated at the current model with coefficients `c`.
// Residual r = Kc - target (target 1 for the context, 0 for negatives):
//   grad A_x      += 2 r * dKc/dA_x + lambda A_x
//   grad B_center += 2 r * dKc/dB_v + lambda B_v
//   grad c_t      += 2 r * K_t      + beta c_t
template <typename T>
void compute_pair_gradients(const BasicEmbeddingModel<T>& m, std::span<const T> c, const KernelBank& bank,
                            NodeId center, NodeId context, std::span<const NodeId> negatives, T lambda,
                            T beta, PairGradients<T>& g) {
  const std::size_t d = m.dim();
  const std::size_t kernels = bank.size();
  if (c.size() != kernels) throw std::invalid_argument("coefficient count differs from kernel count");
  g.rows.clear();
  g.grad_a.clear();
  g.grad_b.assign(d, T(0));
  g.grad_c.assign(kernels, T(0));
  g.loss = 0;

  const auto bv = m.b(center);
  auto accumulate = [&](NodeId x, T target) {
    std::size_t slot = 0;
    while (slot < g.rows.size() && g.rows[slot] != x) ++slot;
    if (slot == g.rows.size()) {
      g.rows.push_back(x);
      g.grad_a.resize(g.grad_a.size() + d, T(0));
    }
    const auto ax = m.a(x);
    combined_eval_into<T>(bank, c, squared_distance<T>(ax, bv), g.scratch);
    const T residual = g.scratch.value - target;
    g.loss += residual * residual;
    const T coef = T(2) * residual * g.scratch.slope;
    T* ga = g.grad_a.data() + slot * d;
    for (std::size_t i = 0; i < d; ++i) {
      const T step = coef * (ax[i] - bv[i]);
      ga[i] += step;
      g.grad_b[i] -= step;
    }
    for (std::size_t t = 0; t < kernels; ++t) g.grad_c[t] += T(2) * residual * g.scratch.per_kernel[t];
  };

  accumulate(context, T(1));
  for (NodeId x : negatives) accumulate(x, T(0));

  if (lambda != T(0)) {
    for (std::size_t slot = 0; slot < g.rows.size(); ++slot) {
      const auto ax = m.a(g.rows[slot]);
      T* ga = g.grad_a.data() + slot * d;
      for (std::size_t i = 0; i < d; ++i) ga[i] += lambda * ax[i];
    }
    for (std::size_t i = 0; i < d; ++i) g.grad_b[i] += lambda * bv[i];
  }
  for (std::size_t t = 0; t < kernels; ++t) g.grad_c[t] += beta * c[t];
}

template <typename T>
PairGradients<T> pair_gradients(const BasicEmbeddingModel<T>& m, const KernelBank& bank, NodeId center,
                                NodeId context, std::span<const NodeId> negatives, T lambda, T beta) {
  PairGradients<T> g;
  compute_pair_gradients<T>(m, m.c(), bank, center, context, negatives, lambda, beta, g);
  return g;
}

}  // namespace kne
