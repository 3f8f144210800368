#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kne/graph.hpp"
#include "kne/random.hpp"

namespace kne {

// Two n x d row-major embedding tables and the kernel coefficients.
// A holds the context-role vectors (the reported embedding), B the
// center-role vectors.
template <typename T>
class BasicEmbeddingModel {
 public:
  BasicEmbeddingModel() = default;
  BasicEmbeddingModel(NodeId nodes, std::size_t dim, std::size_t kernels)
      : nodes_(nodes),
        dim_(dim),
        a_(static_cast<std::size_t>(nodes) * dim, T(0)),
        b_(static_cast<std::size_t>(nodes) * dim, T(0)),
        c_(kernels, kernels ? T(1) / static_cast<T>(kernels) : T(0)) {
    if (dim == 0) throw std::invalid_argument("embedding dimension must be >= 1");
    if (kernels == 0) throw std::invalid_argument("model needs at least one kernel coefficient");
  }

  NodeId node_count() const noexcept { return nodes_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t kernel_count() const noexcept { return c_.size(); }

  std::span<T> a(NodeId v) { return std::span<T>(a_).subspan(row(v), dim_); }
  std::span<const T> a(NodeId v) const { return std::span<const T>(a_).subspan(row(v), dim_); }
  std::span<T> b(NodeId v) { return std::span<T>(b_).subspan(row(v), dim_); }
  std::span<const T> b(NodeId v) const { return std::span<const T>(b_).subspan(row(v), dim_); }
  std::span<T> c() noexcept { return c_; }
  std::span<const T> c() const noexcept { return c_; }

  std::vector<T>& a_data() noexcept { return a_; }
  const std::vector<T>& a_data() const noexcept { return a_; }
  std::vector<T>& b_data() noexcept { return b_; }
  const std::vector<T>& b_data() const noexcept { return b_; }

  // A and B i.i.d. uniform in [-0.5/d, 0.5/d]; c = 1/K.
  void initialize(std::uint64_t seed) {
    Rng rng = make_rng(seed, {0x494e4954ULL});
    const double half = 0.5 / static_cast<double>(dim_);
    for (T& x : a_) x = static_cast<T>((2.0 * uniform01(rng) - 1.0) * half);
    for (T& x : b_) x = static_cast<T>((2.0 * uniform01(rng) - 1.0) * half);
    for (T& x : c_) x = T(1) / static_cast<T>(c_.size());
  }

  bool all_finite() const {
    auto finite = [](const std::vector<T>& v) {
      for (T x : v) {
        if (!std::isfinite(x)) return false;
      }
      return true;
    };
    return finite(a_) && finite(b_) && finite(c_);
  }

  template <typename U>
  BasicEmbeddingModel<U> cast() const {
    BasicEmbeddingModel<U> out(nodes_, dim_, c_.size());
    std::copy(a_.begin(), a_.end(), out.a_data().begin());
    std::copy(b_.begin(), b_.end(), out.b_data().begin());
    std::copy(c_.begin(), c_.end(), out.c().begin());
    return out;
  }

 private:
  std::size_t row(NodeId v) const {
    if (v >= nodes_) throw std::out_of_range("node id out of range for embedding model");
    return static_cast<std::size_t>(v) * dim_;
  }

  NodeId nodes_ = 0;
  std::size_t dim_ = 0;
  std::vector<T> a_, b_, c_;
};

using EmbeddingModel = BasicEmbeddingModel<float>;

}  // namespace kne
