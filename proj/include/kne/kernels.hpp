#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kne {

enum class KernelFamily { kGaussian, kSchoenberg };

// Gaussian:   exp(-|x-y|^2 / sigma^2), any sigma != 0.
// Schoenberg: (1 + |x-y|^2)^(-sigma), sigma > 0.
struct KernelSpec {
  KernelFamily family = KernelFamily::kSchoenberg;
  double sigma = 2.0;

  void validate() const {
    if (!std::isfinite(sigma)) throw std::invalid_argument("kernel sigma must be finite");
    if (family == KernelFamily::kGaussian && sigma == 0.0) {
      throw std::invalid_argument("gaussian kernel sigma must be nonzero");
    }
    if (family == KernelFamily::kSchoenberg && !(sigma > 0.0)) {
      throw std::invalid_argument("schoenberg kernel sigma must be > 0");
    }
  }

  // Kernel value as a function of the squared distance.
  template <typename T>
  T value(T sqdist) const {
    if (family == KernelFamily::kGaussian) return std::exp(-sqdist / static_cast<T>(sigma * sigma));
    return std::pow(T(1) + sqdist, static_cast<T>(-sigma));
  }

  // Scalar s with grad_x K(x, y) = s * (x - y), given the squared distance and
  // the kernel value at that distance.
  template <typename T>
  T slope(T sqdist, T value) const {
    if (family == KernelFamily::kGaussian) return static_cast<T>(-2.0 / (sigma * sigma)) * value;
    return static_cast<T>(-2.0 * sigma) * value / (T(1) + sqdist);
  }
};

KernelFamily parse_kernel_family(std::string_view token);
std::string_view kernel_family_name(KernelFamily family);

// The base kernels of a linear combination sum_i c_i K_i. One kernel is the
// single-kernel model.
class KernelBank {
 public:
  KernelBank() : kernels_{KernelSpec{}} {}
  explicit KernelBank(std::vector<KernelSpec> kernels) : kernels_(std::move(kernels)) {
    if (kernels_.empty()) throw std::invalid_argument("kernel bank needs at least one kernel");
    for (const auto& k : kernels_) k.validate();
  }

  std::size_t size() const noexcept { return kernels_.size(); }
  const KernelSpec& operator[](std::size_t i) const { return kernels_[i]; }
  const std::vector<KernelSpec>& kernels() const noexcept { return kernels_; }

  // Same family, one kernel per sigma.
  static KernelBank uniform_family(KernelFamily family, std::span<const double> sigmas);

 private:
  std::vector<KernelSpec> kernels_;
};

template <typename T>
T squared_distance(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
  T acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T diff = x[i] - y[i];
    acc += diff * diff;
  }
  return acc;
}

template <typename T>
T kernel_value(const KernelSpec& spec, std::span<const T> x, std::span<const T> y) {
  return spec.value(squared_distance(x, y));
}

template <typename T>
std::vector<T> kernel_grad_x(const KernelSpec& spec, std::span<const T> x, std::span<const T> y) {
  const T sq = squared_distance(x, y);
  const T s = spec.slope(sq, spec.value(sq));
  std::vector<T> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) grad[i] = s * (x[i] - y[i]);
  return grad;
}

// Evaluation of sum_i c_i K_i at one (x, y): the combined value, the per-kernel
// values, and the combined slope (grad_x = slope * (x - y), grad_y = -grad_x).
template <typename T>
struct CombinedEval {
  T value = 0;
  T slope = 0;
  std::vector<T> per_kernel;
};

template <typename T>
void combined_eval_into(const KernelBank& bank, std::span<const T> c, T sqdist, CombinedEval<T>& out) {
  out.per_kernel.resize(bank.size());
  out.value = 0;
  out.slope = 0;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const T k = bank[i].value(sqdist);
    out.per_kernel[i] = k;
    out.value += c[i] * k;
    out.slope += c[i] * bank[i].slope(sqdist, k);
  }
}

template <typename T>
T combined_value(const KernelBank& bank, std::span<const T> c, std::span<const T> x,
                 std::span<const T> y) {
  if (c.size() != bank.size()) throw std::invalid_argument("coefficient count differs from kernel count");
  CombinedEval<T> e;
  combined_eval_into(bank, c, squared_distance(x, y), e);
  return e.value;
}

template <typename T>
struct CombinedGrads {
  std::vector<T> grad_x;
  std::vector<T> grad_y;
  std::vector<T> per_kernel_values;
};

template <typename T>
CombinedGrads<T> combined_grads(const KernelBank& bank, std::span<const T> c, std::span<const T> x,
                                std::span<const T> y) {
  if (c.size() != bank.size()) throw std::invalid_argument("coefficient count differs from kernel count");
  CombinedEval<T> e;
  combined_eval_into(bank, c, squared_distance(x, y), e);
  CombinedGrads<T> out;
  out.grad_x.resize(x.size());
  out.grad_y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.grad_x[i] = e.slope * (x[i] - y[i]);
    out.grad_y[i] = -out.grad_x[i];
  }
  out.per_kernel_values = std::move(e.per_kernel);
  return out;
}

}  // namespace kne
