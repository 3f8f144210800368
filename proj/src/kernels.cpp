#include "kne/kernels.hpp"

namespace kne {

KernelFamily parse_kernel_family(std::string_view token) {
  if (token == "gauss") return KernelFamily::kGaussian;
  if (token == "sch") return KernelFamily::kSchoenberg;
  throw std::invalid_argument("unknown kernel '" + std::string(token) + "' (expected gauss or sch)");
}

std::string_view kernel_family_name(KernelFamily family) {
  return family == KernelFamily::kGaussian ? "gauss" : "sch";
}

KernelBank KernelBank::uniform_family(KernelFamily family, std::span<const double> sigmas) {
  std::vector<KernelSpec> specs;
  specs.reserve(sigmas.size());
  for (double s : sigmas) specs.push_back({family, s});
  return KernelBank(std::move(specs));
}

}  // namespace kne
