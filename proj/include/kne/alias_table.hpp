#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kne/random.hpp"

namespace kne {

// Walker/Vose alias sampler: O(n) build, O(1) draw.
//
// The free functions work on caller-owned storage so that many small tables
// (one per directed edge in the walk engine) can share flat arrays.
void build_alias_into(std::span<const double> weights, std::span<double> prob,
                      std::span<std::uint32_t> alias);

inline std::uint32_t sample_alias(std::span<const double> prob, std::span<const std::uint32_t> alias,
                                  Rng& rng) {
  const double scaled = uniform01(rng) * static_cast<double>(prob.size());
  auto column = static_cast<std::uint32_t>(scaled);
  if (column >= prob.size()) column = static_cast<std::uint32_t>(prob.size() - 1);
  return (scaled - column) < prob[column] ? column : alias[column];
}

class AliasTable {
 public:
  AliasTable() = default;
  // Throws std::invalid_argument on empty, negative, non-finite or all-zero weights.
  explicit AliasTable(std::span<const double> weights);

  std::uint32_t sample(Rng& rng) const { return sample_alias(prob_, alias_, rng); }
  std::size_t size() const noexcept { return prob_.size(); }
  bool empty() const noexcept { return prob_.empty(); }

  std::span<const double> prob() const noexcept { return prob_; }
  std::span<const std::uint32_t> alias() const noexcept { return alias_; }

  // Exact probability of index i implied by the table.
  double probability(std::uint32_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace kne
