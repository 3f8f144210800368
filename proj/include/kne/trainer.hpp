#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kne/alias_table.hpp"
#include "kne/graph.hpp"
#include "kne/kernels.hpp"
#include "kne/model.hpp"
#include "kne/objective.hpp"
#include "kne/walks.hpp"

namespace kne {

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t window = 10;
  std::size_t walk_length = 10;
  std::size_t walks_per_node = 80;
  std::size_t negatives = 5;
  double lambda = 1e-2;
  double beta = 0.1;
  double lr = 0.025;
  double lr_min = 1e-4;
  double noise_power = 0.75;
  KernelBank kernels{};  // single Schoenberg kernel, sigma 2
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 42;
  unsigned threads = 1;

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Negative-sampling distribution: P(v) proportional to count(v)^power over
// corpus occurrence counts. Nodes absent from the corpus get probability 0.
class NoiseDistribution {
 public:
  NoiseDistribution() = default;
  NoiseDistribution(std::span<const double> weights);

  static NoiseDistribution uniform(NodeId n);

  NodeId sample(Rng& rng) const { return support_[table_.sample(rng)]; }
  double probability(NodeId v) const { return v < probs_.size() ? probs_[v] : 0.0; }
  NodeId node_count() const noexcept { return static_cast<NodeId>(probs_.size()); }
  std::span<const NodeId> support() const noexcept { return support_; }

 private:
  AliasTable table_;
  std::vector<NodeId> support_;
  std::vector<double> probs_;
};

NoiseDistribution build_noise_distribution(const WalkCorpus& corpus, NodeId node_count,
                                           double power = 0.75);

// Calls f(center, context) for every position l of the walk and every offset
// j in [-window, window] \ {0} that stays inside the walk.
template <typename F>
void for_each_pair(std::span<const NodeId> walk, std::size_t window, F&& f) {
  const std::size_t len = walk.size();
  for (std::size_t l = 0; l < len; ++l) {
    const std::size_t lo = l >= window ? l - window : 0;
    const std::size_t hi = std::min(len - 1, l + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != l) f(walk[l], walk[j]);
    }
  }
}

std::vector<std::pair<NodeId, NodeId>> extract_pairs(const WalkCorpus& corpus, std::size_t window);
std::size_t count_pairs(const WalkCorpus& corpus, std::size_t window);

// max(lr_min, lr0 * (1 - processed / total)); lr0 when total is 0.
double lr_schedule(std::size_t processed, std::size_t total, double lr0, double lr_min);

// Reusable per-worker buffers for update_emb.
struct UpdateWorkspace {
  std::vector<NodeId> negatives;
  PairGradients<float> grads;
};

// One stochastic step for the pair (center, context): draw `negatives` nodes
// from the noise distribution, then descend A rows, B_center and, when the
// bank holds more than one kernel, c. Returns the pair loss before the step.
// Throws NonFiniteError if any updated parameter is not finite.
float update_emb(EmbeddingModel& model, const KernelBank& bank, NodeId center, NodeId context,
                 const NoiseDistribution& noise, std::size_t negatives, float lr, float lambda, float beta,
                 Rng& rng, UpdateWorkspace& ws);

struct TrainStats {
  std::size_t walks = 0;
  std::size_t pairs = 0;
  double mean_pair_loss = 0.0;  // running mean over the pass, before each step
  double walk_seconds = 0.0;
  double train_seconds = 0.0;
};

struct TrainResult {
  EmbeddingModel model;
  TrainStats stats;
};

// Progress callback: (processed pairs, total pairs).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

// Walks, noise distribution, one pass of update_emb over every pair.
TrainResult train(const Graph& g, const TrainConfig& cfg, const ProgressFn& progress = {});

// Same pass on a prepared corpus; the model starts from `cfg.seed`
// initialization.
TrainResult train_on_corpus(const WalkCorpus& corpus, NodeId node_count, const TrainConfig& cfg,
                            const ProgressFn& progress = {});

// Mean pair_loss over every pair of the corpus, negatives drawn from a stream
// fixed by `seed` so that two models can be compared on identical samples.
double mean_corpus_loss(const EmbeddingModel& model, const KernelBank& bank, const WalkCorpus& corpus,
                        std::size_t window, const NoiseDistribution& noise, std::size_t negatives,
                        std::uint64_t seed);

}  // namespace kne
