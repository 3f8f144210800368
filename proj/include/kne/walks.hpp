#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kne/graph.hpp"
#include "kne/random.hpp"

namespace kne {

// Second-order (node2vec) transition probabilities. Having arrived at `cur`
// from `prev`, a neighbor x of `cur` is weighted 1/p if x == prev, 1 if x is
// adjacent to prev and 1/q otherwise. The first step of a walk is uniform.
class TransitionModel {
 public:
  enum class Mode {
    kShared,     // p == q == 1: every second-step table is the first-step table
    kEager,      // one alias table per directed edge
    kRejection,  // on-the-fly rejection sampling, same distribution
  };

  // Per-edge tables are materialized unless their total entry count
  // (sum of deg(v)^2) exceeds `max_eager_entries`.
  TransitionModel(const Graph& g, double p, double q,
                  std::size_t max_eager_entries = std::size_t{1} << 27);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  Mode mode() const noexcept { return mode_; }
  const Graph& graph() const noexcept { return *graph_; }

  // Position of the sampled neighbor inside graph().neighbors(cur).
  std::size_t first_step(NodeId cur, Rng& rng) const;
  // `edge` is the directed-edge index of prev -> cur in the adjacency array.
  std::size_t second_step(NodeId prev, NodeId cur, std::size_t edge, Rng& rng) const;

  // Normalized next-step distribution over neighbors(cur) as encoded by the
  // model (alias reconstruction, or the exact weights in rejection mode).
  std::vector<double> first_step_distribution(NodeId cur) const;
  std::vector<double> second_step_distribution(NodeId prev, NodeId cur) const;

  // Unnormalized node2vec weight of moving prev -> cur -> next.
  double bias(NodeId prev, NodeId next) const;

 private:
  std::size_t edge_index(NodeId prev, NodeId cur) const;
  static std::vector<double> reconstruct(std::span<const double> prob,
                                         std::span<const std::uint32_t> alias);

  const Graph* graph_;
  double p_, q_;
  Mode mode_;
  std::vector<double> first_prob_;
  std::vector<std::uint32_t> first_alias_;
  std::vector<std::size_t> edge_base_;  // start of each directed edge's table
  std::vector<double> edge_prob_;
  std::vector<std::uint32_t> edge_alias_;
};

// Walks stored back to back. Every walk has length `max_length` except walks
// starting at isolated nodes, which have length 1.
class WalkCorpus {
 public:
  WalkCorpus() : offsets_{0} {}
  WalkCorpus(std::vector<NodeId> nodes, std::vector<std::size_t> offsets, std::size_t walks_per_node,
             std::size_t max_length);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const NodeId> walk(std::size_t i) const {
    return std::span<const NodeId>(nodes_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::span<const NodeId> tokens() const noexcept { return nodes_; }
  std::size_t walks_per_node() const noexcept { return walks_per_node_; }
  std::size_t max_length() const noexcept { return max_length_; }

  // Walks appended in order; used by tests and by the CLI walk reader.
  static WalkCorpus from_walks(const std::vector<std::vector<NodeId>>& walks);

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> offsets_;
  std::size_t walks_per_node_ = 0;
  std::size_t max_length_ = 0;
};

struct WalkOptions {
  std::size_t walks_per_node = 80;
  std::size_t length = 10;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

// N passes over all nodes, node order reshuffled each pass. The walks started
// at node v come from a stream keyed by (seed, v), so the corpus is identical
// for any thread count.
WalkCorpus generate_walks(const TransitionModel& tm, const WalkOptions& opts);

// One walk per line, original node labels separated by spaces.
void write_walks(const WalkCorpus& corpus, const Graph& g, std::ostream& out);

}  // namespace kne
