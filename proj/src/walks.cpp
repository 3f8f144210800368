#include "kne/walks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "kne/alias_table.hpp"

namespace kne {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;

}  // namespace

TransitionModel::TransitionModel(const Graph& g, double p, double q, std::size_t max_eager_entries)
    : graph_(&g), p_(p), q_(q) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw std::invalid_argument("return parameter p and in-out parameter q must be > 0");
  }
  const NodeId n = g.node_count();
  const auto offsets = g.offsets();

  first_prob_.resize(g.adjacency().size());
  first_alias_.resize(g.adjacency().size());
  std::vector<double> weights;
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t deg = g.degree(v);
    if (deg == 0) continue;
    weights.assign(deg, 1.0);
    build_alias_into(weights, std::span(first_prob_).subspan(offsets[v], deg),
                     std::span(first_alias_).subspan(offsets[v], deg));
  }

  if (p == 1.0 && q == 1.0) {
    mode_ = Mode::kShared;
    return;
  }

  std::size_t entries = 0;
  for (NodeId v = 0; v < n; ++v) entries += g.degree(v) * g.degree(v);
  if (entries > max_eager_entries) {
    mode_ = Mode::kRejection;
    return;
  }

  mode_ = Mode::kEager;
  const auto adj = g.adjacency();
  edge_base_.resize(adj.size() + 1);
  edge_base_[0] = 0;
  for (NodeId t = 0; t < n; ++t) {
    for (std::size_t e = offsets[t]; e < offsets[t + 1]; ++e) {
      edge_base_[e + 1] = edge_base_[e] + g.degree(adj[e]);
    }
  }
  edge_prob_.resize(entries);
  edge_alias_.resize(entries);
  for (NodeId t = 0; t < n; ++t) {
    for (std::size_t e = offsets[t]; e < offsets[t + 1]; ++e) {
      const NodeId cur = adj[e];
      auto nbrs = g.neighbors(cur);
      weights.resize(nbrs.size());
      for (std::size_t i = 0; i < nbrs.size(); ++i) weights[i] = bias(t, nbrs[i]);
      build_alias_into(weights, std::span(edge_prob_).subspan(edge_base_[e], nbrs.size()),
                       std::span(edge_alias_).subspan(edge_base_[e], nbrs.size()));
    }
  }
}

double TransitionModel::bias(NodeId prev, NodeId next) const {
  if (next == prev) return 1.0 / p_;
  if (graph_->has_edge(prev, next)) return 1.0;
  return 1.0 / q_;
}

std::size_t TransitionModel::edge_index(NodeId prev, NodeId cur) const {
  auto nbrs = graph_->neighbors(prev);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), cur);
  if (it == nbrs.end() || *it != cur) throw std::invalid_argument("prev -> cur is not an edge");
  return graph_->offsets()[prev] + static_cast<std::size_t>(it - nbrs.begin());
}

std::size_t TransitionModel::first_step(NodeId cur, Rng& rng) const {
  const std::size_t begin = graph_->offsets()[cur];
  const std::size_t deg = graph_->offsets()[cur + 1] - begin;
  return sample_alias(std::span(first_prob_).subspan(begin, deg),
                      std::span(first_alias_).subspan(begin, deg), rng);
}

std::size_t TransitionModel::second_step(NodeId prev, NodeId cur, std::size_t edge, Rng& rng) const {
  switch (mode_) {
    case Mode::kShared:
      return first_step(cur, rng);
    case Mode::kEager: {
      const std::size_t deg = graph_->offsets()[cur + 1] - graph_->offsets()[cur];
      return sample_alias(std::span(edge_prob_).subspan(edge_base_[edge], deg),
                          std::span(edge_alias_).subspan(edge_base_[edge], deg), rng);
    }
    case Mode::kRejection: {
      auto nbrs = graph_->neighbors(cur);
      const double max_bias = std::max({1.0 / p_, 1.0, 1.0 / q_});
      std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
      while (true) {
        const std::size_t i = pick(rng);
        if (uniform01(rng) * max_bias < bias(prev, nbrs[i])) return i;
      }
    }
  }
  return 0;
}

std::vector<double> TransitionModel::reconstruct(std::span<const double> prob,
                                                 std::span<const std::uint32_t> alias) {
  const double n = static_cast<double>(prob.size());
  std::vector<double> out(prob.size(), 0.0);
  for (std::size_t j = 0; j < prob.size(); ++j) {
    out[j] += prob[j] / n;
    out[alias[j]] += (1.0 - prob[j]) / n;
  }
  return out;
}

std::vector<double> TransitionModel::first_step_distribution(NodeId cur) const {
  const std::size_t begin = graph_->offsets()[cur];
  const std::size_t deg = graph_->degree(cur);
  return reconstruct(std::span(first_prob_).subspan(begin, deg),
                     std::span(first_alias_).subspan(begin, deg));
}

std::vector<double> TransitionModel::second_step_distribution(NodeId prev, NodeId cur) const {
  const std::size_t edge = edge_index(prev, cur);
  const std::size_t deg = graph_->degree(cur);
  switch (mode_) {
    case Mode::kShared:
      return first_step_distribution(cur);
    case Mode::kEager:
      return reconstruct(std::span(edge_prob_).subspan(edge_base_[edge], deg),
                         std::span(edge_alias_).subspan(edge_base_[edge], deg));
    case Mode::kRejection:
      break;
  }
  auto nbrs = graph_->neighbors(cur);
  std::vector<double> w(deg);
  for (std::size_t i = 0; i < deg; ++i) w[i] = bias(prev, nbrs[i]);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

WalkCorpus::WalkCorpus(std::vector<NodeId> nodes, std::vector<std::size_t> offsets,
                       std::size_t walks_per_node, std::size_t max_length)
    : nodes_(std::move(nodes)),
      offsets_(std::move(offsets)),
      walks_per_node_(walks_per_node),
      max_length_(max_length) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != nodes_.size()) {
    throw std::invalid_argument("inconsistent walk offsets");
  }
}

WalkCorpus WalkCorpus::from_walks(const std::vector<std::vector<NodeId>>& walks) {
  std::vector<NodeId> nodes;
  std::vector<std::size_t> offsets{0};
  std::size_t longest = 0;
  for (const auto& w : walks) {
    nodes.insert(nodes.end(), w.begin(), w.end());
    offsets.push_back(nodes.size());
    longest = std::max(longest, w.size());
  }
  return WalkCorpus(std::move(nodes), std::move(offsets), 0, longest);
}

WalkCorpus generate_walks(const TransitionModel& tm, const WalkOptions& opts) {
  if (opts.walks_per_node == 0) throw std::invalid_argument("walks per node must be >= 1");
  if (opts.length == 0) throw std::invalid_argument("walk length must be >= 1");
  const Graph& g = tm.graph();
  const NodeId n = g.node_count();
  const std::size_t passes = opts.walks_per_node;
  const std::size_t walk_count = passes * n;

  // Slot of (pass r, node v) in the final corpus order.
  std::vector<std::size_t> slot(walk_count);
  {
    Rng shuffle_rng = make_rng(opts.seed, {kShuffleStream});
    std::vector<NodeId> order(n);
    for (std::size_t r = 0; r < passes; ++r) {
      std::iota(order.begin(), order.end(), NodeId{0});
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (NodeId i = 0; i < n; ++i) slot[r * n + order[i]] = r * n + i;
    }
  }
  std::vector<std::size_t> lengths(walk_count);
  for (std::size_t r = 0; r < passes; ++r) {
    for (NodeId v = 0; v < n; ++v) lengths[slot[r * n + v]] = g.degree(v) == 0 ? 1 : opts.length;
  }
  std::vector<std::size_t> offsets(walk_count + 1, 0);
  std::partial_sum(lengths.begin(), lengths.end(), offsets.begin() + 1);
  std::vector<NodeId> nodes(offsets.back());

  const auto adj = g.adjacency();
  const auto adj_offsets = g.offsets();
  auto walk_from = [&](NodeId start) {
    Rng rng = make_rng(opts.seed, {start});
    for (std::size_t r = 0; r < passes; ++r) {
      NodeId* out = nodes.data() + offsets[slot[r * n + start]];
      out[0] = start;
      if (g.degree(start) == 0 || opts.length == 1) continue;
      NodeId prev = start;
      std::size_t edge = adj_offsets[start] + tm.first_step(start, rng);
      NodeId cur = adj[edge];
      out[1] = cur;
      for (std::size_t step = 2; step < opts.length; ++step) {
        const std::size_t next = adj_offsets[cur] + tm.second_step(prev, cur, edge, rng);
        prev = cur;
        edge = next;
        cur = adj[edge];
        out[step] = cur;
      }
    }
  };

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    for (NodeId v = 0; v < n; ++v) walk_from(v);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (NodeId v = t; v < n; v += threads) walk_from(v);
      });
    }
  }
  return WalkCorpus(std::move(nodes), std::move(offsets), passes, opts.length);
}

void write_walks(const WalkCorpus& corpus, const Graph& g, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto w = corpus.walk(i);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j) out << ' ';
      out << g.label(w[j]);
    }
    out << '\n';
  }
}

}  // namespace kne
