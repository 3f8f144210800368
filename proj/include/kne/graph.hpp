#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kne {

using NodeId = std::uint32_t;
inline constexpr NodeId kInvalidNode = static_cast<NodeId>(-1);

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Simple undirected graph in compressed sparse row form. Neighbor slices are
// strictly increasing, symmetric and free of self-loops. Immutable once built.
class Graph {
 public:
  Graph() : offsets_{0} {}

  // Builds from an arbitrary undirected edge list over ids [0, n). Duplicates
  // and reversed duplicates collapse, self-loops are dropped.
  static Graph from_edges(NodeId n, std::vector<Edge> edges, std::vector<std::string> labels = {});

  NodeId node_count() const noexcept { return static_cast<NodeId>(offsets_.size() - 1); }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> adjacency() const noexcept { return neighbors_; }

  // Original token of a dense id; the decimal id when the graph was built
  // without labels.
  std::string label(NodeId v) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }

  // Each undirected edge once, u < v, in ascending order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<std::string> labels_;
};

// Whitespace-separated edge list; '#' lines and blank lines are skipped.
// Node tokens are densified in order of first appearance.
Graph parse_edge_list(std::istream& in);
Graph parse_edge_list(std::string_view text);
Graph read_edge_list(const std::string& path);

// Inverse of parse_edge_list up to relabeling; emits original labels.
void write_edge_list(const Graph& g, std::ostream& out);

// Component id per node (ids ordered by smallest member) and the count.
std::pair<std::vector<NodeId>, NodeId> connected_components(const Graph& g);

bool is_connected(const Graph& g);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> old_to_new;  // kInvalidNode for dropped nodes
  std::vector<NodeId> new_to_old;
};

// Induced subgraph on the largest connected component (ties go to the
// component holding the smallest node id). Labels follow the nodes.
Subgraph giant_component(const Graph& g);

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> keep);

}  // namespace kne
