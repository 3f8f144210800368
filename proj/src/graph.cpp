#include "kne/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace kne {

Graph Graph::from_edges(NodeId n, std::vector<Edge> edges, std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != n) {
    throw std::invalid_argument("label count does not match node count");
  }
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw std::out_of_range("edge endpoint out of range");
    if (e.u == e.v) continue;
    directed.push_back({e.u, e.v});
    directed.push_back({e.v, e.u});
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.neighbors_.reserve(directed.size());
  for (const Edge& e : directed) {
    ++g.offsets_[e.u + 1];
    g.neighbors_.push_back(e.v);
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.labels_ = std::move(labels);
  return g;
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  if (v >= node_count()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  return std::span<const NodeId>(neighbors_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::size_t Graph::degree(NodeId v) const {
  if (v >= node_count()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  return offsets_[v + 1] - offsets_[v];
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::string Graph::label(NodeId v) const {
  if (v >= node_count()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  return labels_.empty() ? std::to_string(v) : labels_[v];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

Graph parse_edge_list(std::istream& in) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.try_emplace(token, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError("expected two node tokens", line_no);
    if (fields >> extra) throw ParseError("unexpected token '" + extra + "'", line_no);
    NodeId u = intern(a);
    NodeId v = intern(b);
    edges.push_back({u, v});
  }
  if (labels.empty()) throw ParseError("edge list is empty", 0);
  auto n = static_cast<NodeId>(labels.size());
  return Graph::from_edges(n, std::move(edges), std::move(labels));
}

Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return parse_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (const Edge& e : g.edges()) out << g.label(e.u) << ' ' << g.label(e.v) << '\n';
}

std::pair<std::vector<NodeId>, NodeId> connected_components(const Graph& g) {
  const NodeId n = g.node_count();
  std::vector<NodeId> comp(n, kInvalidNode);
  std::vector<NodeId> frontier;
  NodeId count = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] != kInvalidNode) continue;
    comp[s] = count;
    frontier.assign(1, s);
    while (!frontier.empty()) {
      NodeId v = frontier.back();
      frontier.pop_back();
      for (NodeId w : g.neighbors(v)) {
        if (comp[w] == kInvalidNode) {
          comp[w] = count;
          frontier.push_back(w);
        }
      }
    }
    ++count;
  }
  return {std::move(comp), count};
}

bool is_connected(const Graph& g) {
  return g.node_count() <= 1 || connected_components(g).second == 1;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> keep) {
  Subgraph out;
  out.old_to_new.assign(g.node_count(), kInvalidNode);
  out.new_to_old.assign(keep.begin(), keep.end());
  std::sort(out.new_to_old.begin(), out.new_to_old.end());
  out.new_to_old.erase(std::unique(out.new_to_old.begin(), out.new_to_old.end()), out.new_to_old.end());
  for (NodeId i = 0; i < out.new_to_old.size(); ++i) out.old_to_new[out.new_to_old[i]] = i;

  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (NodeId old : out.new_to_old) {
    if (g.has_labels()) labels.push_back(g.label(old));
    for (NodeId w : g.neighbors(old)) {
      if (old < w && out.old_to_new[w] != kInvalidNode) {
        edges.push_back({out.old_to_new[old], out.old_to_new[w]});
      }
    }
  }
  out.graph = Graph::from_edges(static_cast<NodeId>(out.new_to_old.size()), std::move(edges),
                                std::move(labels));
  return out;
}

Subgraph giant_component(const Graph& g) {
  auto [comp, count] = connected_components(g);
  std::vector<std::size_t> sizes(count, 0);
  for (NodeId c : comp) ++sizes[c];
  const auto largest =
      static_cast<NodeId>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> keep;
  keep.reserve(sizes.empty() ? 0 : sizes[largest]);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (comp[v] == largest) keep.push_back(v);
  }
  return induced_subgraph(g, keep);
}

}  // namespace kne
