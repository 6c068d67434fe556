#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace grefine {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Simple undirected graph on a dense 0-based node range. Stores a dense
// adjacency matrix for O(1) membership plus per-node neighbour lists for
// O(deg) iteration. The class label rides along but is never consulted by
// edits.
class Graph {
 public:
  Graph() = default;

  explicit Graph(std::size_t node_count, std::optional<int> class_label = std::nullopt)
      : n_(node_count),
        adjacency_(node_count * node_count, 0),
        neighbours_(node_count),
        class_label_(class_label) {}

  Graph(std::size_t node_count, const std::vector<Edge>& edges,
        std::optional<int> class_label = std::nullopt)
      : Graph(node_count, class_label) {
    for (const auto& [u, v] : edges) add_edge(u, v);
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const std::optional<int>& class_label() const noexcept { return class_label_; }
  void set_class_label(std::optional<int> label) noexcept { class_label_ = label; }

  bool has_edge(NodeId u, NodeId v) const {
    check_range(u, v);
    return adjacency_[index(u, v)] != 0;
  }

  // Idempotent. Throws on self-loops and out-of-range endpoints.
  void add_edge(NodeId u, NodeId v) {
    check_range(u, v);
    if (u == v) {
      throw std::invalid_argument("Graph::add_edge: self-loop {" + std::to_string(u) + "," +
                                  std::to_string(v) + "}");
    }
    if (adjacency_[index(u, v)] != 0) return;
    adjacency_[index(u, v)] = 1;
    adjacency_[index(v, u)] = 1;
    neighbours_[u].push_back(v);
    neighbours_[v].push_back(u);
    ++edge_count_;
  }

  // Removing a missing edge (or a self-pair) is a no-op.
  void remove_edge(NodeId u, NodeId v) {
    check_range(u, v);
    if (u == v || adjacency_[index(u, v)] == 0) return;
    adjacency_[index(u, v)] = 0;
    adjacency_[index(v, u)] = 0;
    erase_neighbour(u, v);
    erase_neighbour(v, u);
    --edge_count_;
  }

  void toggle_edge(NodeId u, NodeId v) {
    if (has_edge(u, v)) {
      remove_edge(u, v);
    } else {
      add_edge(u, v);
    }
  }

  std::size_t degree(NodeId v) const {
    check_range(v, v);
    return neighbours_[v].size();
  }

  // Neighbour order reflects edit history; callers must not rely on it.
  const std::vector<NodeId>& neighbours(NodeId v) const {
    check_range(v, v);
    return neighbours_[v];
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(n_);
    for (std::size_t v = 0; v < n_; ++v) out[v] = neighbours_[v].size();
    return out;
  }

  // Canonical edge list: u < v, lexicographically sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < n_; ++u) {
      for (NodeId v = u + 1; v < n_; ++v) {
        if (adjacency_[index(u, v)] != 0) out.emplace_back(u, v);
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.class_label_ == b.class_label_ && a.adjacency_ == b.adjacency_;
  }

  // Structure-only comparison, ignoring class labels.
  bool same_structure(const Graph& other) const {
    return n_ == other.n_ && adjacency_ == other.adjacency_;
  }

 private:
  std::size_t index(NodeId u, NodeId v) const noexcept {
    return static_cast<std::size_t>(u) * n_ + v;
  }

  void check_range(NodeId u, NodeId v) const {
    if (u >= n_ || v >= n_) {
      throw std::out_of_range("Graph: node index out of range (" + std::to_string(u) + ", " +
                              std::to_string(v) + ") for node_count " + std::to_string(n_));
    }
  }

  void erase_neighbour(NodeId from, NodeId target) {
    auto& list = neighbours_[from];
    auto it = std::find(list.begin(), list.end(), target);
    *it = list.back();
    list.pop_back();
  }

  std::size_t n_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::vector<NodeId>> neighbours_;
  std::optional<int> class_label_;
};

// Cycle 0-1-...-(n-1)-0.
inline Graph ring_graph(std::size_t n) {
  Graph g(n);
  if (n < 3) {
    if (n == 2) g.add_edge(0, 1);
    return g;
  }
  for (NodeId v = 0; v < n; ++v) g.add_edge(v, static_cast<NodeId>((v + 1) % n));
  return g;
}

}  // namespace grefine
