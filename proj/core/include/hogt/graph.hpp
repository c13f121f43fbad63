#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hogt {

// Undirected simple graph with dense adjacency, node labels and optional edge labels.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t edge_count() const { return edge_count_; }

  bool adjacent(std::size_t u, std::size_t v) const { return adj_[u * n_ + v] != 0; }
  void add_edge(std::size_t u, std::size_t v);
  void add_edge(std::size_t u, std::size_t v, int label);
  void remove_edge(std::size_t u, std::size_t v);

  std::size_t degree(std::size_t v) const;
  std::vector<std::size_t> neighbors(std::size_t v) const;
  std::vector<std::vector<std::size_t>> adjacency_lists() const;
  std::vector<std::size_t> degrees() const;
  // Edges as (u, v) with u < v in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  int node_label(std::size_t v) const { return node_labels_[v]; }
  const std::vector<int>& node_labels() const { return node_labels_; }
  void set_node_label(std::size_t v, int label);
  void set_node_labels(std::vector<int> labels);

  bool has_edge_labels() const { return has_edge_labels_; }
  // Label of edge {u, v}; nullopt when edges are unlabeled or u, v not adjacent.
  std::optional<int> edge_label(std::size_t u, std::size_t v) const;

  // Throws if the structural invariants are violated.
  void validate() const;

  bool operator==(const Graph& other) const;

 private:
  void check_vertex(std::size_t v) const;

  std::size_t n_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<int> node_labels_;
  bool has_edge_labels_ = false;
  std::vector<int> edge_labels_;  // n*n, -1 where absent
};

struct Permutation {
  std::vector<std::size_t> map;

  static Permutation identity(std::size_t n);
  std::size_t size() const { return map.size(); }
  bool is_valid() const;
  Permutation inverse() const;
};

// Vertex v of g becomes vertex p.map[v] of the result.
Graph apply_permutation(const Graph& g, const Permutation& p);

}  // namespace hogt
