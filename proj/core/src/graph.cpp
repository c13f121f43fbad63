#include "hogt/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hogt/error.hpp"

namespace hogt {

Graph::Graph(std::size_t n)
    : n_(n), adj_(n * n, 0), node_labels_(n, 0), edge_labels_(n * n, -1) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "graph must have at least one node");
}

void Graph::check_vertex(std::size_t v) const {
  if (v >= n_) {
    throw Error(ErrorKind::InvalidParameter,
                "vertex " + std::to_string(v) + " out of range for n=" + std::to_string(n_));
  }
}

void Graph::add_edge(std::size_t u, std::size_t v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw Error(ErrorKind::InvalidParameter, "self loops are not allowed");
  if (adjacent(u, v)) return;
  adj_[u * n_ + v] = adj_[v * n_ + u] = 1;
  ++edge_count_;
}

void Graph::add_edge(std::size_t u, std::size_t v, int label) {
  if (label < 0) throw Error(ErrorKind::InvalidParameter, "edge labels must be non-negative");
  add_edge(u, v);
  has_edge_labels_ = true;
  edge_labels_[u * n_ + v] = edge_labels_[v * n_ + u] = label;
}

void Graph::remove_edge(std::size_t u, std::size_t v) {
  check_vertex(u);
  check_vertex(v);
  if (!adjacent(u, v)) return;
  adj_[u * n_ + v] = adj_[v * n_ + u] = 0;
  edge_labels_[u * n_ + v] = edge_labels_[v * n_ + u] = -1;
  --edge_count_;
}

std::size_t Graph::degree(std::size_t v) const {
  check_vertex(v);
  std::size_t d = 0;
  for (std::size_t u = 0; u < n_; ++u) d += adj_[v * n_ + u];
  return d;
}

std::vector<std::size_t> Graph::neighbors(std::size_t v) const {
  check_vertex(v);
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n_; ++u)
    if (adj_[v * n_ + u]) out.push_back(u);
  return out;
}

std::vector<std::vector<std::size_t>> Graph::adjacency_lists() const {
  std::vector<std::vector<std::size_t>> out(n_);
  for (std::size_t v = 0; v < n_; ++v) out[v] = neighbors(v);
  return out;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t v = 0; v < n_; ++v) out[v] = degree(v);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count_);
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v)
      if (adjacent(u, v)) out.emplace_back(u, v);
  return out;
}

void Graph::set_node_label(std::size_t v, int label) {
  check_vertex(v);
  if (label < 0) throw Error(ErrorKind::InvalidParameter, "node labels must be non-negative");
  node_labels_[v] = label;
}

void Graph::set_node_labels(std::vector<int> labels) {
  if (labels.size() != n_) throw Error(ErrorKind::SizeMismatch, "node label count differs from n");
  for (int l : labels)
    if (l < 0) throw Error(ErrorKind::InvalidParameter, "node labels must be non-negative");
  node_labels_ = std::move(labels);
}

std::optional<int> Graph::edge_label(std::size_t u, std::size_t v) const {
  if (!has_edge_labels_ || !adjacent(u, v)) return std::nullopt;
  return edge_labels_[u * n_ + v];
}

void Graph::validate() const {
  std::size_t count = 0;
  for (std::size_t u = 0; u < n_; ++u) {
    if (adj_[u * n_ + u]) throw Error(ErrorKind::InvalidParameter, "nonzero adjacency diagonal");
    for (std::size_t v = 0; v < n_; ++v) {
      if (adj_[u * n_ + v] != adj_[v * n_ + u])
        throw Error(ErrorKind::InvalidParameter, "asymmetric adjacency");
      if (u < v && adj_[u * n_ + v]) ++count;
      bool labeled = edge_labels_[u * n_ + v] >= 0;
      if (has_edge_labels_ && labeled != (adj_[u * n_ + v] != 0))
        throw Error(ErrorKind::InvalidParameter, "edge label keys differ from the edge set");
    }
  }
  if (count != edge_count_) throw Error(ErrorKind::InvalidParameter, "edge count out of sync");
}

bool Graph::operator==(const Graph& other) const {
  return n_ == other.n_ && adj_ == other.adj_ && node_labels_ == other.node_labels_ &&
         has_edge_labels_ == other.has_edge_labels_ && edge_labels_ == other.edge_labels_;
}

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.map.resize(n);
  std::iota(p.map.begin(), p.map.end(), std::size_t{0});
  return p;
}

bool Permutation::is_valid() const {
  std::vector<std::size_t> sorted = map;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.map.resize(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) inv.map[map[i]] = i;
  return inv;
}

Graph apply_permutation(const Graph& g, const Permutation& p) {
  if (p.size() != g.n()) throw Error(ErrorKind::SizeMismatch, "permutation size differs from n");
  if (!p.is_valid()) throw Error(ErrorKind::InvalidParameter, "permutation is not a bijection");
  Graph out(g.n());
  for (auto [u, v] : g.edges()) {
    if (auto label = g.edge_label(u, v))
      out.add_edge(p.map[u], p.map[v], *label);
    else
      out.add_edge(p.map[u], p.map[v]);
  }
  for (std::size_t v = 0; v < g.n(); ++v) out.set_node_label(p.map[v], g.node_label(v));
  return out;
}

}  // namespace hogt
