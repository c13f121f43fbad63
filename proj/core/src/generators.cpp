#include "hogt/generators.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hogt/error.hpp"
#include "hogt/rng.hpp"

namespace hogt {

Graph make_csl(std::size_t n, std::size_t skip) {
  if (n < 5) throw Error(ErrorKind::InvalidParameter, "CSL requires n >= 5");
  if (skip < 2 || skip > n - 2)
    throw Error(ErrorKind::InvalidParameter,
                "CSL skip " + std::to_string(skip) + " outside [2, n-2]");
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.add_edge(i, (i + 1) % n);
    g.add_edge(i, (i + skip) % n);
  }
  return g;
}

const std::vector<std::size_t>& csl_skip_set() {
  static const std::vector<std::size_t> skips{2, 3, 4, 5, 6, 9, 11, 12, 13, 16};
  return skips;
}

Graph make_rook_4x4() {
  Graph g(16);
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = a + 1; b < 16; ++b)
      if (a / 4 == b / 4 || a % 4 == b % 4) g.add_edge(a, b);
  return g;
}

Graph make_shrikhande() {
  Graph g(16);
  auto id = [](int r, int c) { return static_cast<std::size_t>(((r + 4) % 4) * 4 + (c + 4) % 4); };
  const int diffs[3][2] = {{1, 0}, {0, 1}, {1, 1}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (const auto& d : diffs) g.add_edge(id(r, c), id(r + d[0], c + d[1]));
  return g;
}

std::pair<Graph, Graph> fig2_pair() {
  Graph g = make_cycle(4);
  Graph h(4);
  h.add_edge(0, 1);
  h.add_edge(1, 2);
  h.add_edge(0, 2);
  h.add_edge(2, 3);
  return {g, h};
}

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "random_regular requires n >= 1");
  if ((n * d) % 2 != 0) throw Error(ErrorKind::InvalidParameter, "n*d must be even");
  if (d >= n) throw Error(ErrorKind::InvalidParameter, "degree must be below n");
  Rng rng(seed);
  std::vector<std::size_t> points(n * d);
  for (std::size_t i = 0; i < points.size(); ++i) points[i] = i / d;
  for (int attempt = 0; attempt < kRandomRegularMaxRetries; ++attempt) {
    rng.shuffle(points);
    Graph g(n);
    bool ok = true;
    for (std::size_t i = 0; i < points.size(); i += 2) {
      std::size_t u = points[i], v = points[i + 1];
      if (u == v || g.adjacent(u, v)) {
        ok = false;
        break;
      }
      g.add_edge(u, v);
    }
    if (ok) return g;
  }
  throw Error(ErrorKind::GenerationFailure,
              "pairing model did not produce a simple graph within the retry budget");
}

Graph make_complete(std::size_t n) {
  Graph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

Graph make_cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorKind::InvalidParameter, "cycle requires n >= 3");
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph make_path(std::size_t n) {
  Graph g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph disjoint_union(const Graph& a, const Graph& b) {
  Graph g(a.n() + b.n());
  for (auto [u, v] : a.edges()) g.add_edge(u, v);
  for (auto [u, v] : b.edges()) g.add_edge(u + a.n(), v + a.n());
  for (std::size_t v = 0; v < a.n(); ++v) g.set_node_label(v, a.node_label(v));
  for (std::size_t v = 0; v < b.n(); ++v) g.set_node_label(v + a.n(), b.node_label(v));
  return g;
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  Graph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.uniform() < p) g.add_edge(u, v);
  return g;
}

Permutation random_permutation(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Permutation p = Permutation::identity(n);
  rng.shuffle(p.map);
  return p;
}

}  // namespace hogt
