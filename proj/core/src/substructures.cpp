#include "hogt/substructures.hpp"

#include <vector>

namespace hogt {

SubstructureCounts count_substructures(const Graph& g) {
  const std::size_t n = g.n();
  SubstructureCounts out;
  std::vector<std::size_t> deg = g.degrees();

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!g.adjacent(a, b)) continue;
      for (std::size_t c = b + 1; c < n; ++c) {
        if (!g.adjacent(a, c) || !g.adjacent(b, c)) continue;
        ++out.triangles;
        out.tailed_triangles += (deg[a] - 2) + (deg[b] - 2) + (deg[c] - 2);
      }
    }

  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t d = deg[v];
    if (d >= 3) out.stars += d * (d - 1) * (d - 2) / 6;
  }

  // A diamond with chord {u, v} is a pair of common neighbours of u and v.
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v || !g.adjacent(u, v)) continue;
      std::uint64_t common = 0;
      for (std::size_t w = 0; w < n; ++w)
        if (g.adjacent(u, w) && g.adjacent(v, w)) ++common;
      out.chordal_cycles += common * (common - 1) / 2;
    }
  return out;
}

namespace {
void extend_clique(const Graph& g, std::vector<std::size_t>& clique, std::size_t k,
                   std::uint64_t& count) {
  if (clique.size() == k) {
    ++count;
    return;
  }
  std::size_t start = clique.empty() ? 0 : clique.back() + 1;
  for (std::size_t v = start; v < g.n(); ++v) {
    bool ok = true;
    for (std::size_t u : clique)
      if (!g.adjacent(u, v)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    clique.push_back(v);
    extend_clique(g, clique, k, count);
    clique.pop_back();
  }
}
}  // namespace

std::uint64_t count_cliques(const Graph& g, std::size_t k) {
  std::uint64_t count = 0;
  std::vector<std::size_t> clique;
  extend_clique(g, clique, k, count);
  return count;
}

}  // namespace hogt
