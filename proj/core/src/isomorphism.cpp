#include "hogt/isomorphism.hpp"

#include <algorithm>
#include <vector>

#include "hogt/error.hpp"

namespace hogt {

namespace {

struct Search {
  const Graph& g;
  const Graph& h;
  std::vector<std::size_t> deg_g, deg_h;
  std::vector<std::size_t> order;  // g vertices in mapping order
  std::vector<long> map_gh;
  std::vector<bool> used;

  bool consistent(std::size_t gv, std::size_t hv, std::size_t depth) const {
    for (std::size_t i = 0; i < depth; ++i) {
      std::size_t gu = order[i];
      std::size_t hu = static_cast<std::size_t>(map_gh[gu]);
      if (g.adjacent(gu, gv) != h.adjacent(hu, hv)) return false;
      if (g.edge_label(gu, gv) != h.edge_label(hu, hv)) return false;
    }
    return true;
  }

  bool run(std::size_t depth) {
    if (depth == order.size()) return true;
    std::size_t gv = order[depth];
    for (std::size_t hv = 0; hv < h.n(); ++hv) {
      if (used[hv] || deg_h[hv] != deg_g[gv] || h.node_label(hv) != g.node_label(gv)) continue;
      if (!consistent(gv, hv, depth)) continue;
      used[hv] = true;
      map_gh[gv] = static_cast<long>(hv);
      if (run(depth + 1)) return true;
      used[hv] = false;
      map_gh[gv] = -1;
    }
    return false;
  }
};

}  // namespace

bool isomorphic_bruteforce(const Graph& g, const Graph& h, bool force) {
  if (!force && std::max(g.n(), h.n()) > kIsomorphismGuardN)
    throw Error(ErrorKind::ResourceGuard, "brute-force isomorphism limited to n <= 12");
  if (g.n() != h.n() || g.edge_count() != h.edge_count()) return false;
  if (g.has_edge_labels() != h.has_edge_labels()) return false;

  Search s{g, h, g.degrees(), h.degrees(), {}, std::vector<long>(g.n(), -1),
           std::vector<bool>(h.n(), false)};
  auto sorted_deg_g = s.deg_g, sorted_deg_h = s.deg_h;
  std::sort(sorted_deg_g.begin(), sorted_deg_g.end());
  std::sort(sorted_deg_h.begin(), sorted_deg_h.end());
  if (sorted_deg_g != sorted_deg_h) return false;
  auto labels_g = g.node_labels(), labels_h = h.node_labels();
  std::sort(labels_g.begin(), labels_g.end());
  std::sort(labels_h.begin(), labels_h.end());
  if (labels_g != labels_h) return false;

  // Breadth-first order from high-degree vertices keeps the partial map connected.
  std::vector<bool> seen(g.n(), false);
  std::vector<std::size_t> by_degree(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) by_degree[i] = i;
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](std::size_t a, std::size_t b) { return s.deg_g[a] > s.deg_g[b]; });
  for (std::size_t root : by_degree) {
    if (seen[root]) continue;
    seen[root] = true;
    std::size_t head = s.order.size();
    s.order.push_back(root);
    while (head < s.order.size()) {
      std::size_t v = s.order[head++];
      for (std::size_t u : g.neighbors(v))
        if (!seen[u]) {
          seen[u] = true;
          s.order.push_back(u);
        }
    }
  }
  return s.run(0);
}

}  // namespace hogt
