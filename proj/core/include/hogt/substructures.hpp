#pragma once

#include <cstdint>

#include "hogt/graph.hpp"

namespace hogt {

// Subgraph counts used by the counting benchmark.
//   triangles        closed 3-sets
//   tailed_triangles one per (triangle, pendant edge at a triangle vertex)
//   stars            K_{1,3} copies, sum over centers of C(deg, 3)
//   chordal_cycles   one per (diamond, chord endpoint): 2x the number of K4-minus-edge subgraphs
struct SubstructureCounts {
  std::uint64_t triangles = 0;
  std::uint64_t tailed_triangles = 0;
  std::uint64_t stars = 0;
  std::uint64_t chordal_cycles = 0;

  bool operator==(const SubstructureCounts&) const = default;
};

SubstructureCounts count_substructures(const Graph& g);

// Number of k-cliques (k >= 1) by ordered extension.
std::uint64_t count_cliques(const Graph& g, std::size_t k);

}  // namespace hogt
