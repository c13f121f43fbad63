#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hogt/graph.hpp"

namespace hogt {

// Circular skip-link graph: cycle on n nodes plus chords {i, i+skip mod n}.
Graph make_csl(std::size_t n, std::size_t skip);

// Skip values used for the 10-class CSL family on 41 nodes.
const std::vector<std::size_t>& csl_skip_set();

Graph make_rook_4x4();
Graph make_shrikhande();

// (G, H): G is the 4-cycle, H is a triangle with one pendant vertex.
std::pair<Graph, Graph> fig2_pair();

// Simple d-regular graph from the pairing model with rejection.
Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed);
inline constexpr int kRandomRegularMaxRetries = 10000;

Graph make_complete(std::size_t n);
Graph make_cycle(std::size_t n);
Graph make_path(std::size_t n);
// Disjoint union; vertices of b are shifted by a.n().
Graph disjoint_union(const Graph& a, const Graph& b);
// G(n, p) with each pair included independently.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);
Permutation random_permutation(std::size_t n, std::uint64_t seed);

}  // namespace hogt
