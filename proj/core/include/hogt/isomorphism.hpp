#pragma once

#include <cstddef>

#include "hogt/graph.hpp"

namespace hogt {

inline constexpr std::size_t kIsomorphismGuardN = 12;

// Exact isomorphism test by backtracking over label- and degree-consistent maps.
// Throws ResourceGuard for n > 12 unless force is set.
bool isomorphic_bruteforce(const Graph& g, const Graph& h, bool force = false);

}  // namespace hogt
