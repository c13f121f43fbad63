#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hogt/graph.hpp"
#include "hogt/tensor.hpp"
#include "hogt/wl.hpp"

namespace hogt {

enum class FeatureProvenance { IsomorphismType, IndexEncoded, Custom };

// Rows follow the row-major TupleSpace order of [n]^k.
struct TupleFeatures {
  std::size_t n = 0;
  std::size_t k = 0;
  Tensor x;
  FeatureProvenance provenance = FeatureProvenance::Custom;
  // Virtual tuple rows (virtual_tuple layers only), one row per virtual tuple.
  Tensor virtual_x;

  void validate() const;
};

// Each isomorphism type gets a d-dim normal embedding keyed on its signature,
// so equal types map to equal rows across graphs.
TupleFeatures init_tuple_features(const Graph& g, std::size_t k, std::size_t d, std::uint64_t embed_seed,
                                  std::size_t budget = kDefaultTupleBudget);

// dest[t] = flat index of the image of tuple t under the vertex permutation p.
std::vector<std::size_t> tuple_permutation(const TupleSpace& ts, const Permutation& p);
// out.row(dest[i]) = x.row(i).
Tensor permute_rows(const Tensor& x, const std::vector<std::size_t>& dest);

}  // namespace hogt
