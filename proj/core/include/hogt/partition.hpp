#pragma once

#include <cstddef>
#include <limits>

#include "hogt/tensor.hpp"
#include "hogt/tuple_features.hpp"
#include "hogt/wl.hpp"

namespace hogt {

inline constexpr double kDefaultPartitionTol = 1e-7;

struct PartitionExtraction {
  Coloring coloring;
  // Smallest max-norm distance between representatives of two different classes
  // (infinity with fewer than two classes).
  double min_gap = std::numeric_limits<double>::infinity();
  // Largest max-norm distance from a row to its class representative.
  double max_spread = 0.0;
};

// Groups rows whose columns [col_begin, col_end) agree up to tol. Each column is
// swept in sorted order and a class is split wherever consecutive values are more
// than tol apart. Colors are numbered by first appearance.
PartitionExtraction extract_partition(const Tensor& x, double tol = kDefaultPartitionTol, std::size_t col_begin = 0,
                                      std::size_t col_end = std::numeric_limits<std::size_t>::max());
PartitionExtraction extract_partition(const TupleFeatures& x, double tol = kDefaultPartitionTol);

}  // namespace hogt
