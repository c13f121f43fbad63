#pragma once

#include <cstddef>
#include <vector>

#include "hogt/tensor.hpp"

namespace hogt {

inline constexpr std::size_t kMaxEigenSize = 512;
inline constexpr int kMaxJacobiSweeps = 100;

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Tensor vectors;              // column j pairs with values[j]
  int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below tol.
EigenDecomposition sym_eig(const Tensor& m, double tol = 1e-12);
std::vector<double> sym_eigvals(const Tensor& m, double tol = 1e-12);

}  // namespace hogt
