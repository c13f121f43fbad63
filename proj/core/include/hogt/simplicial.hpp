#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hogt/graph.hpp"
#include "hogt/tensor.hpp"

namespace hogt {

inline constexpr std::size_t kDefaultMaxSimplexDim = 3;
inline constexpr std::size_t kDefaultSimplexBudget = 1'000'000;

// Strictly increasing vertex list; a k-simplex has k + 1 vertices.
using Simplex = std::vector<std::size_t>;

class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  // Sorts each dimension and checks closure under faces (SubcomplexError otherwise).
  SimplicialComplex(std::size_t num_vertices, std::size_t max_dim, std::vector<std::vector<Simplex>> simplices);

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t max_dim() const { return max_dim_; }
  // Number of k-simplices (0 for k > max_dim).
  std::size_t count(std::size_t k) const;
  std::size_t total() const;
  // Row offset of dimension k in the dimension-major token order.
  std::size_t offset(std::size_t k) const;
  const std::vector<Simplex>& simplices(std::size_t k) const { return simplices_.at(k); }
  std::optional<std::size_t> index_of(const Simplex& s) const;
  bool contains(const Simplex& s) const { return index_of(s).has_value(); }
  // Dimension of each token in dimension-major order.
  std::vector<std::size_t> token_dims() const;

 private:
  std::size_t num_vertices_ = 0;
  std::size_t max_dim_ = 0;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::map<Simplex, std::size_t>> index_;
};

// k-simplices are the (k+1)-cliques of g for k <= max_dim.
SimplicialComplex clique_complex(const Graph& g, std::size_t max_dim = kDefaultMaxSimplexDim,
                                 std::size_t budget = kDefaultSimplexBudget);
bool is_subcomplex(const SimplicialComplex& small, const SimplicialComplex& large);
// {"K": K, "simplices": [[[v...], ...] per dimension]}
std::string complex_to_json(const SimplicialComplex& c);

struct IntMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
  std::int64_t& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool is_zero() const;
  Tensor to_tensor() const;
};

IntMatrix int_matmul(const IntMatrix& a, const IntMatrix& b);
IntMatrix int_transpose(const IntMatrix& a);

// b[k] is the |S_{k-1}| x |S_k| signed boundary for k = 0..K+1; b[0] is 0 x |S_0|
// and b[K+1] is |S_K| x 0. The face omitting the j-th vertex gets sign (-1)^j.
std::vector<IntMatrix> boundary_matrices(const SimplicialComplex& c);

struct HodgeLaplacians {
  std::vector<Tensor> per_dim;  // L_k = B_k^T B_k + B_{k+1} B_{k+1}^T
  Tensor block;                 // block diagonal of the L_k
  Tensor augmented;             // L_k on the diagonal, B_k / B_k^T on the off-diagonal blocks
  std::vector<std::size_t> offsets;
};
HodgeLaplacians hodge(const SimplicialComplex& c);

// Image of each token under a vertex relabeling: dest[t] is the row of the
// relabelled simplex in `image`, sign[t] the parity of the sort that restores
// increasing order.
struct SimplexRelabeling {
  SimplicialComplex image;
  std::vector<std::size_t> dest;
  std::vector<int> sign;
};
SimplexRelabeling relabel_complex(const SimplicialComplex& c, const Permutation& p);

// Linear message passing update for every dimension k:
//   B_k^T X_{k-1} W_{k-1} + L_k X_k W_k + B_{k+1} X_{k+1} W_{k+1}
// x is dimension-major (c.total() rows); w[j] is the weight applied to dimension j.
Tensor mpsn_reference(const SimplicialComplex& c, const Tensor& x, const std::vector<Tensor>& w);

struct SpectralReport {
  std::vector<double> small;  // ascending, left-padded with zeros to the large size
  std::vector<double> large;
  double max_violation = 0.0;  // max_j (small_j - large_j)
  double tol = 0.0;
  bool passed = false;
};
// A = relu(XQ) relu(XQ)^T + block Laplacian, for the subcomplex (features
// restricted to its simplices) and for the full complex.
SpectralReport spectral_monotonicity_check(const SimplicialComplex& small, const SimplicialComplex& large,
                                           const Tensor& x_large, const Tensor& q, double tol = 1e-8);

}  // namespace hogt
