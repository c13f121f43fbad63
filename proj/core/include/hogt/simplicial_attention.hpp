#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hogt/attention.hpp"
#include "hogt/autodiff.hpp"
#include "hogt/simplicial.hpp"

namespace hogt {

enum class LaplacianUse { Bias, Reweight };

// Relation ids used by the simplicial attention variants.
enum class SimplexRelation : std::size_t { SameDim = 0, Boundary = 1, Coboundary = 2, Lower = 3, Upper = 4 };
inline constexpr std::size_t kSimplexRelationCount = 5;

struct SimplicialLayerConfig {
  std::size_t d_in = 8;
  std::size_t d_k = 8;
  std::size_t d_out = 8;
  std::size_t ffn_hidden = 16;
  LaplacianUse laplacian_use = LaplacianUse::Bias;
  // Augmented Laplacian (boundary blocks off the diagonal) or the block-diagonal one.
  bool use_augmented = true;
  // Bias mode only: -inf outside the diagonal blocks, so each dimension attends to itself.
  bool mask_off_diagonal_blocks = false;
  // Top-dimension simplices become upper adjacent when they share a (K+1)-clique
  // of the 1-skeleton, even though that clique is not a token.
  bool include_coboundary_above_K = false;
  std::size_t virtual_count = 1;

  void validate() const;
};

struct SimplicialWeights {
  Tensor q, bq, k, bk;              // shared query / key maps
  std::vector<Tensor> v, bv;        // per-dimension value maps (d_in x d_out)
  // phi scale per SimplexRelation; identity (all ones) by default.
  Tensor relation_scale;
  LayerWeights mix;                 // w_o (d_out x d_in) and FFN of the dense / neighbour layers
  LayerWeights virtual_layer;       // complete weights of the virtual simplex layer
};

SimplicialWeights init_simplicial_weights(const SimplicialComplex& c, const SimplicialLayerConfig& cfg,
                                          std::uint64_t seed);

struct SimplexFeatures {
  Tensor x;  // dimension-major rows, c.total() x d
};

// One constant row per dimension.
SimplexFeatures constant_simplex_features(const SimplicialComplex& c, std::size_t d, std::uint64_t seed);
SimplexFeatures random_simplex_features(const SimplicialComplex& c, std::size_t d, std::uint64_t seed);

struct SimplicialOutput {
  Tensor x;
  Tensor core;  // attention output before the output mix and residual
  std::optional<Tensor> virtual_x;
};

struct SimplicialTapeOutput {
  ad::Var x;
  ad::Var core;
  std::optional<ad::Var> virtual_x;
};

// Dense attention over all tokens with the Laplacian as additive bias or as a
// reweighting of the softmax output.
SimplicialTapeOutput simplicial_dense_on_tape(ad::Tape& tape, ad::Var x, const SimplicialComplex& c,
                                              const SimplicialWeights& w, const SimplicialLayerConfig& cfg);
SimplicialOutput forward_simplicial_dense(const SimplicialComplex& c, const SimplexFeatures& x,
                                          const SimplicialWeights& w, const SimplicialLayerConfig& cfg);

// Keys of each token: boundary faces, coboundary cofaces, lower and upper
// adjacent simplices, one entry per relation type.
KeyPattern simplex_neighbor_pattern(const SimplicialComplex& c, bool include_coboundary_above_K = false);
SimplicialTapeOutput simplex_ngbh_on_tape(ad::Tape& tape, ad::Var x, const SimplicialComplex& c,
                                          const SimplicialWeights& w, const SimplicialLayerConfig& cfg);
SimplicialOutput forward_simplex_ngbh(const SimplicialComplex& c, const SimplexFeatures& x,
                                      const SimplicialWeights& w, const SimplicialLayerConfig& cfg);

// Virtual tuple attention over all simplex tokens.
SimplicialTapeOutput virtual_simplex_on_tape(ad::Tape& tape, ad::Var x, const SimplicialComplex& c,
                                             const SimplicialWeights& w, const SimplicialLayerConfig& cfg);
SimplicialOutput forward_virtual_simplex(const SimplicialComplex& c, const SimplexFeatures& x,
                                         const SimplicialWeights& w, const SimplicialLayerConfig& cfg);

struct MpsnRecoveryReport {
  double max_abs_diff = 0.0;
  double tol = 0.0;
  bool passed = false;
};
// Reweighted dense layer with constant query/key maps, identity reweighting on
// the augmented Laplacian and values W_k times the token count; its attention
// output is compared with mpsn_reference.
MpsnRecoveryReport verify_mpsn_recovery(const SimplicialComplex& c, const Tensor& x, const std::vector<Tensor>& w,
                                        double tol = 1e-8);

}  // namespace hogt
