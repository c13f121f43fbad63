#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hogt/autodiff.hpp"
#include "hogt/graph.hpp"
#include "hogt/tensor.hpp"
#include "hogt/tuple_features.hpp"
#include "hogt/wl.hpp"

namespace hogt {

enum class AttentionVariant { Dense, Kernelized, Ngbh, NgbhPlus, LocalNgbh, VirtualTuple, Cross12 };
enum class KernelType { None, Linear, Performer };
enum class NgbhPlusMode { Bias, Reweight };
// Softmax: row-normalized exp scores. Relu: relu(score). ReluThreshold: relu(score - threshold).
enum class ScoreActivation { Softmax, Relu, ReluThreshold };
enum class CrossMode { Dense, Sparse };
enum class Pooling { Sum, Mean, Max };

std::string to_string(AttentionVariant v);
AttentionVariant parse_attention_variant(const std::string& s);

struct KernelConfig {
  KernelType type = KernelType::None;
  std::size_t features = 256;  // performer feature count m
  std::uint64_t seed = 0;
};

struct LayerConfig {
  std::size_t k = 2;
  AttentionVariant variant = AttentionVariant::Dense;
  std::size_t heads = 1;
  std::size_t d_in = 8;        // tuple feature width; also the layer output width
  std::size_t d_k = 8;         // query/key width
  std::size_t d_out = 8;       // per-head value width
  std::size_t ffn_hidden = 16;
  std::size_t d_edge = 4;      // cross_1_2 edge feature width
  KernelConfig kernel;
  NgbhPlusMode ngbh_plus_mode = NgbhPlusMode::Bias;
  std::size_t virtual_tuple_count = 1;
  ScoreActivation activation = ScoreActivation::Softmax;
  double relu_threshold = 0.0;
  CrossMode cross_mode = CrossMode::Dense;
  bool allow_any_heads = false;  // lifts the heads == k requirement of ngbh/local_ngbh

  // Number of attention heads that feed the output mix.
  std::size_t effective_heads() const;
  void validate() const;
};

struct HeadWeights {
  Tensor q, bq;  // d_in x d_k, [d_k]
  Tensor k, bk;  // d_in x d_k, [d_k]
  Tensor v, bv;  // d_in x d_value, [d_value]
};

struct LayerWeights {
  std::vector<HeadWeights> heads;
  Tensor w_o, b_o;  // (heads * d_out) x d_in, [d_in]
  Tensor w1, b1;    // d_in x ffn_hidden
  Tensor w2, b2;    // ffn_hidden x d_in
  Tensor adj_embed;     // heads x 2: bias or scale per adjacency value (ngbh_plus)
  Tensor performer_w;   // m x d_k random features (performer)
  // virtual tuples: initial rows, update heads (value d_in x d_in), read matrices (d_in x d_out)
  Tensor virtual_x;
  std::vector<HeadWeights> virtual_update;
  std::vector<Tensor> virtual_read;
  std::vector<Tensor> virtual_read_bias;
  // cross_1_2 edge and tuple MLPs
  Tensor edge_w1, edge_b1, edge_w2, edge_b2;
  Tensor tuple_w1, tuple_b1, tuple_w2, tuple_b2;
};

// Normal initialization scaled by 1/sqrt(fan_in); biases N(0, 0.1^2).
LayerWeights init_layer_weights(const LayerConfig& cfg, std::uint64_t seed);
// All tensors in a fixed order (for binary dumps).
std::vector<Tensor> flatten_weights(const LayerWeights& w);

struct LayerReport {
  std::size_t denominator_fallbacks = 0;  // kernelized queries that fell back to uniform averaging
};

// Sparse key pattern: entries [offsets[q], offsets[q+1]) belong to query q.
struct KeyPattern {
  std::vector<std::size_t> query;
  std::vector<std::size_t> key;
  std::vector<std::size_t> relation;  // relation id per entry (adjacency bit, relation type, ...)
  std::vector<std::size_t> offsets;
  std::size_t num_queries = 0;

  std::vector<std::size_t> keys_of(std::size_t q) const;
};

// Head j of ngbh attention: keys psi_j(i, u) for all u; relation = adj(i_j, u).
KeyPattern ngbh_pattern(const TupleSpace& ts, const Graph& g, std::size_t j);
// Head j of local attention: keys psi_j(i, v) for v in N(i_j); relation = 1.
KeyPattern local_ngbh_pattern(const TupleSpace& ts, const Graph& g, std::size_t j);
// Cross attention: query node i over the 2-tuples containing i ((i,u) for all u, then (u,i), u != i).
KeyPattern cross_sparse_pattern(std::size_t n);
KeyPattern dense_pattern(std::size_t num_queries, std::size_t num_keys);

// ---- differentiable building blocks (values recorded on a tape)

ad::Var linear(ad::Tape& tape, ad::Var x, const Tensor& w, const Tensor& b);
// Concat heads, output mix, residual, 2-layer relu FFN.
ad::Var combine_heads(ad::Tape& tape, ad::Var x, const std::vector<ad::Var>& heads, const LayerWeights& w);
ad::Var dense_head(ad::Tape& tape, ad::Var q, ad::Var k, ad::Var v, const LayerConfig& cfg);
// Attention restricted to a key pattern. Optional per-entry additive bias or
// post-activation scale (columns of size pattern.key.size()).
ad::Var sparse_head(ad::Tape& tape, ad::Var q, ad::Var k, ad::Var v, const KeyPattern& pattern,
                    const LayerConfig& cfg, std::optional<ad::Var> bias = std::nullopt,
                    std::optional<ad::Var> reweight = std::nullopt);
ad::Var kernel_feature_map(ad::Tape& tape, ad::Var x, const LayerConfig& cfg, const LayerWeights& w);
ad::Var kernelized_head(ad::Tape& tape, ad::Var q, ad::Var k, ad::Var v, const LayerConfig& cfg,
                        const LayerWeights& w, LayerReport* report);

struct TapeLayerOutput {
  ad::Var x;                        // tuple (or node) rows
  std::optional<ad::Var> virtual_x; // virtual tuple rows
  std::optional<ad::Var> tuples;    // cross_1_2: updated 2-tuple rows
  std::optional<ad::Var> edges;     // cross_1_2: updated edge rows
};

struct CrossInputs {
  ad::Var tuples;  // n^2 x d_in
  ad::Var edges;   // n^2 x d_edge
};

// Any variant on a tape. g is required by graph-aware variants; cross needs `cross`.
TapeLayerOutput layer_on_tape(ad::Tape& tape, ad::Var x, const LayerWeights& w, const LayerConfig& cfg,
                              const Graph* g, std::optional<CrossInputs> cross = std::nullopt,
                              LayerReport* report = nullptr);

// ---- value-level forwards

TupleFeatures forward_dense(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg);
TupleFeatures forward_kernelized(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg,
                                 LayerReport* report = nullptr);
// Handles both ngbh and ngbh_plus (cfg.variant).
TupleFeatures forward_ngbh(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg,
                           const Graph& g);
TupleFeatures forward_local_ngbh(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg,
                                 const Graph& g);
// Updated virtual rows are returned in virtual_x.
TupleFeatures forward_virtual_tuple(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg);

struct CrossOutput {
  Tensor nodes;   // n x d_in
  TupleFeatures tuples;
  Tensor edges;   // n^2 x d_edge, zero rows for non-edges
};
CrossOutput forward_cross_1_2(const Tensor& nodes, const TupleFeatures& tuples, const Tensor& edges,
                              const LayerWeights& w, const LayerConfig& cfg, const Graph& g);

// Dispatch on cfg.variant (not cross_1_2).
TupleFeatures forward(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg,
                      const Graph* g = nullptr, LayerReport* report = nullptr);

// Explicit n^k x n^k kernel attention with weights phi(q)^T phi(k), then the same combine.
TupleFeatures kernel_dense_reference(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg);

// Attention matrices of one head (rows = queries), for inspection.
Tensor dense_attention_matrix(const Tensor& x, const HeadWeights& h, const LayerConfig& cfg);
Tensor kernel_attention_matrix(const Tensor& x, const HeadWeights& h, const LayerConfig& cfg,
                               const LayerWeights& w);

Tensor pool(const Tensor& x, Pooling pooling = Pooling::Sum);

}  // namespace hogt
