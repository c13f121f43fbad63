#pragma once

#include <cstddef>
#include <cstdint>

#include "hogt/attention.hpp"
#include "hogt/graph.hpp"
#include "hogt/tuple_features.hpp"

namespace hogt {

struct IndexEncodingConfig {
  std::size_t M = 8;  // encoding modulus, must be >= n
  double c = 1.0;     // logit scale
  ScoreActivation activation = ScoreActivation::ReluThreshold;  // or Softmax
};

struct IndexEncodedLayer {
  LayerConfig cfg;
  LayerWeights weights;
  // Rows are [tuple feature (feature_dim), cos(2 pi i_1 / M), sin(2 pi i_1 / M), ...].
  TupleFeatures input;
  std::size_t feature_dim = 0;
};

// k-head layer whose head h scores query i against key j by
// c * sum_{l != h} cos(2 pi (i_l - j_l) / M). With ReluThreshold the support of
// head h is exactly the h-th k-neighbour and every weight equals c / M^2.
// Values, output mix and FFN read and write only the tuple feature columns.
IndexEncodedLayer build_index_encoded_layer(const Graph& g, std::size_t k, const IndexEncodingConfig& enc,
                                            std::size_t feature_dim, std::uint64_t seed);

// Config for the uniform constructions: one head per tuple position for the
// neighbour variants, relu scores for local_ngbh (a sum over the local neighbours).
LayerConfig uniform_layer_config(AttentionVariant variant, std::size_t k, std::size_t d);

// Random values/mix/FFN with query and key maps replaced by the constant 1
// (zero matrix, unit bias), so every head weights its keys uniformly.
LayerWeights uniform_attention_weights(const LayerConfig& cfg, std::uint64_t seed);

}  // namespace hogt
