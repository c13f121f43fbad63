#include "hogt/attention_builders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hogt/error.hpp"
#include "hogt/rng.hpp"

namespace hogt {

IndexEncodedLayer build_index_encoded_layer(const Graph& g, std::size_t k, const IndexEncodingConfig& enc,
                                            std::size_t feature_dim, std::uint64_t seed) {
  const std::size_t n = g.n();
  if (enc.M < n) throw Error(ErrorKind::InvalidParameter, "encoding modulus M must be >= n");
  if (enc.c <= 0.0) throw Error(ErrorKind::InvalidParameter, "logit scale c must be positive");
  if (k < 1 || feature_dim < 1) throw Error(ErrorKind::InvalidParameter, "k and feature_dim must be >= 1");

  const std::size_t d = feature_dim;
  const std::size_t width = d + 2 * k;
  IndexEncodedLayer layer;
  layer.feature_dim = d;

  LayerConfig& cfg = layer.cfg;
  cfg.k = k;
  cfg.variant = AttentionVariant::Dense;
  cfg.heads = k;
  cfg.d_in = width;
  cfg.d_k = std::max<std::size_t>(1, 2 * (k - 1));
  cfg.d_out = d;
  cfg.ffn_hidden = 4 * d;
  cfg.activation = enc.activation;
  const double m2 = static_cast<double>(enc.M) * static_cast<double>(enc.M);
  cfg.relu_threshold = enc.c * (static_cast<double>(k) - 1.0 - 1.0 / m2);

  TupleFeatures base = init_tuple_features(g, k, d, splitmix64_mix(seed ^ 0x1dull));
  TupleSpace ts(n, k);
  layer.input.n = n;
  layer.input.k = k;
  layer.input.provenance = FeatureProvenance::IndexEncoded;
  layer.input.x = Tensor({ts.size(), width});
  const double step = 2.0 * std::numbers::pi / static_cast<double>(enc.M);
  for (std::size_t t = 0; t < ts.size(); ++t) {
    for (std::size_t c = 0; c < d; ++c) layer.input.x(t, c) = base.x(t, c);
    for (std::size_t l = 0; l < k; ++l) {
      double angle = step * static_cast<double>(ts.entry(t, l));
      layer.input.x(t, d + 2 * l) = std::cos(angle);
      layer.input.x(t, d + 2 * l + 1) = std::sin(angle);
    }
  }

  Rng rng(seed);
  LayerWeights& w = layer.weights;
  for (std::size_t h = 0; h < k; ++h) {
    HeadWeights hw;
    hw.q = Tensor({width, cfg.d_k});
    hw.k = Tensor({width, cfg.d_k});
    hw.bq = Tensor({cfg.d_k});
    hw.bk = Tensor({cfg.d_k});
    std::size_t slot = 0;
    for (std::size_t l = 0; l < k; ++l) {
      if (l == h) continue;
      for (std::size_t part = 0; part < 2; ++part, ++slot) {
        hw.q(d + 2 * l + part, slot) = enc.c;
        hw.k(d + 2 * l + part, slot) = 1.0;
      }
    }
    hw.v = Tensor({width, d});
    Tensor vz = randn({d, d}, rng, 1.0 / std::sqrt(static_cast<double>(d)));
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) hw.v(r, c) = vz(r, c);
    hw.bv = randn({d}, rng, 0.1);
    w.heads.push_back(std::move(hw));
  }
  // Mix, FFN: only tuple feature rows/columns are nonzero.
  w.w_o = Tensor({k * d, width});
  Tensor mix = randn({k * d, d}, rng, 1.0 / std::sqrt(static_cast<double>(k * d)));
  for (std::size_t r = 0; r < k * d; ++r)
    for (std::size_t c = 0; c < d; ++c) w.w_o(r, c) = mix(r, c);
  w.b_o = Tensor({width});
  w.w1 = Tensor({width, cfg.ffn_hidden});
  Tensor w1 = randn({d, cfg.ffn_hidden}, rng, 1.0 / std::sqrt(static_cast<double>(d)));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < cfg.ffn_hidden; ++c) w.w1(r, c) = w1(r, c);
  w.b1 = randn({cfg.ffn_hidden}, rng, 0.1);
  w.w2 = Tensor({cfg.ffn_hidden, width});
  Tensor w2 = randn({cfg.ffn_hidden, d}, rng, 1.0 / std::sqrt(static_cast<double>(cfg.ffn_hidden)));
  for (std::size_t r = 0; r < cfg.ffn_hidden; ++r)
    for (std::size_t c = 0; c < d; ++c) w.w2(r, c) = w2(r, c);
  w.b2 = Tensor({width});
  for (std::size_t c = 0; c < d; ++c) {
    w.b_o[c] = 0.1 * rng.normal();
    w.b2[c] = 0.1 * rng.normal();
  }
  w.adj_embed = Tensor({k, 2});
  return layer;
}

LayerConfig uniform_layer_config(AttentionVariant variant, std::size_t k, std::size_t d) {
  LayerConfig cfg;
  cfg.k = k;
  cfg.variant = variant;
  cfg.heads = k;
  cfg.d_in = d;
  cfg.d_k = 1;
  cfg.d_out = d;
  cfg.ffn_hidden = 4 * d;
  if (variant == AttentionVariant::LocalNgbh) cfg.activation = ScoreActivation::Relu;
  if (variant == AttentionVariant::VirtualTuple) cfg.heads = 1;
  if (variant == AttentionVariant::Kernelized) cfg.kernel.type = KernelType::Linear;
  cfg.validate();
  return cfg;
}

namespace {
void make_uniform(HeadWeights& h) {
  h.q = Tensor(h.q.shape(), 0.0);
  h.k = Tensor(h.k.shape(), 0.0);
  h.bq = Tensor(h.bq.shape(), 1.0);
  h.bk = Tensor(h.bk.shape(), 1.0);
}
}  // namespace

LayerWeights uniform_attention_weights(const LayerConfig& cfg, std::uint64_t seed) {
  LayerWeights w = init_layer_weights(cfg, seed);
  for (auto& h : w.heads) make_uniform(h);
  for (auto& h : w.virtual_update) make_uniform(h);
  if (cfg.variant == AttentionVariant::NgbhPlus && cfg.ngbh_plus_mode == NgbhPlusMode::Reweight)
    for (auto& v : w.adj_embed.data()) v = 1.0 + std::abs(v);
  return w;
}

}  // namespace hogt
