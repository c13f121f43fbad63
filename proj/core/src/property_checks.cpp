#include "hogt/property_checks.hpp"

#include <algorithm>

#include "hogt/generators.hpp"
#include "hogt/rng.hpp"
#include "hogt/tuple_features.hpp"

namespace hogt::checks {

LayerConfig small_config(AttentionVariant variant, std::size_t d) {
  LayerConfig cfg;
  cfg.k = 2;
  cfg.variant = variant;
  cfg.heads = variant == AttentionVariant::VirtualTuple ? 1 : 2;
  cfg.d_in = d;
  cfg.d_k = d;
  cfg.d_out = d;
  cfg.ffn_hidden = 2 * d;
  cfg.d_edge = 3;
  return cfg;
}

std::vector<VariantCase> structural_cases(std::size_t d) {
  std::vector<VariantCase> out;
  out.push_back({"ngbh", small_config(AttentionVariant::Ngbh, d)});
  auto bias = small_config(AttentionVariant::NgbhPlus, d);
  out.push_back({"ngbh_plus_bias", bias});
  auto reweight = bias;
  reweight.ngbh_plus_mode = NgbhPlusMode::Reweight;
  out.push_back({"ngbh_plus_reweight", reweight});
  out.push_back({"local_ngbh", small_config(AttentionVariant::LocalNgbh, d)});
  auto local_relu = small_config(AttentionVariant::LocalNgbh, d);
  local_relu.activation = ScoreActivation::Relu;
  out.push_back({"local_ngbh_relu", local_relu});
  auto vt = small_config(AttentionVariant::VirtualTuple, d);
  vt.virtual_tuple_count = 2;
  out.push_back({"virtual_tuple", vt});
  out.push_back({"cross_dense", small_config(AttentionVariant::Cross12, d)});
  auto sparse = small_config(AttentionVariant::Cross12, d);
  sparse.cross_mode = CrossMode::Sparse;
  out.push_back({"cross_sparse", sparse});
  return out;
}

std::vector<VariantCase> all_cases(std::size_t d) {
  std::vector<VariantCase> out;
  out.push_back({"dense", small_config(AttentionVariant::Dense, d)});
  auto linear = small_config(AttentionVariant::Kernelized, d);
  linear.kernel.type = KernelType::Linear;
  out.push_back({"kernelized_linear", linear});
  auto performer = small_config(AttentionVariant::Kernelized, d);
  performer.kernel.type = KernelType::Performer;
  performer.kernel.features = 16;
  performer.kernel.seed = 3;
  out.push_back({"kernelized_performer", performer});
  for (auto& c : structural_cases(d)) out.push_back(c);
  return out;
}

Tensor random_rows(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale) {
  Rng rng(seed);
  return randn({rows, cols}, rng, scale);
}

CaseInputs make_inputs(const VariantCase& c, std::size_t n, std::uint64_t seed) {
  CaseInputs in;
  in.g = erdos_renyi(n, 0.5, splitmix64_mix(seed ^ 0x9a));
  const std::size_t tuples = TupleSpace(n, c.cfg.k).size();
  if (c.cfg.variant == AttentionVariant::Cross12) {
    in.x = random_rows(n, c.cfg.d_in, seed);
    in.tuples = random_rows(n * n, c.cfg.d_in, seed + 1);
    in.edges = random_rows(n * n, c.cfg.d_edge, seed + 2);
  } else {
    in.x = random_rows(tuples, c.cfg.d_in, seed);
  }
  return in;
}

CaseOutputs run_case(const VariantCase& c, const CaseInputs& in, const LayerWeights& w) {
  CaseOutputs out;
  if (c.cfg.variant == AttentionVariant::Cross12) {
    TupleFeatures t;
    t.n = in.g.n();
    t.k = 2;
    t.x = in.tuples;
    auto r = forward_cross_1_2(in.x, t, in.edges, w, c.cfg, in.g);
    out.x = r.nodes;
    out.tuples = r.tuples.x;
    out.edges = r.edges;
    return out;
  }
  TupleFeatures t;
  t.n = in.g.n();
  t.k = c.cfg.k;
  t.x = in.x;
  auto r = forward(t, w, c.cfg, &in.g);
  out.x = r.x;
  out.virtual_x = r.virtual_x;
  return out;
}

double equivariance_error(const VariantCase& c, std::size_t n, std::uint64_t seed) {
  CaseInputs in = make_inputs(c, n, seed);
  LayerWeights w = init_layer_weights(c.cfg, seed + 17);
  Permutation p = random_permutation(n, seed + 29);
  auto dest = tuple_permutation(TupleSpace(n, c.cfg.k), p);
  auto dest2 = tuple_permutation(TupleSpace(n, 2), p);

  CaseInputs moved;
  moved.g = apply_permutation(in.g, p);
  if (c.cfg.variant == AttentionVariant::Cross12) {
    moved.x = permute_rows(in.x, p.map);
    moved.tuples = permute_rows(in.tuples, dest2);
    moved.edges = permute_rows(in.edges, dest2);
  } else {
    moved.x = permute_rows(in.x, dest);
  }
  CaseOutputs a = run_case(c, in, w);
  CaseOutputs b = run_case(c, moved, w);
  double err = 0.0;
  if (c.cfg.variant == AttentionVariant::Cross12) {
    err = std::max(err, max_abs_diff(permute_rows(a.x, p.map), b.x));
    err = std::max(err, max_abs_diff(permute_rows(a.tuples, dest2), b.tuples));
    err = std::max(err, max_abs_diff(permute_rows(a.edges, dest2), b.edges));
  } else {
    err = std::max(err, max_abs_diff(permute_rows(a.x, dest), b.x));
    if (a.virtual_x.size()) err = std::max(err, max_abs_diff(a.virtual_x, b.virtual_x));
  }
  return err;
}

ad::Var weighted_readout(ad::Tape& tape, const TapeLayerOutput& out, std::uint64_t seed) {
  std::vector<ad::Var> parts{out.x};
  if (out.virtual_x) parts.push_back(*out.virtual_x);
  if (out.tuples) parts.push_back(*out.tuples);
  if (out.edges) parts.push_back(*out.edges);
  ad::Var total = tape.constant(Tensor({1}, 0.0));
  std::uint64_t s = seed;
  for (auto& p : parts) {
    Tensor r = random_rows(p.rows(), p.cols(), ++s);
    total = ad::add(total, ad::sum(ad::mul(p, tape.constant(r))));
  }
  return total;
}

VariantGradcheck variant_gradcheck(const VariantCase& c, std::size_t n, std::uint64_t seed,
                                   GradInput which, double min_margin) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t s = splitmix64_mix(seed + attempt);
    CaseInputs in = make_inputs(c, n, s);
    LayerWeights w = init_layer_weights(c.cfg, s + 5);
    const bool cross = c.cfg.variant == AttentionVariant::Cross12;
    auto f = [&](ad::Tape& tape, ad::Var v) {
      std::optional<CrossInputs> ci;
      ad::Var x = v;
      if (cross) {
        if (which == GradInput::CrossTuples) {
          x = tape.constant(in.x);
          ci = CrossInputs{v, tape.constant(in.edges)};
        } else {
          ci = CrossInputs{tape.constant(in.tuples), tape.constant(in.edges)};
        }
      }
      auto out = layer_on_tape(tape, x, w, c.cfg, &in.g, ci);
      return weighted_readout(tape, out, s + 11);
    };
    const Tensor& probe = which == GradInput::CrossTuples ? in.tuples : in.x;
    ad::Tape tape;
    f(tape, tape.leaf(probe));
    double margin = tape.min_relu_margin();
    if (margin < min_margin && attempt < 50) continue;
    VariantGradcheck out;
    out.report = gradcheck(f, probe, 1e-5);
    out.relu_margin = margin;
    out.seed_used = s;
    return out;
  }
}

// ---------------------------------------------------------------- simplicial layers

std::vector<std::pair<std::string, SimplicialKind>> simplicial_kinds() {
  return {{"dense_bias", SimplicialKind::DenseBias},
          {"dense_reweight", SimplicialKind::DenseReweight},
          {"dense_masked", SimplicialKind::DenseMasked},
          {"simplex_ngbh", SimplicialKind::Neighbour},
          {"virtual_simplex", SimplicialKind::Virtual}};
}

SimplicialLayerConfig simplicial_config(SimplicialKind kind, std::size_t d) {
  SimplicialLayerConfig cfg;
  cfg.d_in = d;
  cfg.d_k = d;
  cfg.d_out = d;
  cfg.ffn_hidden = 2 * d;
  if (kind == SimplicialKind::DenseReweight) cfg.laplacian_use = LaplacianUse::Reweight;
  if (kind == SimplicialKind::DenseMasked) cfg.mask_off_diagonal_blocks = true;
  return cfg;
}

SimplicialTapeOutput simplicial_on_tape(SimplicialKind kind, ad::Tape& tape, ad::Var x,
                                               const SimplicialComplex& c, const SimplicialWeights& w,
                                               const SimplicialLayerConfig& cfg) {
  switch (kind) {
    case SimplicialKind::Neighbour: return simplex_ngbh_on_tape(tape, x, c, w, cfg);
    case SimplicialKind::Virtual: return virtual_simplex_on_tape(tape, x, c, w, cfg);
    default: return simplicial_dense_on_tape(tape, x, c, w, cfg);
  }
}

VariantGradcheck simplicial_gradcheck(SimplicialKind kind, std::uint64_t seed, double min_margin) {
  const std::size_t d = 4;
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t s = splitmix64_mix(seed + attempt);
    SimplicialComplex c = clique_complex(erdos_renyi(4, 0.7, s), 3);
    auto cfg = simplicial_config(kind, d);
    auto w = init_simplicial_weights(c, cfg, s + 1);
    Tensor x = random_rows(c.total(), d, s + 2);
    auto f = [&](ad::Tape& tape, ad::Var v) {
      auto out = simplicial_on_tape(kind, tape, v, c, w, cfg);
      TapeLayerOutput as_layer;
      as_layer.x = out.x;
      as_layer.virtual_x = out.virtual_x;
      return weighted_readout(tape, as_layer, s + 3);
    };
    ad::Tape tape;
    f(tape, tape.leaf(x));
    double margin = tape.min_relu_margin();
    if (margin < min_margin && attempt < 50) continue;
    VariantGradcheck out;
    out.report = gradcheck(f, x, 1e-5);
    out.relu_margin = margin;
    out.seed_used = s;
    return out;
  }
}

}  // namespace hogt::checks
