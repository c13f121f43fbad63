#include "hogt/simplicial_attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hogt/error.hpp"
#include "hogt/rng.hpp"

namespace hogt {

using ad::Tape;
using ad::Var;

void SimplicialLayerConfig::validate() const {
  if (d_in < 1 || d_k < 1 || d_out < 1 || ffn_hidden < 1)
    throw Error(ErrorKind::InvalidParameter, "simplicial layer dimensions must be >= 1");
  if (virtual_count < 1) throw Error(ErrorKind::InvalidParameter, "virtual_count must be >= 1");
}

namespace {

LayerConfig mix_config(const SimplicialLayerConfig& cfg, AttentionVariant variant) {
  LayerConfig lc;
  lc.k = 1;
  lc.variant = variant;
  lc.heads = 1;
  lc.d_in = cfg.d_in;
  lc.d_k = cfg.d_k;
  lc.d_out = cfg.d_out;
  lc.ffn_hidden = cfg.ffn_hidden;
  lc.virtual_tuple_count = cfg.virtual_count;
  return lc;
}

void check_features(const SimplicialComplex& c, Var x, const SimplicialLayerConfig& cfg) {
  cfg.validate();
  if (x.value().rank() != 2 || x.rows() != c.total() || x.cols() != cfg.d_in)
    throw Error(ErrorKind::SizeMismatch, "simplex features " + x.value().shape_string() + " do not match the complex");
}

// Rows of dimension k go through V^k.
Var project_values(Tape& tape, Var x, const SimplicialComplex& c, const SimplicialWeights& w) {
  std::vector<Var> parts;
  for (std::size_t k = 0; k <= c.max_dim(); ++k) {
    if (!c.count(k)) continue;
    Var rows = ad::slice_rows(x, c.offset(k), c.offset(k) + c.count(k));
    parts.push_back(linear(tape, rows, w.v[k], w.bv[k]));
  }
  return parts.size() == 1 ? parts[0] : ad::concat_rows(parts);
}

SimplicialOutput to_values(const SimplicialTapeOutput& t) {
  SimplicialOutput out;
  out.x = t.x.value();
  out.core = t.core.value();
  if (t.virtual_x) out.virtual_x = t.virtual_x->value();
  return out;
}

}  // namespace

SimplicialWeights init_simplicial_weights(const SimplicialComplex& c, const SimplicialLayerConfig& cfg,
                                          std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const double s_in = 1.0 / std::sqrt(static_cast<double>(cfg.d_in));
  SimplicialWeights w;
  w.q = randn({cfg.d_in, cfg.d_k}, rng, s_in);
  w.bq = randn({cfg.d_k}, rng, 0.1);
  w.k = randn({cfg.d_in, cfg.d_k}, rng, s_in);
  w.bk = randn({cfg.d_k}, rng, 0.1);
  for (std::size_t k = 0; k <= c.max_dim(); ++k) {
    w.v.push_back(randn({cfg.d_in, cfg.d_out}, rng, s_in));
    w.bv.push_back(randn({cfg.d_out}, rng, 0.1));
  }
  w.relation_scale = Tensor({kSimplexRelationCount}, 1.0);
  w.mix = init_layer_weights(mix_config(cfg, AttentionVariant::Dense), splitmix64_mix(seed ^ 0x6d6978ull));
  w.virtual_layer =
      init_layer_weights(mix_config(cfg, AttentionVariant::VirtualTuple), splitmix64_mix(seed ^ 0x767475ull));
  return w;
}

SimplexFeatures constant_simplex_features(const SimplicialComplex& c, std::size_t d, std::uint64_t seed) {
  SimplexFeatures f;
  f.x = Tensor({c.total(), d});
  for (std::size_t k = 0; k <= c.max_dim(); ++k) {
    Rng rng(splitmix64_mix(seed ^ (k + 1)));
    std::vector<double> row(d);
    for (auto& v : row) v = rng.normal();
    for (std::size_t i = 0; i < c.count(k); ++i)
      std::copy(row.begin(), row.end(), f.x.row_ptr(c.offset(k) + i));
  }
  return f;
}

SimplexFeatures random_simplex_features(const SimplicialComplex& c, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return SimplexFeatures{randn({c.total(), d}, rng)};
}

// ---------------------------------------------------------------- dense

SimplicialTapeOutput simplicial_dense_on_tape(Tape& tape, Var x, const SimplicialComplex& c,
                                              const SimplicialWeights& w, const SimplicialLayerConfig& cfg) {
  check_features(c, x, cfg);
  const auto lap = hodge(c);
  const Tensor& l = cfg.use_augmented ? lap.augmented : lap.block;
  const auto dims = c.token_dims();
  const std::size_t m = c.total();

  Tensor phi({m, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      SimplexRelation rel = dims[j] == dims[i]     ? SimplexRelation::SameDim
                            : dims[j] + 1 == dims[i] ? SimplexRelation::Boundary
                                                     : SimplexRelation::Coboundary;
      phi(i, j) = w.relation_scale[static_cast<std::size_t>(rel)] * l(i, j);
      if (cfg.laplacian_use == LaplacianUse::Bias && cfg.mask_off_diagonal_blocks && dims[i] != dims[j])
        phi(i, j) = -std::numeric_limits<double>::infinity();
    }

  Var q = linear(tape, x, w.q, w.bq);
  Var k = linear(tape, x, w.k, w.bk);
  Var scores = ad::matmul(q, ad::transpose(k));
  Var attn;
  if (cfg.laplacian_use == LaplacianUse::Bias)
    attn = ad::softmax_rows(ad::add(scores, tape.constant(std::move(phi))));
  else
    attn = ad::mul(ad::softmax_rows(scores), tape.constant(std::move(phi)));
  Var core = ad::matmul(attn, project_values(tape, x, c, w));
  return {combine_heads(tape, x, {core}, w.mix), core, std::nullopt};
}

SimplicialOutput forward_simplicial_dense(const SimplicialComplex& c, const SimplexFeatures& x,
                                          const SimplicialWeights& w, const SimplicialLayerConfig& cfg) {
  Tape tape;
  return to_values(simplicial_dense_on_tape(tape, tape.constant(x.x), c, w, cfg));
}

// ---------------------------------------------------------------- simplex neighbours

KeyPattern simplex_neighbor_pattern(const SimplicialComplex& c, bool include_coboundary_above_K) {
  const std::size_t K = c.max_dim();
  const std::size_t m = c.total();
  const auto dims = c.token_dims();
  // faces[t] / cofaces[t] as global token ids.
  std::vector<std::vector<std::size_t>> faces(m), cofaces(m);
  for (std::size_t k = 1; k <= K; ++k)
    for (std::size_t i = 0; i < c.count(k); ++i) {
      const std::size_t t = c.offset(k) + i;
      const Simplex& s = c.simplices(k)[i];
      for (std::size_t j = 0; j <= k; ++j) {
        Simplex f = s;
        f.erase(f.begin() + static_cast<std::ptrdiff_t>(j));
        std::size_t ft = c.offset(k - 1) + *c.index_of(f);
        faces[t].push_back(ft);
        cofaces[ft].push_back(t);
      }
    }

  KeyPattern p;
  p.num_queries = m;
  p.offsets.push_back(0);
  auto emit = [&](std::size_t q, const std::set<std::size_t>& keys, SimplexRelation rel) {
    for (std::size_t key : keys) {
      p.query.push_back(q);
      p.key.push_back(key);
      p.relation.push_back(static_cast<std::size_t>(rel));
    }
  };
  for (std::size_t t = 0; t < m; ++t) {
    std::set<std::size_t> boundary(faces[t].begin(), faces[t].end());
    std::set<std::size_t> coboundary(cofaces[t].begin(), cofaces[t].end());
    std::set<std::size_t> lower, upper;
    for (std::size_t f : faces[t])
      for (std::size_t s : cofaces[f])
        if (s != t) lower.insert(s);
    for (std::size_t cf : cofaces[t])
      for (std::size_t s : faces[cf])
        if (s != t) upper.insert(s);
    if (include_coboundary_above_K && dims[t] == K && K >= 1) {
      // Same-dimension simplices spanning a (K+1)-clique together with t.
      const Simplex& s = c.simplices(K)[t - c.offset(K)];
      for (std::size_t i = 0; i < c.count(K); ++i) {
        const Simplex& r = c.simplices(K)[i];
        std::vector<std::size_t> joint;
        std::set_union(s.begin(), s.end(), r.begin(), r.end(), std::back_inserter(joint));
        if (joint.size() != K + 2) continue;
        std::vector<std::size_t> only_s, only_r;
        std::set_difference(s.begin(), s.end(), r.begin(), r.end(), std::back_inserter(only_s));
        std::set_difference(r.begin(), r.end(), s.begin(), s.end(), std::back_inserter(only_r));
        Simplex edge = {std::min(only_s[0], only_r[0]), std::max(only_s[0], only_r[0])};
        if (c.contains(edge)) upper.insert(c.offset(K) + i);
      }
    }
    emit(t, boundary, SimplexRelation::Boundary);
    emit(t, coboundary, SimplexRelation::Coboundary);
    emit(t, lower, SimplexRelation::Lower);
    emit(t, upper, SimplexRelation::Upper);
    p.offsets.push_back(p.key.size());
  }
  return p;
}

SimplicialTapeOutput simplex_ngbh_on_tape(Tape& tape, Var x, const SimplicialComplex& c,
                                          const SimplicialWeights& w, const SimplicialLayerConfig& cfg) {
  check_features(c, x, cfg);
  KeyPattern p = simplex_neighbor_pattern(c, cfg.include_coboundary_above_K);
  Tensor scale({p.key.size(), 1});
  for (std::size_t e = 0; e < p.key.size(); ++e) scale[e] = w.relation_scale[p.relation[e]];
  Var q = linear(tape, x, w.q, w.bq);
  Var k = linear(tape, x, w.k, w.bk);
  LayerConfig lc = mix_config(cfg, AttentionVariant::Ngbh);
  Var core = sparse_head(tape, q, k, project_values(tape, x, c, w), p, lc, std::nullopt,
                         tape.constant(std::move(scale)));
  return {combine_heads(tape, x, {core}, w.mix), core, std::nullopt};
}

SimplicialOutput forward_simplex_ngbh(const SimplicialComplex& c, const SimplexFeatures& x,
                                      const SimplicialWeights& w, const SimplicialLayerConfig& cfg) {
  Tape tape;
  return to_values(simplex_ngbh_on_tape(tape, tape.constant(x.x), c, w, cfg));
}

// ---------------------------------------------------------------- virtual simplex

SimplicialTapeOutput virtual_simplex_on_tape(Tape& tape, Var x, const SimplicialComplex& c,
                                             const SimplicialWeights& w, const SimplicialLayerConfig& cfg) {
  check_features(c, x, cfg);
  LayerConfig lc = mix_config(cfg, AttentionVariant::VirtualTuple);
  auto out = layer_on_tape(tape, x, w.virtual_layer, lc, nullptr);
  // Each real token reads the first virtual token only.
  Var first = ad::slice_rows(tape.constant(w.virtual_layer.virtual_x), 0, 1);
  Var read = linear(tape, first, w.virtual_layer.virtual_read[0], w.virtual_layer.virtual_read_bias[0]);
  Var core = ad::gather_rows(read, std::vector<std::size_t>(c.total(), 0));
  return {out.x, core, out.virtual_x};
}

SimplicialOutput forward_virtual_simplex(const SimplicialComplex& c, const SimplexFeatures& x,
                                         const SimplicialWeights& w, const SimplicialLayerConfig& cfg) {
  Tape tape;
  return to_values(virtual_simplex_on_tape(tape, tape.constant(x.x), c, w, cfg));
}

// ---------------------------------------------------------------- MPSN recovery

MpsnRecoveryReport verify_mpsn_recovery(const SimplicialComplex& c, const Tensor& x, const std::vector<Tensor>& w,
                                        double tol) {
  if (w.size() != c.max_dim() + 1) throw Error(ErrorKind::SizeMismatch, "need one weight matrix per dimension");
  SimplicialLayerConfig cfg;
  cfg.d_in = x.cols();
  cfg.d_k = 1;
  cfg.d_out = w[0].cols();
  cfg.laplacian_use = LaplacianUse::Reweight;
  cfg.use_augmented = true;
  SimplicialWeights sw = init_simplicial_weights(c, cfg, 0);
  sw.q = Tensor({cfg.d_in, 1});
  sw.k = Tensor({cfg.d_in, 1});
  sw.bq = Tensor({1}, 1.0);
  sw.bk = Tensor({1}, 1.0);
  const double m = static_cast<double>(c.total());
  for (std::size_t k = 0; k <= c.max_dim(); ++k) {
    sw.v[k] = w[k];
    for (auto& v : sw.v[k].data()) v *= m;
    sw.bv[k] = Tensor({cfg.d_out});
  }
  sw.relation_scale = Tensor({kSimplexRelationCount}, 1.0);

  MpsnRecoveryReport r;
  r.tol = tol;
  Tensor expected = mpsn_reference(c, x, w);
  Tensor got = forward_simplicial_dense(c, SimplexFeatures{x}, sw, cfg).core;
  r.max_abs_diff = c.total() ? max_abs_diff(expected, got) : 0.0;
  r.passed = r.max_abs_diff < tol;
  return r;
}

}  // namespace hogt
