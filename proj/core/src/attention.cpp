#include "hogt/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hogt/error.hpp"
#include "hogt/parallel.hpp"
#include "hogt/rng.hpp"

namespace hogt {

using ad::Tape;
using ad::Var;

std::string to_string(AttentionVariant v) {
  switch (v) {
    case AttentionVariant::Dense: return "dense";
    case AttentionVariant::Kernelized: return "kernelized";
    case AttentionVariant::Ngbh: return "ngbh";
    case AttentionVariant::NgbhPlus: return "ngbh_plus";
    case AttentionVariant::LocalNgbh: return "local_ngbh";
    case AttentionVariant::VirtualTuple: return "virtual_tuple";
    case AttentionVariant::Cross12: return "cross_1_2";
  }
  return "unknown";
}

AttentionVariant parse_attention_variant(const std::string& s) {
  for (auto v : {AttentionVariant::Dense, AttentionVariant::Kernelized, AttentionVariant::Ngbh,
                 AttentionVariant::NgbhPlus, AttentionVariant::LocalNgbh, AttentionVariant::VirtualTuple,
                 AttentionVariant::Cross12})
    if (to_string(v) == s) return v;
  throw Error(ErrorKind::InvalidParameter, "unknown attention variant '" + s + "'");
}

std::size_t LayerConfig::effective_heads() const {
  return variant == AttentionVariant::VirtualTuple ? virtual_tuple_count : heads;
}

void LayerConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "order k must be >= 1");
  if (d_k < 1 || d_in < 1 || d_out < 1 || ffn_hidden < 1)
    throw Error(ErrorKind::InvalidParameter, "layer dimensions must be >= 1");
  if (heads < 1) throw Error(ErrorKind::InvalidParameter, "heads must be >= 1");
  bool neighbour = variant == AttentionVariant::Ngbh || variant == AttentionVariant::NgbhPlus ||
                   variant == AttentionVariant::LocalNgbh;
  if (neighbour && heads != k && !allow_any_heads)
    throw Error(ErrorKind::InvalidParameter, "neighbour attention needs heads == k");
  if (variant == AttentionVariant::Kernelized && kernel.type == KernelType::None)
    throw Error(ErrorKind::InvalidParameter, "kernelized attention needs a kernel");
  if (kernel.type == KernelType::Performer && kernel.features < 1)
    throw Error(ErrorKind::InvalidParameter, "performer needs at least one feature");
  if (variant == AttentionVariant::VirtualTuple && virtual_tuple_count < 1)
    throw Error(ErrorKind::InvalidParameter, "virtual_tuple_count must be >= 1");
  if (variant == AttentionVariant::Cross12 && k != 2)
    throw Error(ErrorKind::InvalidParameter, "cross_1_2 works on 2-tuples");
}

// ---------------------------------------------------------------- weights

namespace {

Tensor normal_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  return randn({rows, cols}, rng, 1.0 / std::sqrt(static_cast<double>(rows)));
}

Tensor bias_vector(Rng& rng, std::size_t n) { return randn({n}, rng, 0.1); }

HeadWeights random_head(Rng& rng, std::size_t d_in, std::size_t d_k, std::size_t d_value) {
  HeadWeights h;
  h.q = normal_matrix(rng, d_in, d_k);
  h.bq = bias_vector(rng, d_k);
  h.k = normal_matrix(rng, d_in, d_k);
  h.bk = bias_vector(rng, d_k);
  h.v = normal_matrix(rng, d_in, d_value);
  h.bv = bias_vector(rng, d_value);
  return h;
}

}  // namespace

LayerWeights init_layer_weights(const LayerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  LayerWeights w;
  const std::size_t mix_heads = cfg.effective_heads();
  if (cfg.variant != AttentionVariant::VirtualTuple)
    for (std::size_t h = 0; h < cfg.heads; ++h) w.heads.push_back(random_head(rng, cfg.d_in, cfg.d_k, cfg.d_out));
  w.w_o = normal_matrix(rng, mix_heads * cfg.d_out, cfg.d_in);
  w.b_o = bias_vector(rng, cfg.d_in);
  w.w1 = normal_matrix(rng, cfg.d_in, cfg.ffn_hidden);
  w.b1 = bias_vector(rng, cfg.ffn_hidden);
  w.w2 = normal_matrix(rng, cfg.ffn_hidden, cfg.d_in);
  w.b2 = bias_vector(rng, cfg.d_in);
  w.adj_embed = randn({cfg.heads, 2}, rng);
  if (cfg.kernel.type == KernelType::Performer) {
    Rng feature_rng(cfg.kernel.seed);
    w.performer_w = randn({cfg.kernel.features, cfg.d_k}, feature_rng);
  }
  if (cfg.variant == AttentionVariant::VirtualTuple) {
    w.virtual_x = randn({cfg.virtual_tuple_count, cfg.d_in}, rng);
    for (std::size_t v = 0; v < cfg.virtual_tuple_count; ++v) {
      w.virtual_update.push_back(random_head(rng, cfg.d_in, cfg.d_k, cfg.d_in));
      w.virtual_read.push_back(normal_matrix(rng, cfg.d_in, cfg.d_out));
      w.virtual_read_bias.push_back(bias_vector(rng, cfg.d_out));
    }
  }
  if (cfg.variant == AttentionVariant::Cross12) {
    w.edge_w1 = normal_matrix(rng, cfg.d_edge + 2 * cfg.d_in, cfg.ffn_hidden);
    w.edge_b1 = bias_vector(rng, cfg.ffn_hidden);
    w.edge_w2 = normal_matrix(rng, cfg.ffn_hidden, cfg.d_edge);
    w.edge_b2 = bias_vector(rng, cfg.d_edge);
    w.tuple_w1 = normal_matrix(rng, 3 * cfg.d_in + cfg.d_edge, cfg.ffn_hidden);
    w.tuple_b1 = bias_vector(rng, cfg.ffn_hidden);
    w.tuple_w2 = normal_matrix(rng, cfg.ffn_hidden, cfg.d_in);
    w.tuple_b2 = bias_vector(rng, cfg.d_in);
  }
  return w;
}

std::vector<Tensor> flatten_weights(const LayerWeights& w) {
  std::vector<Tensor> out;
  auto push = [&out](const Tensor& t) {
    if (t.size()) out.push_back(t);
  };
  for (const auto& h : w.heads)
    for (const Tensor* t : {&h.q, &h.bq, &h.k, &h.bk, &h.v, &h.bv}) push(*t);
  for (const Tensor* t : {&w.w_o, &w.b_o, &w.w1, &w.b1, &w.w2, &w.b2, &w.adj_embed, &w.performer_w, &w.virtual_x})
    push(*t);
  for (std::size_t v = 0; v < w.virtual_update.size(); ++v) {
    const auto& h = w.virtual_update[v];
    for (const Tensor* t : {&h.q, &h.bq, &h.k, &h.bk, &h.v, &h.bv}) push(*t);
    push(w.virtual_read[v]);
    push(w.virtual_read_bias[v]);
  }
  for (const Tensor* t : {&w.edge_w1, &w.edge_b1, &w.edge_w2, &w.edge_b2, &w.tuple_w1, &w.tuple_b1,
                          &w.tuple_w2, &w.tuple_b2})
    push(*t);
  return out;
}

// ---------------------------------------------------------------- key patterns

std::vector<std::size_t> KeyPattern::keys_of(std::size_t q) const {
  return std::vector<std::size_t>(key.begin() + static_cast<std::ptrdiff_t>(offsets[q]),
                                  key.begin() + static_cast<std::ptrdiff_t>(offsets[q + 1]));
}

KeyPattern ngbh_pattern(const TupleSpace& ts, const Graph& g, std::size_t j) {
  if (g.n() != ts.n()) throw Error(ErrorKind::SizeMismatch, "graph size differs from tuple space");
  KeyPattern p;
  const std::size_t n = ts.n();
  p.num_queries = ts.size();
  p.query.reserve(ts.size() * n);
  p.key.reserve(ts.size() * n);
  p.relation.reserve(ts.size() * n);
  p.offsets.reserve(ts.size() + 1);
  p.offsets.push_back(0);
  for (std::size_t q = 0; q < ts.size(); ++q) {
    std::size_t vj = ts.entry(q, j);
    for (std::size_t u = 0; u < n; ++u) {
      p.query.push_back(q);
      p.key.push_back(ts.replace(q, j, u));
      p.relation.push_back(g.adjacent(vj, u) ? 1 : 0);
    }
    p.offsets.push_back(p.key.size());
  }
  return p;
}

KeyPattern local_ngbh_pattern(const TupleSpace& ts, const Graph& g, std::size_t j) {
  if (g.n() != ts.n()) throw Error(ErrorKind::SizeMismatch, "graph size differs from tuple space");
  auto adjacency = g.adjacency_lists();
  KeyPattern p;
  p.num_queries = ts.size();
  p.offsets.push_back(0);
  for (std::size_t q = 0; q < ts.size(); ++q) {
    for (std::size_t u : adjacency[ts.entry(q, j)]) {
      p.query.push_back(q);
      p.key.push_back(ts.replace(q, j, u));
      p.relation.push_back(1);
    }
    p.offsets.push_back(p.key.size());
  }
  return p;
}

KeyPattern cross_sparse_pattern(std::size_t n) {
  KeyPattern p;
  p.num_queries = n;
  p.offsets.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t u = 0; u < n; ++u) {
      p.query.push_back(i);
      p.key.push_back(i * n + u);
      p.relation.push_back(0);
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (u == i) continue;
      p.query.push_back(i);
      p.key.push_back(u * n + i);
      p.relation.push_back(1);
    }
    p.offsets.push_back(p.key.size());
  }
  return p;
}

KeyPattern dense_pattern(std::size_t num_queries, std::size_t num_keys) {
  KeyPattern p;
  p.num_queries = num_queries;
  p.offsets.push_back(0);
  for (std::size_t q = 0; q < num_queries; ++q) {
    for (std::size_t key = 0; key < num_keys; ++key) {
      p.query.push_back(q);
      p.key.push_back(key);
      p.relation.push_back(0);
    }
    p.offsets.push_back(p.key.size());
  }
  return p;
}

// ---------------------------------------------------------------- building blocks

Var linear(Tape& tape, Var x, const Tensor& w, const Tensor& b) {
  Var out = ad::matmul(x, tape.constant(w));
  return b.size() ? ad::add(out, tape.constant(b)) : out;
}

Var combine_heads(Tape& tape, Var x, const std::vector<Var>& heads, const LayerWeights& w) {
  Var cat = heads.size() == 1 ? heads[0] : ad::concat_cols(heads);
  Var h = ad::add(x, linear(tape, cat, w.w_o, w.b_o));
  Var hidden = ad::relu(linear(tape, h, w.w1, w.b1));
  return ad::add(h, linear(tape, hidden, w.w2, w.b2));
}

namespace {
Var activate(Var scores, const LayerConfig& cfg, const std::vector<std::size_t>* offsets) {
  switch (cfg.activation) {
    case ScoreActivation::Softmax:
      return offsets ? ad::segment_softmax(scores, *offsets) : ad::softmax_rows(scores);
    case ScoreActivation::Relu:
      return ad::relu(scores);
    case ScoreActivation::ReluThreshold:
      return ad::relu(ad::add_scalar(scores, -cfg.relu_threshold));
  }
  return scores;
}
}  // namespace

namespace {

bool any_grad(const Tape& tape, std::initializer_list<Var> vars) {
  for (const Var& v : vars)
    if (tape.needs_grad(v.id)) return true;
  return false;
}

// Scores of one query row turned into weights in place; entries [0, len).
void activate_in_place(double* s, std::size_t len, const LayerConfig& cfg) {
  if (len == 0) return;
  if (cfg.activation == ScoreActivation::Softmax) {
    double m = *std::max_element(s, s + len);
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) total += (s[i] = std::exp(s[i] - m));
    for (std::size_t i = 0; i < len; ++i) s[i] /= total;
  } else {
    double shift = cfg.activation == ScoreActivation::ReluThreshold ? cfg.relu_threshold : 0.0;
    for (std::size_t i = 0; i < len; ++i) s[i] = std::max(0.0, s[i] - shift);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Forward-only kernels: one pass per query row, nothing of size keys x width is built.
Tensor fused_dense(const Tensor& q, const Tensor& k, const Tensor& v, const LayerConfig& cfg) {
  const std::size_t nq = q.rows(), nk = k.rows(), dk = q.cols(), dv = v.cols();
  Tensor out({nq, dv});
  parallel_for(nq, [&](std::size_t begin, std::size_t end) {
    std::vector<double> s(nk);
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t j = 0; j < nk; ++j) s[j] = dot(q.row_ptr(r), k.row_ptr(j), dk);
      activate_in_place(s.data(), nk, cfg);
      for (std::size_t j = 0; j < nk; ++j)
        if (s[j] != 0.0) axpy(s[j], v.row_ptr(j), out.row_ptr(r), dv);
    }
  }, 16);
  return out;
}

Tensor fused_sparse(const Tensor& q, const Tensor& k, const Tensor& v, const KeyPattern& p, const LayerConfig& cfg,
                    const Tensor* bias, const Tensor* reweight) {
  const std::size_t dk = q.cols(), dv = v.cols();
  Tensor out({p.num_queries, dv});
  parallel_for(p.num_queries, [&](std::size_t begin, std::size_t end) {
    std::vector<double> s;
    for (std::size_t r = begin; r < end; ++r) {
      const std::size_t b = p.offsets[r], e = p.offsets[r + 1];
      s.resize(e - b);
      for (std::size_t i = b; i < e; ++i)
        s[i - b] = dot(q.row_ptr(p.query[i]), k.row_ptr(p.key[i]), dk) + (bias ? (*bias)[i] : 0.0);
      activate_in_place(s.data(), e - b, cfg);
      for (std::size_t i = b; i < e; ++i) {
        double a = s[i - b] * (reweight ? (*reweight)[i] : 1.0);
        axpy(a, v.row_ptr(p.key[i]), out.row_ptr(p.query[i]), dv);
      }
    }
  }, 16);
  return out;
}

}  // namespace

Var dense_head(Tape& tape, Var q, Var k, Var v, const LayerConfig& cfg) {
  if (!any_grad(tape, {q, k, v})) return tape.constant(fused_dense(q.value(), k.value(), v.value(), cfg));
  Var scores = ad::matmul(q, ad::transpose(k));
  return ad::matmul(activate(scores, cfg, nullptr), v);
}

Var sparse_head(Tape& tape, Var q, Var k, Var v, const KeyPattern& pattern, const LayerConfig& cfg,
                std::optional<Var> bias, std::optional<Var> reweight) {
  bool grad = any_grad(tape, {q, k, v}) || (bias && tape.needs_grad(bias->id)) ||
              (reweight && tape.needs_grad(reweight->id));
  bool queries_in_order = true;
  for (std::size_t r = 0; r < pattern.num_queries && queries_in_order; ++r)
    if (pattern.offsets[r] != pattern.offsets[r + 1] && pattern.query[pattern.offsets[r]] != r)
      queries_in_order = false;
  if (!grad && queries_in_order)
    return tape.constant(fused_sparse(q.value(), k.value(), v.value(), pattern, cfg,
                                      bias ? &bias->value() : nullptr, reweight ? &reweight->value() : nullptr));
  Var scores = ad::row_dot(ad::gather_rows(q, pattern.query), ad::gather_rows(k, pattern.key));
  if (bias) scores = ad::add(scores, *bias);
  Var weights = activate(scores, cfg, &pattern.offsets);
  if (reweight) weights = ad::mul(weights, *reweight);
  Var messages = ad::mul_col(ad::gather_rows(v, pattern.key), weights);
  return ad::scatter_add_rows(messages, pattern.query, pattern.num_queries);
}

Var kernel_feature_map(Tape& tape, Var x, const LayerConfig& cfg, const LayerWeights& w) {
  if (cfg.kernel.type == KernelType::Linear) return ad::add_scalar(ad::elu(x), 1.0);
  if (cfg.kernel.type == KernelType::Performer) {
    // exp(-|x|^2 / 2) / sqrt(m) * [exp(w_1^T x), ..., exp(w_m^T x)]
    Var proj = ad::matmul(x, tape.constant(transpose(w.performer_w)));
    Var half_sq = ad::scale(ad::row_sum(ad::mul(x, x)), -0.5);
    Var feats = ad::exp(ad::add_col(proj, half_sq));
    return ad::scale(feats, 1.0 / std::sqrt(static_cast<double>(w.performer_w.rows())));
  }
  throw Error(ErrorKind::InvalidParameter, "no kernel feature map configured");
}

Var kernelized_head(Tape& tape, Var q, Var k, Var v, const LayerConfig& cfg, const LayerWeights& w,
                    LayerReport* report) {
  Var phi_q = kernel_feature_map(tape, q, cfg, w);
  Var phi_k = kernel_feature_map(tape, k, cfg, w);
  // sum_j phi(k_j) (x) v_j as one product, shared by every query.
  Var kv = ad::matmul(ad::transpose(phi_k), v);
  Var numerator = ad::matmul(phi_q, kv);
  Var denominator = ad::matmul(phi_q, ad::transpose(ad::sum_rows(phi_k)));

  const Tensor& den = denominator.value();
  const std::size_t rows = den.rows();
  Tensor keep({rows, 1}, 1.0), flag({rows, 1}, 0.0);
  std::size_t fallbacks = 0;
  for (std::size_t r = 0; r < rows; ++r)
    if (std::abs(den[r]) < 1e-12) {
      keep[r] = 0.0;
      flag[r] = 1.0;
      ++fallbacks;
    }
  if (report) report->denominator_fallbacks += fallbacks;
  if (fallbacks == 0) return ad::div_col(numerator, denominator);

  const std::size_t n_keys = v.rows();
  Var mean_v = ad::scale(ad::sum_rows(v), 1.0 / static_cast<double>(n_keys));
  Var fallback = ad::gather_rows(mean_v, std::vector<std::size_t>(rows, 0));
  Var keep_v = tape.constant(keep), flag_v = tape.constant(flag);
  Var num = ad::add(ad::mul_col(numerator, keep_v), ad::mul_col(fallback, flag_v));
  Var safe_den = ad::add(ad::mul(denominator, keep_v), flag_v);
  return ad::div_col(num, safe_den);
}

// ---------------------------------------------------------------- layers

namespace {

Var head_projection(Tape& tape, Var x, const Tensor& w, const Tensor& b) { return linear(tape, x, w, b); }

Var relation_column(Tape& tape, const KeyPattern& p, const Tensor& table, std::size_t head) {
  Tensor col({p.key.size(), 1});
  for (std::size_t e = 0; e < p.key.size(); ++e) col[e] = table(head, p.relation[e]);
  return tape.constant(std::move(col));
}

}  // namespace

TapeLayerOutput layer_on_tape(Tape& tape, Var x, const LayerWeights& w, const LayerConfig& cfg,
                              const Graph* g, std::optional<CrossInputs> cross, LayerReport* report) {
  cfg.validate();
  if (x.value().rank() != 2 || x.cols() != cfg.d_in)
    throw Error(ErrorKind::SizeMismatch, "input width " + x.value().shape_string() + " differs from d_in " +
                                             std::to_string(cfg.d_in));
  TapeLayerOutput out;
  std::vector<Var> heads;

  switch (cfg.variant) {
    case AttentionVariant::Dense:
    case AttentionVariant::Kernelized: {
      for (const auto& h : w.heads) {
        Var q = head_projection(tape, x, h.q, h.bq);
        Var k = head_projection(tape, x, h.k, h.bk);
        Var v = head_projection(tape, x, h.v, h.bv);
        heads.push_back(cfg.variant == AttentionVariant::Dense ? dense_head(tape, q, k, v, cfg)
                                                               : kernelized_head(tape, q, k, v, cfg, w, report));
      }
      out.x = combine_heads(tape, x, heads, w);
      return out;
    }
    case AttentionVariant::Ngbh:
    case AttentionVariant::NgbhPlus:
    case AttentionVariant::LocalNgbh: {
      if (!g) throw Error(ErrorKind::InvalidParameter, "neighbour attention needs a graph");
      TupleSpace ts(g->n(), cfg.k);
      if (x.rows() != ts.size()) throw Error(ErrorKind::SizeMismatch, "feature rows differ from n^k");
      for (std::size_t h = 0; h < w.heads.size(); ++h) {
        const auto& hw = w.heads[h];
        std::size_t j = h % cfg.k;
        KeyPattern p = cfg.variant == AttentionVariant::LocalNgbh ? local_ngbh_pattern(ts, *g, j)
                                                                  : ngbh_pattern(ts, *g, j);
        Var q = head_projection(tape, x, hw.q, hw.bq);
        Var k = head_projection(tape, x, hw.k, hw.bk);
        Var v = head_projection(tape, x, hw.v, hw.bv);
        std::optional<Var> bias, reweight;
        if (cfg.variant == AttentionVariant::NgbhPlus) {
          Var rel = relation_column(tape, p, w.adj_embed, h);
          if (cfg.ngbh_plus_mode == NgbhPlusMode::Bias)
            bias = rel;
          else
            reweight = rel;
        }
        heads.push_back(sparse_head(tape, q, k, v, p, cfg, bias, reweight));
      }
      out.x = combine_heads(tape, x, heads, w);
      return out;
    }
    case AttentionVariant::VirtualTuple: {
      const std::size_t rows = x.rows();
      Var virtual_rows = tape.constant(w.virtual_x);
      std::vector<Var> updated;
      for (std::size_t v = 0; v < cfg.virtual_tuple_count; ++v) {
        Var xv = ad::slice_rows(virtual_rows, v, v + 1);
        // Each real tuple has the virtual tuple as its only key, so its weight is 1.
        Var read = linear(tape, xv, w.virtual_read[v], w.virtual_read_bias[v]);
        heads.push_back(ad::gather_rows(read, std::vector<std::size_t>(rows, 0)));
        const auto& hu = w.virtual_update[v];
        Var qv = linear(tape, xv, hu.q, hu.bq);
        Var kx = linear(tape, x, hu.k, hu.bk);
        Var vx = linear(tape, x, hu.v, hu.bv);
        Var attn = ad::softmax_rows(ad::matmul(qv, ad::transpose(kx)));
        updated.push_back(ad::add(xv, ad::matmul(attn, vx)));
      }
      out.x = combine_heads(tape, x, heads, w);
      out.virtual_x = updated.size() == 1 ? updated[0] : ad::concat_rows(updated);
      return out;
    }
    case AttentionVariant::Cross12: {
      if (!g || !cross) throw Error(ErrorKind::InvalidParameter, "cross attention needs a graph and tuples");
      const std::size_t n = g->n();
      Var y = cross->tuples;
      Var e = cross->edges;
      if (x.rows() != n || y.rows() != n * n || e.rows() != n * n || y.cols() != cfg.d_in ||
          e.cols() != cfg.d_edge)
        throw Error(ErrorKind::SizeMismatch, "cross attention input shapes are inconsistent");
      KeyPattern sparse = cross_sparse_pattern(n);
      for (const auto& hw : w.heads) {
        Var q = head_projection(tape, x, hw.q, hw.bq);
        Var k = head_projection(tape, y, hw.k, hw.bk);
        Var v = head_projection(tape, y, hw.v, hw.bv);
        heads.push_back(cfg.cross_mode == CrossMode::Dense ? dense_head(tape, q, k, v, cfg)
                                                           : sparse_head(tape, q, k, v, sparse, cfg));
      }
      Var nodes = combine_heads(tape, x, heads, w);

      std::vector<std::size_t> first(n * n), second(n * n);
      Tensor edge_mask({n * n, 1});
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          first[a * n + b] = a;
          second[a * n + b] = b;
          edge_mask[a * n + b] = g->adjacent(a, b) ? 1.0 : 0.0;
        }
      Var xi = ad::gather_rows(nodes, first);
      Var xj = ad::gather_rows(nodes, second);
      Var edge_in = ad::concat_cols({e, xi, xj});
      Var edge_new = linear(tape, ad::relu(linear(tape, edge_in, w.edge_w1, w.edge_b1)), w.edge_w2, w.edge_b2);
      edge_new = ad::mul_col(edge_new, tape.constant(edge_mask));
      Var tuple_in = ad::concat_cols({y, xi, xj, edge_new});
      Var tuple_new =
          linear(tape, ad::relu(linear(tape, tuple_in, w.tuple_w1, w.tuple_b1)), w.tuple_w2, w.tuple_b2);
      out.x = nodes;
      out.edges = edge_new;
      out.tuples = tuple_new;
      return out;
    }
  }
  throw Error(ErrorKind::InvalidParameter, "unhandled attention variant");
}

// ---------------------------------------------------------------- value-level API

namespace {

TupleFeatures run_layer(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg, const Graph* g,
                        LayerReport* report) {
  x.validate();
  if (x.k != cfg.k) throw Error(ErrorKind::SizeMismatch, "feature order differs from layer order");
  Tape tape;
  TapeLayerOutput result;
  if (cfg.variant == AttentionVariant::VirtualTuple && x.virtual_x.size()) {
    // Carry virtual rows from a previous layer.
    LayerWeights carried = w;
    carried.virtual_x = x.virtual_x;
    result = layer_on_tape(tape, tape.constant(x.x), carried, cfg, g, std::nullopt, report);
  } else {
    result = layer_on_tape(tape, tape.constant(x.x), w, cfg, g, std::nullopt, report);
  }
  TupleFeatures out;
  out.n = x.n;
  out.k = x.k;
  out.provenance = FeatureProvenance::Custom;
  out.x = result.x.value();
  if (result.virtual_x) out.virtual_x = result.virtual_x->value();
  return out;
}

void require_variant(const LayerConfig& cfg, std::initializer_list<AttentionVariant> allowed, const char* op) {
  for (auto v : allowed)
    if (cfg.variant == v) return;
  throw Error(ErrorKind::InvalidParameter, std::string(op) + " called with variant " + to_string(cfg.variant));
}

}  // namespace

TupleFeatures forward_dense(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg) {
  require_variant(cfg, {AttentionVariant::Dense}, "forward_dense");
  return run_layer(x, w, cfg, nullptr, nullptr);
}

TupleFeatures forward_kernelized(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg,
                                 LayerReport* report) {
  require_variant(cfg, {AttentionVariant::Kernelized}, "forward_kernelized");
  return run_layer(x, w, cfg, nullptr, report);
}

TupleFeatures forward_ngbh(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg, const Graph& g) {
  require_variant(cfg, {AttentionVariant::Ngbh, AttentionVariant::NgbhPlus}, "forward_ngbh");
  return run_layer(x, w, cfg, &g, nullptr);
}

TupleFeatures forward_local_ngbh(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg,
                                 const Graph& g) {
  require_variant(cfg, {AttentionVariant::LocalNgbh}, "forward_local_ngbh");
  return run_layer(x, w, cfg, &g, nullptr);
}

TupleFeatures forward_virtual_tuple(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg) {
  require_variant(cfg, {AttentionVariant::VirtualTuple}, "forward_virtual_tuple");
  return run_layer(x, w, cfg, nullptr, nullptr);
}

CrossOutput forward_cross_1_2(const Tensor& nodes, const TupleFeatures& tuples, const Tensor& edges,
                              const LayerWeights& w, const LayerConfig& cfg, const Graph& g) {
  require_variant(cfg, {AttentionVariant::Cross12}, "forward_cross_1_2");
  tuples.validate();
  Tape tape;
  CrossInputs inputs{tape.constant(tuples.x), tape.constant(edges)};
  auto result = layer_on_tape(tape, tape.constant(nodes), w, cfg, &g, inputs, nullptr);
  CrossOutput out;
  out.nodes = result.x.value();
  out.tuples.n = tuples.n;
  out.tuples.k = 2;
  out.tuples.x = result.tuples->value();
  out.edges = result.edges->value();
  return out;
}

TupleFeatures forward(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg, const Graph* g,
                      LayerReport* report) {
  if (cfg.variant == AttentionVariant::Cross12)
    throw Error(ErrorKind::InvalidParameter, "use forward_cross_1_2 for cross attention");
  return run_layer(x, w, cfg, g, report);
}

TupleFeatures kernel_dense_reference(const TupleFeatures& x, const LayerWeights& w, const LayerConfig& cfg) {
  require_variant(cfg, {AttentionVariant::Kernelized}, "kernel_dense_reference");
  Tape tape;
  Var xv = tape.constant(x.x);
  std::vector<Var> heads;
  for (const auto& h : w.heads) {
    Var phi_q = kernel_feature_map(tape, linear(tape, xv, h.q, h.bq), cfg, w);
    Var phi_k = kernel_feature_map(tape, linear(tape, xv, h.k, h.bk), cfg, w);
    Var kernel = ad::matmul(phi_q, ad::transpose(phi_k));
    Var attn = ad::div_col(kernel, ad::row_sum(kernel));
    heads.push_back(ad::matmul(attn, linear(tape, xv, h.v, h.bv)));
  }
  TupleFeatures out;
  out.n = x.n;
  out.k = x.k;
  out.x = combine_heads(tape, xv, heads, w).value();
  return out;
}

Tensor dense_attention_matrix(const Tensor& x, const HeadWeights& h, const LayerConfig& cfg) {
  Tape tape;
  Var xv = tape.constant(x);
  Var scores = ad::matmul(linear(tape, xv, h.q, h.bq), ad::transpose(linear(tape, xv, h.k, h.bk)));
  return activate(scores, cfg, nullptr).value();
}

Tensor kernel_attention_matrix(const Tensor& x, const HeadWeights& h, const LayerConfig& cfg,
                               const LayerWeights& w) {
  Tape tape;
  Var xv = tape.constant(x);
  Var phi_q = kernel_feature_map(tape, linear(tape, xv, h.q, h.bq), cfg, w);
  Var phi_k = kernel_feature_map(tape, linear(tape, xv, h.k, h.bk), cfg, w);
  Var kernel = ad::matmul(phi_q, ad::transpose(phi_k));
  return ad::div_col(kernel, ad::row_sum(kernel)).value();
}

Tensor pool(const Tensor& x, Pooling pooling) {
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({1, cols}, pooling == Pooling::Max ? -std::numeric_limits<double>::infinity() : 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (pooling == Pooling::Max)
        out[c] = std::max(out[c], x(r, c));
      else
        out[c] += x(r, c);
    }
  if (pooling == Pooling::Mean && rows)
    for (auto& v : out.data()) v /= static_cast<double>(rows);
  return out;
}

}  // namespace hogt
