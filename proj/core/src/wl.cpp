#include "hogt/wl.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include "json.hpp"
#include <unordered_map>

#include "hogt/error.hpp"
#include "hogt/parallel.hpp"

namespace hogt {

// ---------------------------------------------------------------- TupleSpace

TupleSpace::TupleSpace(std::size_t n, std::size_t k, std::size_t budget) : n_(n), k_(k) {
  if (k == 0) throw Error(ErrorKind::InvalidParameter, "tuple order k must be >= 1");
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "tuple space requires n >= 1");
  std::size_t size = 1;
  for (std::size_t j = 0; j < k; ++j) {
    if (size > budget / n)
      throw Error(ErrorKind::ResourceGuard, "n^k = " + std::to_string(n) + "^" + std::to_string(k) +
                                                " exceeds the tuple budget of " +
                                                std::to_string(budget));
    size *= n;
  }
  size_ = size;
  stride_.resize(k);
  std::size_t s = 1;
  for (std::size_t j = k; j-- > 0;) {
    stride_[j] = s;
    s *= n;
  }
}

std::size_t TupleSpace::flat(const std::vector<std::size_t>& index) const {
  if (index.size() != k_) throw Error(ErrorKind::SizeMismatch, "tuple length differs from k");
  std::size_t f = 0;
  for (std::size_t j = 0; j < k_; ++j) {
    if (index[j] >= n_) throw Error(ErrorKind::InvalidParameter, "tuple entry out of range");
    f += index[j] * stride_[j];
  }
  return f;
}

std::vector<std::size_t> TupleSpace::unflat(std::size_t flat) const {
  std::vector<std::size_t> out(k_);
  for (std::size_t j = 0; j < k_; ++j) out[j] = entry(flat, j);
  return out;
}

// ---------------------------------------------------------------- Coloring

std::size_t Coloring::num_colors() const {
  if (colors.empty()) return 0;
  std::vector<ColorId> sorted = colors;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Histogram Coloring::histogram() const {
  std::map<ColorId, std::size_t> counts;
  for (ColorId c : colors) ++counts[c];
  return Histogram(counts.begin(), counts.end());
}

std::vector<std::size_t> sorted_counts(const Histogram& h) {
  std::vector<std::size_t> out;
  out.reserve(h.size());
  for (const auto& [id, count] : h) out.push_back(count);
  std::sort(out.rbegin(), out.rend());
  return out;
}

ColorId ColorAtomizer::intern(const std::string& signature) {
  auto [it, inserted] = table_.try_emplace(signature, static_cast<ColorId>(order_.size()));
  if (inserted) order_.push_back(signature);
  return it->second;
}

std::vector<ColorId> ColorAtomizer::canonical_ranks() const {
  std::vector<ColorId> rank(order_.size());
  ColorId r = 0;
  for (const auto& [sig, id] : table_) rank[id] = r++;
  return rank;
}

std::string to_string(WlAlgorithm a) {
  switch (a) {
    case WlAlgorithm::KWL: return "kwl";
    case WlAlgorithm::DeltaKWL: return "delta_kwl";
    case WlAlgorithm::DeltaKLWL: return "delta_klwl";
    case WlAlgorithm::KFWL: return "kfwl";
  }
  return "unknown";
}

WlAlgorithm parse_wl_algorithm(const std::string& name) {
  if (name == "kwl" || name == "wl") return WlAlgorithm::KWL;
  if (name == "delta_kwl") return WlAlgorithm::DeltaKWL;
  if (name == "delta_klwl") return WlAlgorithm::DeltaKLWL;
  if (name == "kfwl" || name == "fwl") return WlAlgorithm::KFWL;
  throw Error(ErrorKind::InvalidParameter, "unknown WL algorithm '" + name + "'");
}

// ---------------------------------------------------------------- signatures

namespace {

inline void put_u32(std::string& s, std::uint32_t v) {
  char buf[4];
  for (int b = 0; b < 4; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  s.append(buf, 4);
}

inline void put_u64(std::string& s, std::uint64_t v) {
  put_u32(s, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(s, static_cast<std::uint32_t>(v >> 32));
}

constexpr std::uint32_t kNoEdgeLabel = std::numeric_limits<std::uint32_t>::max();

std::string type_signature(const Graph& g, const TupleSpace& ts, std::size_t t) {
  const std::size_t k = ts.k();
  std::string sig;
  sig.reserve(k * k * 6);
  for (std::size_t a = 0; a < k; ++a) {
    std::size_t va = ts.entry(t, a);
    for (std::size_t b = 0; b < k; ++b) {
      std::size_t vb = ts.entry(t, b);
      if (a == b) {
        sig.push_back('L');
        put_u32(sig, static_cast<std::uint32_t>(g.node_label(va)));
      } else {
        sig.push_back(va == vb ? '=' : '!');
        sig.push_back(g.adjacent(va, vb) ? '1' : '0');
        auto label = g.edge_label(va, vb);
        put_u32(sig, label ? static_cast<std::uint32_t>(*label) : kNoEdgeLabel);
      }
    }
  }
  return sig;
}

// Builds the refinement signature of tuple t from the previous round colors.
struct SignatureBuilder {
  const Graph& g;
  const TupleSpace& ts;
  WlAlgorithm algorithm;
  const std::vector<std::vector<std::size_t>>& adjacency;

  std::string build(std::size_t t, const std::vector<ColorId>& colors) const {
    const std::size_t n = ts.n(), k = ts.k();
    std::string sig;
    put_u32(sig, colors[t]);
    if (algorithm == WlAlgorithm::KFWL) {
      std::vector<std::uint32_t> lists(n * k);
      for (std::size_t w = 0; w < n; ++w)
        for (std::size_t l = 0; l < k; ++l) lists[w * k + l] = colors[ts.replace(t, l, w)];
      std::vector<std::size_t> order(n);
      for (std::size_t w = 0; w < n; ++w) order[w] = w;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(lists.begin() + a * k, lists.begin() + (a + 1) * k,
                                            lists.begin() + b * k, lists.begin() + (b + 1) * k);
      });
      put_u32(sig, static_cast<std::uint32_t>(n));
      for (std::size_t w : order)
        for (std::size_t l = 0; l < k; ++l) put_u32(sig, lists[w * k + l]);
      return sig;
    }

    std::vector<std::uint64_t> bag;
    for (std::size_t j = 0; j < k; ++j) {
      bag.clear();
      std::size_t vj = ts.entry(t, j);
      if (algorithm == WlAlgorithm::DeltaKLWL || (algorithm == WlAlgorithm::KWL && k == 1)) {
        for (std::size_t u : adjacency[vj]) bag.push_back(colors[ts.replace(t, j, u)]);
      } else if (algorithm == WlAlgorithm::DeltaKWL) {
        for (std::size_t u = 0; u < n; ++u)
          bag.push_back((static_cast<std::uint64_t>(colors[ts.replace(t, j, u)]) << 1) |
                        (g.adjacent(vj, u) ? 1u : 0u));
      } else {
        for (std::size_t u = 0; u < n; ++u) bag.push_back(colors[ts.replace(t, j, u)]);
      }
      std::sort(bag.begin(), bag.end());
      put_u32(sig, static_cast<std::uint32_t>(bag.size()));
      for (std::uint64_t v : bag) put_u64(sig, v);
    }
    return sig;
  }
};

// Atomizes one signature per tuple across all graphs and writes rank ids.
std::vector<std::vector<ColorId>> atomize(const std::vector<std::vector<std::string>>& sigs) {
  ColorAtomizer atomizer;
  std::vector<std::vector<ColorId>> ids(sigs.size());
  for (std::size_t gi = 0; gi < sigs.size(); ++gi) {
    ids[gi].resize(sigs[gi].size());
    for (std::size_t t = 0; t < sigs[gi].size(); ++t) ids[gi][t] = atomizer.intern(sigs[gi][t]);
  }
  auto rank = atomizer.canonical_ranks();
  for (auto& row : ids)
    for (auto& c : row) c = rank[c];
  return ids;
}

std::size_t union_class_count(const std::vector<std::vector<ColorId>>& colors) {
  ColorId max_id = 0;
  bool any = false;
  for (const auto& row : colors)
    for (ColorId c : row) {
      max_id = std::max(max_id, c);
      any = true;
    }
  if (!any) return 0;
  std::vector<bool> seen(static_cast<std::size_t>(max_id) + 1, false);
  std::size_t count = 0;
  for (const auto& row : colors)
    for (ColorId c : row)
      if (!seen[c]) {
        seen[c] = true;
        ++count;
      }
  return count;
}

}  // namespace

std::vector<std::string> isomorphism_type_signatures(const Graph& g, std::size_t k,
                                                     std::size_t budget) {
  TupleSpace ts(g.n(), k, budget);
  std::vector<std::string> sigs(ts.size());
  parallel_for(ts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) sigs[t] = type_signature(g, ts, t);
  });
  return sigs;
}

Coloring init_isomorphism_types(const Graph& g, std::size_t k, std::size_t budget) {
  auto ids = atomize({isomorphism_type_signatures(g, k, budget)});
  return Coloring{std::move(ids[0]), 0};
}

// ---------------------------------------------------------------- refinement

BatchRefinement refine_batch(const std::vector<Graph>& graphs, WlAlgorithm algorithm, std::size_t k,
                             const BatchOptions& options) {
  BatchRefinement out;
  RefinementResult& res = out.result;
  res.algorithm = algorithm;
  res.k = k;
  const std::size_t count = graphs.size();
  res.histograms.resize(count);
  if (options.keep_history) out.history.resize(count);

  std::vector<TupleSpace> spaces;
  std::vector<std::vector<std::vector<std::size_t>>> adjacency;
  std::vector<std::vector<std::string>> sigs(count);
  for (std::size_t gi = 0; gi < count; ++gi) {
    spaces.emplace_back(graphs[gi].n(), k, options.budget);
    adjacency.push_back(graphs[gi].adjacency_lists());
    sigs[gi] = isomorphism_type_signatures(graphs[gi], k, options.budget);
  }
  std::vector<std::vector<ColorId>> colors = atomize(sigs);

  auto record = [&](std::size_t round) {
    for (std::size_t gi = 0; gi < count; ++gi) {
      Coloring c{colors[gi], round};
      res.histograms[gi].push_back(c.histogram());
      if (options.keep_history) out.history[gi].push_back(c);
    }
    if (!res.distinguished) {
      for (std::size_t gi = 1; gi < count; ++gi)
        if (res.histograms[gi].back() != res.histograms[0].back()) {
          res.distinguished = true;
          res.rounds_to_distinguish = round;
          break;
        }
    }
  };
  record(0);

  std::size_t classes = union_class_count(colors);
  std::size_t round = 0;
  while (round < options.max_rounds) {
    for (std::size_t gi = 0; gi < count; ++gi) {
      SignatureBuilder builder{graphs[gi], spaces[gi], algorithm, adjacency[gi]};
      const auto& prev = colors[gi];
      auto& out_sigs = sigs[gi];
      parallel_for(spaces[gi].size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) out_sigs[t] = builder.build(t, prev);
      });
    }
    colors = atomize(sigs);
    ++round;
    record(round);
    std::size_t next_classes = union_class_count(colors);
    if (next_classes == classes) {
      res.reached_stability = true;
      res.stable_round = round;
      break;
    }
    classes = next_classes;
  }
  res.rounds = round;
  if (!res.reached_stability) res.stable_round = round;
  for (std::size_t gi = 0; gi < count; ++gi) out.final_colorings.push_back(Coloring{colors[gi], round});
  return out;
}

namespace {
std::pair<Coloring, RefinementResult> refine_single(const Graph& g, WlAlgorithm a, std::size_t k,
                                                    std::size_t max_rounds) {
  BatchOptions opts;
  opts.max_rounds = max_rounds;
  auto batch = refine_batch({g}, a, k, opts);
  return {std::move(batch.final_colorings[0]), std::move(batch.result)};
}
}  // namespace

std::pair<Coloring, RefinementResult> refine_kwl(const Graph& g, std::size_t k, std::size_t max_rounds) {
  return refine_single(g, WlAlgorithm::KWL, k, max_rounds);
}
std::pair<Coloring, RefinementResult> refine_delta_kwl(const Graph& g, std::size_t k,
                                                       std::size_t max_rounds) {
  return refine_single(g, WlAlgorithm::DeltaKWL, k, max_rounds);
}
std::pair<Coloring, RefinementResult> refine_delta_klwl(const Graph& g, std::size_t k,
                                                        std::size_t max_rounds) {
  return refine_single(g, WlAlgorithm::DeltaKLWL, k, max_rounds);
}
std::pair<Coloring, RefinementResult> refine_kfwl(const Graph& g, std::size_t k, std::size_t max_rounds) {
  return refine_single(g, WlAlgorithm::KFWL, k, max_rounds);
}

std::vector<Coloring> refinement_history(const Graph& g, WlAlgorithm algorithm, std::size_t k,
                                         std::size_t rounds) {
  // Run without the stability stop so exactly `rounds` rounds are recorded.
  std::vector<Coloring> out;
  TupleSpace ts(g.n(), k);
  auto adjacency = g.adjacency_lists();
  std::vector<std::vector<std::string>> sigs{isomorphism_type_signatures(g, k)};
  auto colors = atomize(sigs)[0];
  out.push_back(Coloring{colors, 0});
  SignatureBuilder builder{g, ts, algorithm, adjacency};
  for (std::size_t r = 1; r <= rounds; ++r) {
    for (std::size_t t = 0; t < ts.size(); ++t) sigs[0][t] = builder.build(t, colors);
    colors = atomize(sigs)[0];
    out.push_back(Coloring{colors, r});
  }
  return out;
}

RefinementResult compare_graphs(const Graph& g, const Graph& h, WlAlgorithm algorithm, std::size_t k,
                                std::size_t max_rounds) {
  BatchOptions opts;
  opts.max_rounds = max_rounds;
  return refine_batch({g, h}, algorithm, k, opts).result;
}

std::vector<std::vector<bool>> pairwise_verdicts(const std::vector<Graph>& graphs,
                                                 WlAlgorithm algorithm, std::size_t k,
                                                 std::size_t max_rounds) {
  BatchOptions opts;
  opts.max_rounds = max_rounds;
  auto batch = refine_batch(graphs, algorithm, k, opts);
  const auto& hist = batch.result.histograms;
  const std::size_t count = graphs.size();
  std::vector<std::vector<bool>> out(count, std::vector<bool>(count, false));
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b) {
      bool differ = false;
      for (std::size_t r = 0; r < hist[a].size() && !differ; ++r) differ = hist[a][r] != hist[b][r];
      out[a][b] = out[b][a] = differ;
    }
  return out;
}

bool refines(const std::vector<ColorId>& fine, const std::vector<ColorId>& coarse) {
  if (fine.size() != coarse.size()) throw Error(ErrorKind::SizeMismatch, "partition sizes differ");
  std::unordered_map<ColorId, ColorId> image;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    auto [it, inserted] = image.try_emplace(fine[i], coarse[i]);
    if (!inserted && it->second != coarse[i]) return false;
  }
  return true;
}

bool same_partition(const std::vector<ColorId>& a, const std::vector<ColorId>& b) {
  return refines(a, b) && refines(b, a);
}

std::string to_json(const RefinementResult& r) {
  nlohmann::json j;
  j["algorithm"] = to_string(r.algorithm);
  j["k"] = r.k;
  j["rounds"] = r.rounds;
  j["stable_round"] = r.stable_round;
  j["reached_stability"] = r.reached_stability;
  j["distinguished"] = r.distinguished;
  j["rounds_to_distinguish"] =
      r.rounds_to_distinguish ? nlohmann::json(*r.rounds_to_distinguish) : nlohmann::json(nullptr);
  auto hist_json = [](const std::vector<Histogram>& rounds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& h : rounds) arr.push_back(sorted_counts(h));
    return arr;
  };
  j["per_round_histograms"] = r.histograms.empty() ? nlohmann::json::array() : hist_json(r.histograms[0]);
  if (r.histograms.size() > 1) {
    nlohmann::json others = nlohmann::json::array();
    for (std::size_t g = 1; g < r.histograms.size(); ++g) others.push_back(hist_json(r.histograms[g]));
    j["per_round_histograms_other"] = others;
  }
  return j.dump();
}

}  // namespace hogt
