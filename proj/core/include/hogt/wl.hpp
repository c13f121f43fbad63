#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hogt/graph.hpp"

namespace hogt {

inline constexpr std::size_t kDefaultTupleBudget = 10'000'000;
inline constexpr std::size_t kDefaultMaxRounds = 1000;

// Row-major enumeration of [n]^k: (i_1..i_k) <-> sum_j i_j * n^(k-j).
class TupleSpace {
 public:
  TupleSpace(std::size_t n, std::size_t k, std::size_t budget = kDefaultTupleBudget);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t size() const { return size_; }

  std::size_t flat(const std::vector<std::size_t>& index) const;
  std::vector<std::size_t> unflat(std::size_t flat) const;
  // j-th entry (0-based) of the tuple at flat.
  std::size_t entry(std::size_t flat, std::size_t j) const { return (flat / stride_[j]) % n_; }
  // Tuple with its j-th entry replaced by u.
  std::size_t replace(std::size_t flat, std::size_t j, std::size_t u) const {
    return flat + (u - entry(flat, j)) * stride_[j];
  }
  std::size_t stride(std::size_t j) const { return stride_[j]; }

 private:
  std::size_t n_, k_, size_;
  std::vector<std::size_t> stride_;
};

using ColorId = std::uint32_t;
// (color id, count) sorted by color id.
using Histogram = std::vector<std::pair<ColorId, std::size_t>>;

struct Coloring {
  std::vector<ColorId> colors;
  std::size_t round = 0;

  std::size_t num_colors() const;
  Histogram histogram() const;
};

// Counts of each class, sorted descending.
std::vector<std::size_t> sorted_counts(const Histogram& h);

// Injective signature -> dense id table. Ids are handed out in insertion order;
// canonical_ranks() re-indexes them by sorted signature.
class ColorAtomizer {
 public:
  ColorId intern(const std::string& signature);
  std::size_t size() const { return order_.size(); }
  const std::string& signature(ColorId id) const { return order_[id]; }
  // rank[id] = position of signature(id) in sorted order.
  std::vector<ColorId> canonical_ranks() const;

 private:
  std::map<std::string, ColorId> table_;
  std::vector<std::string> order_;
};

enum class WlAlgorithm { KWL, DeltaKWL, DeltaKLWL, KFWL };
std::string to_string(WlAlgorithm a);
WlAlgorithm parse_wl_algorithm(const std::string& name);

// Canonical byte signature of each tuple's isomorphism type.
std::vector<std::string> isomorphism_type_signatures(const Graph& g, std::size_t k,
                                                     std::size_t budget = kDefaultTupleBudget);
Coloring init_isomorphism_types(const Graph& g, std::size_t k,
                                std::size_t budget = kDefaultTupleBudget);

struct RefinementResult {
  WlAlgorithm algorithm = WlAlgorithm::KWL;
  std::size_t k = 0;
  // histograms[graph][round]; round 0 is the isomorphism-type initialization.
  std::vector<std::vector<Histogram>> histograms;
  bool distinguished = false;
  std::optional<std::size_t> rounds_to_distinguish;
  // First round whose partition equals the previous one (joint over all graphs).
  std::size_t stable_round = 0;
  bool reached_stability = false;
  std::size_t rounds = 0;
};

struct BatchOptions {
  std::size_t max_rounds = kDefaultMaxRounds;
  std::size_t budget = kDefaultTupleBudget;
  bool keep_history = false;
};

struct BatchRefinement {
  RefinementResult result;
  std::vector<Coloring> final_colorings;             // per graph
  std::vector<std::vector<Coloring>> history;        // [graph][round] when keep_history
};

// Refines all graphs in lockstep with one shared atomizer per round, so colors
// and histograms are comparable across graphs. For k = 1, KWL is classic color
// refinement over graph neighbours.
BatchRefinement refine_batch(const std::vector<Graph>& graphs, WlAlgorithm algorithm, std::size_t k,
                             const BatchOptions& options = {});

std::pair<Coloring, RefinementResult> refine_kwl(const Graph& g, std::size_t k,
                                                 std::size_t max_rounds = kDefaultMaxRounds);
std::pair<Coloring, RefinementResult> refine_delta_kwl(const Graph& g, std::size_t k,
                                                       std::size_t max_rounds = kDefaultMaxRounds);
std::pair<Coloring, RefinementResult> refine_delta_klwl(const Graph& g, std::size_t k,
                                                        std::size_t max_rounds = kDefaultMaxRounds);
std::pair<Coloring, RefinementResult> refine_kfwl(const Graph& g, std::size_t k,
                                                  std::size_t max_rounds = kDefaultMaxRounds);

// Colorings after rounds 0..rounds (no early stop).
std::vector<Coloring> refinement_history(const Graph& g, WlAlgorithm algorithm, std::size_t k,
                                         std::size_t rounds);

RefinementResult compare_graphs(const Graph& g, const Graph& h, WlAlgorithm algorithm, std::size_t k,
                                std::size_t max_rounds = kDefaultMaxRounds);

// Verdict matrix over a corpus: distinguished[i][j] for every pair.
std::vector<std::vector<bool>> pairwise_verdicts(const std::vector<Graph>& graphs,
                                                 WlAlgorithm algorithm, std::size_t k,
                                                 std::size_t max_rounds = kDefaultMaxRounds);

bool same_partition(const std::vector<ColorId>& a, const std::vector<ColorId>& b);
// True when every class of fine lies inside one class of coarse.
bool refines(const std::vector<ColorId>& fine, const std::vector<ColorId>& coarse);

// {algorithm, k, rounds, distinguished, rounds_to_distinguish, per_round_histograms, ...}
std::string to_json(const RefinementResult& r);

}  // namespace hogt
